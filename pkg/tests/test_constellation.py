import itertools
import math

import numpy as np
import pytest

from conftest import as_row_set, leaders
from noma_lab.constellation import (
    alpha_lattice_partition,
    composite_1d,
    coset_leaders,
    eta_general,
    eta_lattice_partition,
    lattice_partition_scheme,
    leaders_power,
    superimpose,
)
from noma_lab.errors import AlphaOutOfRangeError, ConfigInvalidError, SizeCapError
from noma_lab.lattice import build_lattice, identity_lattice

CASES = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 3)]


def test_leaders_integers_p5_m1(lat5):
    c = coset_leaders(lat5, 1)
    assert c.size == 4
    assert as_row_set(c.integers) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert c.label_of([1, 0]) == 2


def test_labels_mixed_radix(lat7):
    c = coset_leaders(lat7, 2)
    for k in (0, 5, 17, 63):
        assert c.label_of(c.integers[k]) == k


@pytest.mark.parametrize("p, m, power", [(5, 2, 2.5), (7, 1, 0.75), (5, 1, 0.5)])
def test_dithered_power_examples(p, m, power):
    c = coset_leaders(build_lattice(p), m)
    d = c.dithered
    assert np.max(np.abs(d.mean(axis=0))) < 1e-12
    assert abs((d ** 2).sum(axis=1).mean() - power) < 1e-9


def test_leaders_distinct(lat7):
    c = coset_leaders(lat7, 2)
    assert len(as_row_set(c.points)) == c.size


def test_size_cap(lat5):
    with pytest.raises(SizeCapError):
        coset_leaders(lat5, 9)
    with pytest.raises(SizeCapError):
        lattice_partition_scheme(lat5, 4, 5)
    coset_leaders(lat5, 9, max_bits=18)


def test_bad_m(lat5):
    with pytest.raises(ConfigInvalidError):
        coset_leaders(lat5, 0)


def test_eta_examples():
    assert eta_general(1, 1, 0.37) == pytest.approx(2.0)
    assert eta_general(2, 1, 0.2) == pytest.approx(1.490712, abs=1e-6)
    assert eta_lattice_partition(3, 3) == pytest.approx(0.054134, abs=1e-6)
    assert alpha_lattice_partition(2) == pytest.approx(1 / 17)


@pytest.mark.parametrize("alpha", [-0.01, 1.01, float("nan")])
def test_alpha_range(lat5, alpha):
    c1, c2 = leaders(lat5, 1, 1)
    with pytest.raises(AlphaOutOfRangeError):
        superimpose(c1, c2, alpha)


def test_mismatched_lattices(lat5):
    with pytest.raises(ConfigInvalidError):
        superimpose(coset_leaders(lat5, 1), coset_leaders(identity_lattice(2), 1), 0.3)


@pytest.mark.parametrize("p", [5, 7])
@pytest.mark.parametrize("m1, m2", CASES[:5])
def test_power_and_mean(p, m1, m2, rng):
    lat = build_lattice(p)
    if lat.n * (m1 + m2) > 16:
        pytest.skip("over cap")
    c1, c2 = leaders(lat, m1, m2)
    for a in list(rng.uniform(0, 1, 4)) + [0.0, 1.0]:
        s = superimpose(c1, c2, a)
        assert s.size == 2 ** (lat.n * (m1 + m2))
        assert np.max(np.abs(s.points.mean(axis=0))) < 1e-12
        assert abs((s.points ** 2).sum(axis=1).mean() - lat.n) < 1e-9


def test_lp_power_and_distinct(lat5, lat7):
    for lat, (m1, m2) in [(lat5, (3, 3)), (lat7, (1, 1)), (lat7, (2, 1))]:
        s = lattice_partition_scheme(lat, m1, m2)
        assert abs((s.points ** 2).sum(axis=1).mean() - lat.n) < 1e-9
        assert len(as_row_set(s.points)) == s.size
        assert s.alpha == alpha_lattice_partition(m1)


def test_composite_index_and_components(lat5):
    c1, c2 = leaders(lat5, 2, 1)
    s = superimpose(c1, c2, 0.3)
    for k in (0, 7, 19, 63):
        l1, l2 = s.labels[k]
        assert k == l1 * c2.size + l2
        assert np.allclose(s.points[k], s.user1_points[l1] + s.user2_points[l2], atol=1e-15)


def test_dither_decomposition(lat5, lat7, rng):
    """Mean of the undithered superposition splits into the per-user dithers."""
    for lat in (lat5, lat7):
        for m1, m2 in [(1, 1), (2, 1), (1, 2)]:
            c1, c2 = leaders(lat, m1, m2)
            a = float(rng.uniform())
            raw = (math.sqrt(a) * c1.points[:, None, :]
                   + math.sqrt(1 - a) * c2.points[None, :, :]).reshape(-1, lat.n)
            want = math.sqrt(a) * c1.dither + math.sqrt(1 - a) * c2.dither
            assert np.max(np.abs(raw.mean(axis=0) - want)) < 1e-12


@pytest.mark.parametrize("m1, m2", CASES[:5])
def test_scheme_equivalence(lat5, m1, m2):
    c1, c2 = leaders(lat5, m1, m2)
    lp = lattice_partition_scheme(lat5, m1, m2)
    gen = superimpose(c1, c2, alpha_lattice_partition(m1))
    assert np.max(np.abs(lp.points - gen.points)) < 1e-10


def test_lp_equals_finer_leaders(lat5):
    s = lattice_partition_scheme(lat5, 1, 1)
    fine = coset_leaders(lat5, 2)
    want = math.sqrt(12 / 15) * fine.dithered
    assert as_row_set(s.points) == as_row_set(want)


def test_cartesian_structure_explicit(lat7, rng):
    """Unrotated composite equals the n-fold product of the 1-D composite."""
    for m1, m2 in [(1, 1), (2, 1), (1, 2)]:
        c1, c2 = leaders(lat7, m1, m2)
        a = float(rng.uniform())
        s = superimpose(c1, c2, a)
        one = composite_1d(m1, m2, a)
        prod = np.array(list(itertools.product(one, repeat=lat7.n)))
        assert as_row_set(lat7.unrotate(s.points)) == as_row_set(prod)


def test_identity_lattice_scheme():
    lat = identity_lattice(2)
    c = coset_leaders(lat, 1)
    s = superimpose(c, c, 0.2)
    assert abs((s.points ** 2).sum(axis=1).mean() - 2) < 1e-12


def test_leaders_power_formula():
    for n in range(1, 7):
        for m in range(1, 13 // n + 1):
            assert leaders_power(n, m) == pytest.approx(n * (4 ** m - 1) / 12)


def test_descriptor(lat5):
    d = lattice_partition_scheme(lat5, 2, 1).descriptor()
    assert d["mode"] == "lattice_partition" and d["p"] == 5 and d["m1"] == 2
