import math

import numpy as np
import pytest

from noma_lab.errors import NonPrimeError, TooSmallError, UnsupportedPrimeError
from noma_lab.lattice import (
    MAX_PRIME,
    build_field,
    build_lattice,
    generator_matrix,
    identity_lattice,
    is_prime,
    lattice_dpmin,
    shell_dpmin,
    witness_point,
)

PRIMES = [p for p in range(5, MAX_PRIME + 1) if is_prime(p)]


def test_degree():
    assert build_field(5).n == 2
    assert build_field(7).n == 3
    assert build_field(61).n == 30


@pytest.mark.parametrize("p, exc", [
    (4, NonPrimeError), (9, NonPrimeError), (1, NonPrimeError), (0, NonPrimeError),
    (5.5, NonPrimeError), (2, TooSmallError), (3, TooSmallError), (67, UnsupportedPrimeError),
])
def test_bad_primes(p, exc):
    with pytest.raises(exc):
        build_field(p)


def test_embeddings_symmetric():
    for p in (5, 7, 11, 13):
        e = build_field(p).embeddings
        assert np.array_equal(e, e.T)


def test_generator_p5_entries():
    G = build_lattice(5).generator
    want = np.array([[-0.525731, -0.850651], [-0.850651, 0.525731]])
    assert np.max(np.abs(G - want)) < 1e-6


def test_generator_is_formula():
    """Rebuild G from the cosine table with explicit loops."""
    p = 11
    f = build_field(p)
    n = f.n
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = sum(2 * math.cos(2 * math.pi * (k + 1) * (j + 1) / p) for k in range(i, n))
            G[i, j] = s * math.sqrt(2 - 2 * math.cos(2 * math.pi * (j + 1) / p)) / math.sqrt(p)
    assert np.allclose(generator_matrix(f).generator, G, atol=1e-13)


@pytest.mark.parametrize("p", PRIMES)
def test_orthogonal_all_supported(p):
    lat = build_lattice(p)
    assert lat.orthogonality_residual() < 1e-10
    assert abs(abs(np.linalg.det(lat.generator)) - 1) < 1e-10


def test_dpmin_values():
    assert lattice_dpmin(build_field(5)) == pytest.approx(0.447214, abs=1e-6)
    assert lattice_dpmin(build_field(7)) == pytest.approx(1 / 7, abs=1e-15)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17])
def test_witness_point(p):
    lat = build_lattice(p)
    w = witness_point(lat)
    assert abs(np.linalg.norm(w) - 1) < 1e-10
    assert abs(np.abs(w).prod() - lat.dpmin) < 1e-10


def test_witness_p5_coordinates():
    w = witness_point(build_lattice(5))
    assert np.allclose(w, [-0.850651, 0.525731], atol=1e-6)


@pytest.mark.parametrize("p, r", [(5, 3), (5, 6), (7, 2), (7, 3), (11, 2)])
def test_shell_oracle(p, r):
    lat = build_lattice(p)
    val, b = shell_dpmin(lat, r)
    assert val >= lat.dpmin - 1e-12
    assert abs(val - lat.dpmin) < 1e-9
    assert np.any(b != 0)


def test_shell_half_enumeration_matches_full():
    """Half-shell enumeration must agree with a plain full loop."""
    lat = build_lattice(5)
    best = min(
        abs(np.prod(lat.points([a, b])))
        for a in range(-3, 4) for b in range(-3, 4) if (a, b) != (0, 0)
    )
    assert shell_dpmin(lat, 3)[0] == pytest.approx(best, abs=1e-15)


def test_unrotate_inverts(rng):
    lat = build_lattice(13)
    b = rng.integers(-5, 6, size=(20, lat.n))
    assert np.allclose(lat.unrotate(lat.points(b)), b, atol=1e-12)


def test_identity_lattice():
    lat = identity_lattice(3)
    assert lat.field is None and lat.p is None and lat.dpmin == 0.0
    assert shell_dpmin(lat, 1)[0] == 0.0


def test_generator_immutable():
    lat = build_lattice(5)
    with pytest.raises(ValueError):
        lat.generator[0, 0] = 1.0
