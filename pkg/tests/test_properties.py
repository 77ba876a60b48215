"""Randomised property checks (hypothesis)."""

import itertools
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from noma_lab.analysis import (
    demin_bruteforce,
    dpmin_bruteforce,
    dpmin_upper_bound,
    min_gap_1d,
    product_distance,
)
from noma_lab.constellation import composite_1d, coset_leaders, superimpose
from noma_lab.lattice import build_lattice

LATTICES = {p: build_lattice(p) for p in (5, 7)}
alphas = st.floats(0.0, 1.0, allow_nan=False)
bits = st.sampled_from([(1, 1), (2, 1), (1, 2)])
primes = st.sampled_from([5, 7])


def _scheme(p, m, a):
    lat = LATTICES[p]
    return superimpose(coset_leaders(lat, m[0]), coset_leaders(lat, m[1]), a)


@settings(max_examples=40, deadline=None)
@given(primes, bits, alphas)
def test_power_is_n(p, m, a):
    s = _scheme(p, m, a)
    assert abs((s.points ** 2).sum(axis=1).mean() - s.n) < 1e-9
    assert np.max(np.abs(s.points.mean(axis=0))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(primes, bits, alphas)
def test_cartesian_product(p, m, a):
    s = _scheme(p, m, a)
    lat = LATTICES[p]
    one = composite_1d(m[0], m[1], a)
    want = np.array(list(itertools.product(one, repeat=lat.n)))
    got = lat.unrotate(s.points)
    key = lambda x: sorted(map(tuple, np.round(x, 9)))
    assert key(got) == key(want)


@settings(max_examples=40, deadline=None)
@given(primes, bits, alphas)
def test_bound_dominates_exact(p, m, a):
    s = _scheme(p, m, a)
    exact = dpmin_bruteforce(s).value
    for band in ("printed", "squared"):
        assert exact <= dpmin_upper_bound(m[0], m[1], s.n, p, a, band) + 1e-12


@settings(max_examples=40, deadline=None)
@given(primes, bits, alphas)
def test_euclidean_reduction(p, m, a):
    s = _scheme(p, m, a)
    assert abs(demin_bruteforce(s).value - min_gap_1d(composite_1d(m[0], m[1], a))) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1),
       st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_nth_root_additivity(n, seed, t1, t2):
    rng = np.random.default_rng(seed)
    a, u = rng.normal(size=(2, n))
    u /= np.linalg.norm(u)
    b, c = a + t1 * u, a + (t1 + t2) * u
    r = lambda x, y: product_distance(x, y)[0] ** (1 / n)
    if np.min(np.abs(u)) * min(t1, t2) > 1e-6:
        assert math.isclose(r(a, c), r(a, b) + r(b, c), rel_tol=1e-10, abs_tol=1e-12)
