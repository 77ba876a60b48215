"""Distance figures of superimposed constellations.

Exact values come from exhaustive pair scans; the analytical side covers the
closed form of the lattice-partition scheme and the piecewise upper bound on
the minimum product distance for arbitrary power split.

Product-distance convention: two coordinates "differ" when their absolute
difference exceeds ``tol`` (default 1e-9).  The reported minimum product
distance is taken over pairs differing in all ``n`` coordinates; pairs that
coincide entirely make it zero, and pairs differing in only some
coordinates are counted separately as diversity-loss events.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .constellation import (
    alpha_lattice_partition,
    eta_general,
    _check_alpha,
)
from .errors import ConfigInvalidError, SizeCapError, UnsupportedDimensionError

__all__ = [
    "PairMinimum",
    "DistanceReport",
    "BAND_VARIANTS",
    "product_distance",
    "dpmin_bruteforce",
    "demin_bruteforce",
    "dpmin_grid_search",
    "dpmin_upper_bound",
    "dpmin_lattice_partition",
    "cluster_dpmin",
    "user_dpmins",
    "min_gap_1d",
    "demin_1d",
    "min_determinant",
    "distance_report",
]

MAX_PAIR_POINTS = 2 ** 16
DIFF_TOL = 1e-9
BAND_VARIANTS = ("printed", "squared")


def product_distance(a, b, tol=DIFF_TOL):
    """Product of ``|a_l - b_l|`` over differing coordinates, and their count."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    mask = d > tol
    return float(np.prod(d[mask])), int(mask.sum())


@dataclass
class PairMinimum:
    """Result of a pair scan.

    ``pair`` holds the two composite indices achieving ``value`` (``None``
    when there is no qualifying pair).  ``n_coincident`` counts distinct
    labelled pairs at the same location; ``n_partial`` counts pairs that
    differ in fewer than ``n`` coordinates (but not zero).
    """

    value: float
    pair: "tuple | None"
    n_coincident: int = 0
    n_partial: int = 0


@dataclass
class DistanceReport:
    dpmin_exact: float
    dpmin_bound: float
    demin_exact: float
    dpmin_pair: "tuple | None"
    demin_pair: "tuple | None"
    n_coincident: int
    n_partial: int
    alpha: float
    scheme: dict = field(default_factory=dict)

    @property
    def bound_holds(self):
        return self.dpmin_exact <= self.dpmin_bound + 1e-12


def _scan_rows(points, start, stop, tol):
    """Minima over pairs ``(i, j)`` with ``start <= i < stop`` and ``j > i``."""
    N, n = points.shape
    cols = [np.ascontiguousarray(points[:, l]) for l in range(n)]
    best_dp, arg_dp = math.inf, None
    best_de, arg_de = math.inf, None
    n_coinc = n_part = 0
    block = max(1, (1 << 20) // max(1, N))
    for s in range(start, stop, block):
        e = min(stop, s + block)
        prod = sq = None
        L = np.zeros((e - s, N - s), dtype=np.int8)
        for x in cols:
            d = np.abs(x[s:e, None] - x[None, s:])
            L += d > tol
            prod = d if prod is None else prod * d
            sq = d * d if sq is None else sq + d * d
        upper = np.arange(s, N)[None, :] > np.arange(s, e)[:, None]
        n_coinc += int(np.count_nonzero(upper & (L == 0)))
        n_part += int(np.count_nonzero(upper & (L > 0) & (L < n)))
        prod[~(upper & (L == n))] = np.inf
        sq[~upper] = np.inf
        k = int(np.argmin(prod))
        if prod.flat[k] < best_dp:
            best_dp = float(prod.flat[k])
            r, c = divmod(k, prod.shape[1])
            arg_dp = (s + r, s + c)
        k = int(np.argmin(sq))
        if sq.flat[k] < best_de:
            best_de = float(sq.flat[k])
            r, c = divmod(k, sq.shape[1])
            arg_de = (s + r, s + c)
    return best_dp, arg_dp, best_de, arg_de, n_coinc, n_part


def _pair_scan(points, tol=DIFF_TOL, threads=1, max_points=MAX_PAIR_POINTS):
    points = np.ascontiguousarray(points, dtype=float)
    N = len(points)
    if N > max_points:
        raise SizeCapError(f"{N} points exceed the pair-scan cap of {max_points}")
    if N < 2:
        return PairMinimum(math.inf, None), PairMinimum(math.inf, None)
    threads = max(1, int(threads))
    # split rows so that each part has roughly equal pair count
    cuts = [0]
    total = N * (N - 1) / 2
    for t in range(1, threads):
        target = total * t / threads
        # rows i < r hold r*N - r*(r+1)/2 pairs
        r = N - 0.5 - math.sqrt((N - 0.5) ** 2 - 2 * target)
        cuts.append(int(min(N, max(cuts[-1], round(r)))))
    cuts.append(N)
    spans = [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
    if len(spans) == 1:
        parts = [_scan_rows(points, 0, N, tol)]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as ex:
            parts = list(ex.map(lambda ab: _scan_rows(points, ab[0], ab[1], tol), spans))
    n_coinc = sum(p[4] for p in parts)
    n_part = sum(p[5] for p in parts)
    # ties resolved towards the earliest row block, i.e. the lowest index pair
    dp = min(parts, key=lambda p: p[0])
    de = min(parts, key=lambda p: p[2])
    dp_value = 0.0 if n_coinc else dp[0]
    dp_pair = dp[1]
    if n_coinc:
        dp_pair = de[3]
    return (
        PairMinimum(dp_value, dp_pair, n_coinc, n_part),
        PairMinimum(math.sqrt(de[2]), de[3], n_coinc, n_part),
    )


def _points_of(scheme_or_points):
    return getattr(scheme_or_points, "points", scheme_or_points)


def dpmin_bruteforce(scheme, tol=DIFF_TOL, threads=1, max_points=MAX_PAIR_POINTS):
    """Exhaustive minimum product distance over all distinct labelled pairs.

    Accepts a :class:`~noma_lab.constellation.CompositeScheme` or a raw
    ``(N, n)`` point array.  Returns a :class:`PairMinimum`.
    """
    return _pair_scan(_points_of(scheme), tol, threads, max_points)[0]


def demin_bruteforce(scheme, tol=DIFF_TOL, threads=1, max_points=MAX_PAIR_POINTS):
    """Exhaustive minimum Euclidean distance over distinct labelled pairs."""
    return _pair_scan(_points_of(scheme), tol, threads, max_points)[1]


def min_gap_1d(values, tol=1e-12):
    """Smallest gap between sorted values (zero if two entries coincide)."""
    v = np.sort(np.asarray(values, dtype=float))
    if len(v) < 2:
        return math.inf
    g = np.diff(v)
    g = np.where(g <= tol, 0.0, g)
    return float(g.min())


def _scheme_1d(scheme):
    s1, s2 = scheme.scale_1d()
    x1 = np.arange(2 ** scheme.m1) - (2 ** scheme.m1 - 1) / 2.0
    x2 = np.arange(2 ** scheme.m2) - (2 ** scheme.m2 - 1) / 2.0
    return (s1 * x1[:, None] + s2 * x2[None, :]).ravel()


def demin_1d(scheme):
    """Minimum Euclidean distance through the one-dimensional composite."""
    return min_gap_1d(_scheme_1d(scheme))


def _unique_sorted(v, tol):
    v = np.sort(v)
    keep = np.concatenate([[True], np.diff(v) > tol])
    return v[keep]


def dpmin_grid_search(lattice, m1, m2, alpha, tol=DIFF_TOL, chunk=1 << 16):
    """Exact minimum product distance through the difference set of the 1-D composite.

    The composite is ``U^n G`` with ``U`` the one-dimensional composite, so
    every pair difference is ``delta G`` with ``delta`` in ``D^n``,
    ``D = U - U``.  For each choice of the first ``n - 1`` entries of
    ``delta`` the product is a polynomial in the last entry whose modulus
    is unimodal between consecutive roots, so only the elements of ``D``
    next to each root can be minimal.  This avoids materialising the
    ``|U|^n`` points and handles schemes beyond the pair-scan cap.

    Returns a :class:`PairMinimum` whose ``pair`` is the minimising
    ``delta`` (in 1-D composite units) and whose counts report coincident
    1-D values and observed partial-diversity candidates.
    """
    _check_alpha(alpha)
    G = np.asarray(lattice.generator, dtype=float)
    n = G.shape[0]
    U = np.sort(_scheme_1d_values(m1, m2, alpha))
    n_dup = int((np.diff(U) <= 1e-12).sum())
    if n_dup:
        return PairMinimum(0.0, (0.0,) * n, n_dup, 0)
    D = _unique_sorted((U[:, None] - U[None, :]).ravel(), 1e-12)
    last = G[-1]
    head = G[:-1]
    best, arg, n_part = math.inf, None, 0
    nd = len(D)
    total = nd ** (n - 1)
    for s in range(0, total, chunk):
        idx = np.arange(s, min(total, s + chunk))
        digits = np.empty((len(idx), n - 1), dtype=np.int64)
        rem = idx.copy()
        for k in range(n - 2, -1, -1):
            digits[:, k] = rem % nd
            rem //= nd
        delta_head = D[digits]
        a = delta_head @ head if n > 1 else np.zeros((len(idx), n))
        nz = last != 0
        roots = -a[:, nz] / last[nz]
        pos = np.searchsorted(D, roots)
        cand = np.concatenate([pos - 2, pos - 1, pos, pos + 1], axis=1)
        cand = np.clip(cand, 0, nd - 1)
        t = D[cand]  # (K, C)
        coords = np.abs(a[:, None, :] + t[:, :, None] * last[None, None, :])
        differ = coords > tol
        L = differ.sum(axis=2)
        head_zero = np.all(np.abs(delta_head) <= 1e-15, axis=1)[:, None]
        nonzero = ~(head_zero & (np.abs(t) <= 1e-15))
        n_part += int((nonzero & (L > 0) & (L < n)).sum())
        prod = np.where(nonzero & (L == n), coords.prod(axis=2), np.inf)
        k = int(np.argmin(prod))
        if prod.flat[k] < best:
            best = float(prod.flat[k])
            r, c = divmod(k, prod.shape[1])
            arg = tuple(float(x) for x in np.append(delta_head[r], t[r, c]))
    return PairMinimum(best, arg, 0, n_part)


def _scheme_1d_values(m1, m2, alpha):
    eta = eta_general(m1, m2, alpha)
    x1 = np.arange(2 ** m1) - (2 ** m1 - 1) / 2.0
    x2 = np.arange(2 ** m2) - (2 ** m2 - 1) / 2.0
    return eta * (math.sqrt(alpha) * x1[:, None] + math.sqrt(1 - alpha) * x2[None, :]).ravel()


def dpmin_lattice_partition(m1, m2, n, p):
    """Closed-form minimum product distance of the lattice-partition scheme."""
    return (12.0 / (4.0 ** (m1 + m2) - 1.0)) ** (n / 2.0) * float(p) ** (-(n - 1) / 2.0)


def user_dpmins(m1, m2, n, p, alpha):
    """In-layer minimum product distances ``(dp1, dp2)`` of the two users."""
    den = (4.0 ** m1 - 4.0 ** m2) * alpha + 4.0 ** m2 - 1.0
    dl = float(p) ** (-(n - 1) / 2.0)
    dp1 = (12.0 * alpha / den) ** (n / 2.0) * dl
    dp2 = (12.0 * (1.0 - alpha) / den) ** (n / 2.0) * dl
    return dp1, dp2


def _cluster_root(m1, r1, r2, alpha):
    """n-th root of the two-cluster (m2 = 1) inter-cluster product distance."""
    q = 2 ** m1
    if alpha <= 1.0 / ((q - 1.5) ** 2 + 1.0):
        return abs(r2 - (q - 1) * r1)
    for l in range(2, q - 1):
        if alpha <= 1.0 / ((q - 0.5 - l) ** 2 + 1.0):
            return abs(r2 - (q - l) * r1)
    return r2 - r1


def cluster_dpmin(m1, m2, n, p, alpha):
    """Inter-cluster minimum product distance for two clusters (``m2 = 1`` case).

    Defined for ``alpha`` above the lattice-partition split; ``m2`` only
    enters through the normalisation.
    """
    dp1, dp2 = user_dpmins(m1, m2, n, p, alpha)
    return _cluster_root(m1, dp1 ** (1.0 / n), dp2 ** (1.0 / n), alpha) ** n


def dpmin_upper_bound(m1, m2, n, p, alpha, band="printed"):
    """Piecewise upper bound on the minimum product distance for any ``alpha``.

    ``band`` selects the upper edge of the two-cluster band:
    ``"printed"`` uses ``4 / ((2^m1 - 1/2) + 4)``, ``"squared"`` uses
    ``4 / ((2^m1 - 1/2)^2 + 4)``, which matches the edges of the
    multi-cluster bands.  Intervals are left-open, right-closed and are
    tried in order.  For ``alpha > 1/2`` the users swap roles.
    """
    _check_alpha(alpha)
    if band not in BAND_VARIANTS:
        raise ConfigInvalidError(f"unknown band variant {band!r}", field="band")
    if alpha > 0.5:
        return dpmin_upper_bound(m2, m1, n, p, 1.0 - alpha, band)
    dp1, dp2 = user_dpmins(m1, m2, n, p, alpha)
    if alpha <= alpha_lattice_partition(m1):
        return dp1
    r1 = dp1 ** (1.0 / n)
    rc = _cluster_root(m1, r1, dp2 ** (1.0 / n), alpha)
    c = 2 ** m1 - 0.5
    edge2 = 4.0 / (c + 4.0) if band == "printed" else 4.0 / (c * c + 4.0)
    if alpha <= edge2:
        return rc ** n
    K = 2 ** m2

    def band_value(xi):
        g = np.arange(0, (xi - 1) // 2 + 1)[:, None]
        b = np.arange(1, xi)[None, :]
        return float(np.min(np.abs(g * r1 - b * rc)) ** n)

    for xi in range(3, K):
        lo = (xi - 1) ** 2 / (c * c + (xi - 1) ** 2)
        hi = xi ** 2 / (c * c + xi ** 2)
        if lo < alpha <= hi:
            return band_value(xi)
    return band_value(K)


def min_determinant(scheme, mt=2, tau=1.0, unit_complex_power=True, exhaustive=True):
    """Minimum ``det(Delta Delta^H)`` of Alamouti-coded composite symbols.

    Each 2-D composite point is one complex symbol (real, imaginary).  The
    orthogonal code turns the determinant into ``d_E^(2 mt)``, with
    ``d_E = tau * demin * (1/sqrt(2) if unit_complex_power)``.
    ``exhaustive`` picks the pair scan over the 1-D reduction for ``demin``.
    """
    if scheme.n != 2:
        raise UnsupportedDimensionError(f"Alamouti mapping needs n=2, got n={scheme.n}")
    if mt != 2:
        raise UnsupportedDimensionError(f"only Mt=2 (Alamouti) is supported, got {mt}")
    de = demin_bruteforce(scheme).value if exhaustive else demin_1d(scheme)
    de *= tau
    if unit_complex_power:
        de /= math.sqrt(2.0)
    return de ** (2 * mt)


def distance_report(scheme, band="printed", threads=1):
    """Exact and analytical distance figures for ``scheme``."""
    dp, de = _pair_scan(scheme.points, threads=threads)
    lat = scheme.lattice
    if lat.field is None:
        bound = 0.0
    else:
        bound = dpmin_upper_bound(scheme.m1, scheme.m2, scheme.n, lat.p, scheme.alpha, band)
    lab = scheme.labels
    as_labels = lambda pr: None if pr is None else (tuple(lab[pr[0]]), tuple(lab[pr[1]]))
    return DistanceReport(
        dpmin_exact=dp.value,
        dpmin_bound=bound,
        demin_exact=de.value,
        dpmin_pair=as_labels(dp.pair),
        demin_pair=as_labels(de.pair),
        n_coincident=dp.n_coincident,
        n_partial=dp.n_partial,
        alpha=scheme.alpha,
        scheme=scheme.descriptor(),
    )
