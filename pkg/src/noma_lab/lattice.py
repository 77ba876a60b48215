"""Rotated Z^n lattices from the maximal real subfield of a cyclotomic field.

For a prime ``p >= 5`` the field ``K = Q(zeta + 1/zeta)`` is totally real of
degree ``n = (p - 1) / 2``.  Twisting the canonical embedding of the integral
basis ``{zeta^i + zeta^-i}`` by ``(1 - zeta)(1 - 1/zeta)`` and applying the
all-ones upper triangular change of basis gives an orthogonal generator
matrix, i.e. a rotation of Z^n with minimum product distance
``p ** (-(n - 1) / 2)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import NonPrimeError, TooSmallError, UnsupportedPrimeError

__all__ = [
    "NumberField",
    "RotatedLattice",
    "MAX_PRIME",
    "is_prime",
    "build_field",
    "generator_matrix",
    "lattice_dpmin",
    "build_lattice",
    "identity_lattice",
    "witness_point",
    "shell_dpmin",
]

MAX_PRIME = 61


def is_prime(p):
    """Deterministic trial division; inputs here are tiny."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class NumberField:
    """Totally real cyclotomic subfield ``Q(zeta_p + zeta_p^-1)``.

    ``embeddings[i-1, j-1] = sigma_j(zeta^i + zeta^-i) = 2 cos(2 pi i j / p)``
    for ``i, j = 1..n``.
    """

    p: int
    n: int
    embeddings: np.ndarray = field(repr=False, compare=False)

    def twist_embeddings(self):
        """Embeddings of ``(1 - zeta)(1 - zeta^-1)``: ``2 - 2 cos(2 pi j / p)``."""
        j = np.arange(1, self.n + 1)
        return 2.0 - 2.0 * np.cos(2.0 * np.pi * j / self.p)


@dataclass(frozen=True)
class RotatedLattice:
    """Lattice with an ``n x n`` generator matrix (rows are basis vectors).

    ``field`` is ``None`` for the unrotated Z^n baseline, whose minimum
    product distance is zero.
    """

    field: "NumberField | None"
    generator: np.ndarray = field(repr=False, compare=False)
    dpmin: float

    @property
    def n(self):
        return self.generator.shape[0]

    @property
    def p(self):
        return None if self.field is None else self.field.p

    def points(self, b):
        """Map integer row vector(s) ``b`` to lattice coordinates ``b @ G``."""
        return np.asarray(b, dtype=float) @ self.generator

    def unrotate(self, x):
        """Inverse of :meth:`points` (``G`` is orthogonal)."""
        return np.asarray(x, dtype=float) @ self.generator.T

    def orthogonality_residual(self):
        g = self.generator
        return float(np.max(np.abs(g @ g.T - np.eye(self.n))))


def build_field(p):
    """Return the degree ``(p-1)/2`` totally real subfield of Q(zeta_p).

    Raises
    ------
    TooSmallError
        If ``p < 5``.
    NonPrimeError
        If ``p`` is not prime.
    UnsupportedPrimeError
        If ``p`` exceeds :data:`MAX_PRIME`.
    """
    if isinstance(p, bool) or int(p) != p:
        raise NonPrimeError(f"p must be an integer, got {p!r}")
    p = int(p)
    if not is_prime(p):
        raise NonPrimeError(f"p={p} is not prime")
    if p < 5:
        raise TooSmallError(f"p={p} is too small; need a prime p >= 5")
    if p > MAX_PRIME:
        raise UnsupportedPrimeError(f"p={p} exceeds the supported maximum {MAX_PRIME}")
    n = (p - 1) // 2
    idx = np.arange(1, n + 1)
    emb = 2.0 * np.cos(2.0 * np.pi * np.outer(idx, idx) / p)
    emb.setflags(write=False)
    return NumberField(p=p, n=n, embeddings=emb)


def lattice_dpmin(field):
    """Minimum product distance ``p^(-(n-1)/2)`` of the ideal lattice."""
    return float(field.p) ** (-(field.n - 1) / 2.0)


def generator_matrix(field):
    """Generator ``G = p^(-1/2) T M diag(sqrt(sigma_j(twist)))``.

    ``T`` is the all-ones upper triangular matrix, so row ``i`` of ``G`` is
    the embedding of ``sum_{k >= i} (zeta^k + zeta^-k)`` scaled by the twist.
    """
    n = field.n
    T = np.triu(np.ones((n, n)))
    D = np.diag(np.sqrt(field.twist_embeddings()))
    G = (T @ field.embeddings @ D) / math.sqrt(field.p)
    G.setflags(write=False)
    return RotatedLattice(field=field, generator=G, dpmin=lattice_dpmin(field))


def build_lattice(p):
    """Shorthand for ``generator_matrix(build_field(p))``."""
    return generator_matrix(build_field(p))


def identity_lattice(n):
    """Unrotated Z^n, used for the conventional (square QAM) baseline."""
    G = np.eye(n)
    G.setflags(write=False)
    return RotatedLattice(field=None, generator=G, dpmin=0.0)


def witness_point(lattice):
    """Lattice point of ``b = [0, ..., 0, 1]``: unit norm and minimal product."""
    b = np.zeros(lattice.n)
    b[-1] = 1.0
    return lattice.points(b)


def shell_dpmin(lattice, radius):
    """Brute-force minimum ``prod |lambda_i|`` over nonzero ``b`` in ``{-r..r}^n``.

    Enumerates half the shell (``b`` and ``-b`` give the same product).
    Returns ``(value, b_argmin)``.
    """
    n = lattice.n
    r = np.arange(-radius, radius + 1)
    grids = np.meshgrid(*([r] * n), indexing="ij")
    b = np.stack([g.ravel() for g in grids], axis=1)
    # keep vectors whose first nonzero entry is positive
    nz = b != 0
    first = np.argmax(nz, axis=1)
    keep = nz.any(axis=1) & (b[np.arange(len(b)), first] > 0)
    b = b[keep]
    prods = np.abs(b @ lattice.generator).prod(axis=1)
    k = int(np.argmin(prods))
    return float(prods[k]), b[k].copy()
