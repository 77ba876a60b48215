"""Per-user coset-leader constellations and two-user superposition schemes."""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import AlphaOutOfRangeError, SizeCapError, ConfigInvalidError

__all__ = [
    "MAX_BITS",
    "UserConstellation",
    "CompositeScheme",
    "coset_leaders",
    "superimpose",
    "lattice_partition_scheme",
    "eta_general",
    "eta_lattice_partition",
    "alpha_lattice_partition",
    "composite_1d",
    "leaders_power",
]

# desk-scale cap on n*m (bits per constellation)
MAX_BITS = 16


def leaders_power(n, m):
    """Average power ``(n/12)(2^(2m) - 1)`` of dithered Z^n / 2^m Z^n leaders."""
    return n / 12.0 * (4.0 ** m - 1.0)


def eta_general(m1, m2, alpha):
    """Normalisation that gives the superimposed constellation power ``n``."""
    return math.sqrt(12.0 / ((4.0 ** m1 - 4.0 ** m2) * alpha + 4.0 ** m2 - 1.0))


def eta_lattice_partition(m1, m2):
    return math.sqrt(12.0 / (4.0 ** (m1 + m2) - 1.0))


def alpha_lattice_partition(m1):
    """Power fraction of user 1 at which superposition becomes a lattice partition."""
    return 1.0 / (1.0 + 4.0 ** m1)


def _check_alpha(alpha):
    if not (0.0 <= alpha <= 1.0) or math.isnan(alpha):
        raise AlphaOutOfRangeError(f"alpha={alpha} outside [0, 1]")


def _check_bits(bits, max_bits):
    if bits > max_bits:
        raise SizeCapError(
            f"constellation needs 2^{bits} points; cap is 2^{max_bits}"
        )


@dataclass(frozen=True)
class UserConstellation:
    """Coset leaders of ``Lambda / 2^m Lambda`` for one user.

    ``integers[k]`` is the vector ``b`` of label ``k`` (mixed radix, first
    coordinate most significant), ``points = integers @ G`` and ``dither``
    is the mean of ``points``.
    """

    lattice: object
    m: int
    integers: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    dither: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.lattice.n

    @property
    def size(self):
        return len(self.points)

    @property
    def dithered(self):
        return self.points - self.dither

    def label_of(self, b):
        """Mixed-radix label of integer vector ``b``."""
        label = 0
        for digit in b:
            label = label * (2 ** self.m) + int(digit)
        return label


@dataclass(frozen=True)
class CompositeScheme:
    """Normalised superimposed constellation for two users.

    ``points[k]`` carries user labels ``labels[k] = (label1, label2)``;
    the composite index is ``label1 * |C2| + label2``.  ``eta`` is the
    normalisation applied to ``sqrt(a) (C1 - d1) + sqrt(1 - a) (C2 - d2)``
    (general mode) or to ``C1 + 2^m1 C2 - d'`` (lattice_partition mode).
    ``user1_points`` / ``user2_points`` are each user's scaled contribution
    so that ``points[k] = user1_points[l1] + user2_points[l2]``.
    """

    user1: UserConstellation
    user2: UserConstellation
    alpha: float
    eta: float
    mode: str
    points: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    user1_points: np.ndarray = field(repr=False)
    user2_points: np.ndarray = field(repr=False)

    @property
    def lattice(self):
        return self.user1.lattice

    @property
    def n(self):
        return self.user1.n

    @property
    def m1(self):
        return self.user1.m

    @property
    def m2(self):
        return self.user2.m

    @property
    def size(self):
        return len(self.points)

    @property
    def user_sizes(self):
        return self.user1.size, self.user2.size

    def scale_1d(self):
        """Coefficients ``(s1, s2)`` with composite = ``(s1 (X1-d1*) + s2 (X2-d2*)) G``."""
        if self.mode == "lattice_partition":
            return self.eta, self.eta * 2 ** self.m1
        return self.eta * math.sqrt(self.alpha), self.eta * math.sqrt(1.0 - self.alpha)

    def descriptor(self):
        lat = self.lattice
        return {
            "mode": self.mode,
            "p": lat.p,
            "n": self.n,
            "rotated": lat.field is not None,
            "m1": self.m1,
            "m2": self.m2,
            "alpha": self.alpha,
            "eta": self.eta,
        }


def coset_leaders(lattice, m, max_bits=MAX_BITS):
    """Complete set of coset leaders ``{b G : b in {0..2^m-1}^n}``."""
    if int(m) != m or m < 1:
        raise ConfigInvalidError(f"m must be a positive integer, got {m!r}", field="m")
    m = int(m)
    n = lattice.n
    _check_bits(n * m, max_bits)
    digits = range(2 ** m)
    ints = np.array(list(itertools.product(digits, repeat=n)), dtype=float)
    pts = lattice.points(ints)
    dither = pts.mean(axis=0)
    for a in (ints, pts, dither):
        a.setflags(write=False)
    return UserConstellation(lattice=lattice, m=m, integers=ints, points=pts, dither=dither)


def _combine(c1, c2, s1, s2, alpha, eta, mode):
    u1 = s1 * c1.dithered
    u2 = s2 * c2.dithered
    pts = (u1[:, None, :] + u2[None, :, :]).reshape(-1, c1.n)
    l1, l2 = np.meshgrid(np.arange(c1.size), np.arange(c2.size), indexing="ij")
    labels = np.stack([l1.ravel(), l2.ravel()], axis=1)
    for a in (pts, labels, u1, u2):
        a.setflags(write=False)
    return CompositeScheme(
        user1=c1, user2=c2, alpha=float(alpha), eta=float(eta), mode=mode,
        points=pts, labels=labels, user1_points=u1, user2_points=u2,
    )


def superimpose(c1, c2, alpha, max_bits=MAX_BITS):
    """General superposition ``eta (sqrt(a)(C1 - d1) + sqrt(1-a)(C2 - d2))``.

    Coincident composite points are kept as separate labelled entries.
    """
    _check_alpha(alpha)
    if c1.lattice is not c2.lattice and not np.array_equal(
        c1.lattice.generator, c2.lattice.generator
    ):
        raise ConfigInvalidError("both users must share the same lattice", field="lattice")
    _check_bits(c1.n * (c1.m + c2.m), max_bits)
    eta = eta_general(c1.m, c2.m, alpha)
    return _combine(
        c1, c2, eta * math.sqrt(alpha), eta * math.sqrt(1.0 - alpha), alpha, eta, "general"
    )


def lattice_partition_scheme(lattice, m1, m2, max_bits=MAX_BITS):
    """Scheme ``eta' (C1 + 2^m1 C2 - d')``, the leaders of ``Lambda / 2^(m1+m2) Lambda``."""
    _check_bits(lattice.n * (m1 + m2), max_bits)
    c1 = coset_leaders(lattice, m1, max_bits)
    c2 = coset_leaders(lattice, m2, max_bits)
    eta = eta_lattice_partition(m1, m2)
    return _combine(c1, c2, eta, eta * 2 ** m1, alpha_lattice_partition(m1), eta,
                    "lattice_partition")


def composite_1d(m1, m2, alpha):
    """One-dimensional composite ``eta (sqrt(a)(X1 - d1*) + sqrt(1-a)(X2 - d2*))``.

    Returned in label order (index ``l1 * 2^m2 + l2``), unsorted; coincident
    values are kept.
    """
    _check_alpha(alpha)
    eta = eta_general(m1, m2, alpha)
    x1 = np.arange(2 ** m1) - (2 ** m1 - 1) / 2.0
    x2 = np.arange(2 ** m2) - (2 ** m2 - 1) / 2.0
    return eta * (math.sqrt(alpha) * x1[:, None] + math.sqrt(1.0 - alpha) * x2[None, :]).ravel()
