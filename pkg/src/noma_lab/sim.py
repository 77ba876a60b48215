"""Monte Carlo symbol error rates over block Rayleigh fading.

SISO: each real coordinate of an ``n``-dimensional composite point sees an
independent real Rayleigh fade, ``y[l] = sqrt(P) h[l] x[l] + z[l]`` with
``z ~ N(0, 1)``.  MIMO: two composite points (``n = 2``, one complex symbol
each) are sent with the 2x2 Alamouti code over a complex Rayleigh channel.

The average SNR of a user is ``E[||h||^2] P`` (``E[tr(H H^H)] P`` for MIMO),
so ``P = SNR / n`` in SISO and ``P = SNR / (mt mr)`` in MIMO.  User 2's
fades are scaled down so that its average SNR sits ``snr_gap_db`` below
user 1's.

Randomness is drawn from Philox generators keyed by ``(seed, snr index,
chunk index)`` with a fixed chunk size, so results do not depend on the
number of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
import math
import os

import numpy as np

from .errors import ConfigInvalidError, InsufficientDataError

__all__ = [
    "CHUNK",
    "DECODERS",
    "ChannelConfig",
    "SerPoint",
    "SerCurve",
    "make_rng",
    "sample_fading",
    "detect_joint",
    "detect_single_user",
    "detect_sic",
    "alamouti_encode",
    "alamouti_combine",
    "alamouti_roundtrip",
    "simulate_ser",
    "diversity_slope",
    "estimate_diversity",
    "default_threads",
]

CHUNK = 20_000
DECODERS = ("single", "sic", "genie")
RNG_NAME = "numpy Philox4x64-10, SeedSequence([seed, snr_index, chunk_index])"
MIN_TRIALS = 10_000


def default_threads():
    env = os.environ.get("NOMA_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigInvalidError(f"NOMA_LAB_THREADS={env!r} is not an integer",
                                     field="NOMA_LAB_THREADS")
    return 1


@dataclass
class ChannelConfig:
    """Fading channel and SNR sweep.

    ``snr_db`` lists user 1's average SNR points (strictly increasing);
    user 2 sits ``snr_gap_db`` lower.
    """

    kind: str = "siso_rayleigh"
    snr_db: list = field(default_factory=list)
    snr_gap_db: float = 0.0
    mt: int = 2
    mr: int = 2

    def __post_init__(self):
        if self.kind not in ("siso_rayleigh", "mimo_rayleigh"):
            raise ConfigInvalidError(f"unknown channel kind {self.kind!r}", field="kind")
        snr = [float(s) for s in self.snr_db]
        if not snr:
            raise ConfigInvalidError("empty SNR list", field="snr_db")
        if any(b <= a for a, b in zip(snr, snr[1:])):
            raise ConfigInvalidError("SNR points must be strictly increasing", field="snr_db")
        self.snr_db = snr
        if self.snr_gap_db < 0:
            raise ConfigInvalidError("snr_gap_db must be >= 0 (user 1 is the strong user)",
                                     field="snr_gap_db")
        if self.kind == "mimo_rayleigh" and (self.mt, self.mr) != (2, 2):
            raise ConfigInvalidError("only 2x2 Alamouti is supported", field="mt")

    @property
    def user2_gain(self):
        return 10.0 ** (-self.snr_gap_db / 20.0)


@dataclass(frozen=True)
class SerPoint:
    snr_db: float
    user_snr_db: float
    trials: int
    errors: int

    @property
    def ser(self):
        return self.errors / self.trials if self.trials else float("nan")


@dataclass
class SerCurve:
    """Per-user SER points of one run.

    ``points[k]`` lists user ``k``'s :class:`SerPoint` in sweep order; the
    sweep axis ``snr_db`` is user 1's average SNR and ``user_snr_db`` is the
    user's own.  ``trials`` count symbols (two per Alamouti block).
    """

    points: dict
    decoder: str
    seed: int
    scheme: dict
    channel: dict
    rng: str = RNG_NAME
    chunk: int = CHUNK

    @property
    def snr_db(self):
        return np.array([pt.snr_db for pt in self.points[1]])

    def ser(self, user):
        return np.array([pt.ser for pt in self.points[user]])

    def average_ser(self):
        return 0.5 * (self.ser(1) + self.ser(2))

    def worst_ser(self):
        return np.maximum(self.ser(1), self.ser(2))

    def rows(self):
        for user in (1, 2):
            for pt in self.points[user]:
                yield user, pt.snr_db, pt.trials, pt.errors, pt.ser

    def metadata(self):
        return {
            "seed": self.seed,
            "decoder": self.decoder,
            "scheme": self.scheme,
            "channel": self.channel,
            "rng": self.rng,
            "chunk": self.chunk,
        }


def make_rng(seed, snr_index, chunk_index):
    ss = np.random.SeedSequence([int(seed), int(snr_index), int(chunk_index)])
    return np.random.Generator(np.random.Philox(ss))


def sample_fading(kind, count, rng, n=2, mt=2, mr=2, gain=1.0):
    """Draw ``count`` fading realisations.

    SISO: ``(count, n)`` real Rayleigh amplitudes with ``E[h^2] = gain^2``.
    MIMO: ``(count, mr, mt)`` circularly symmetric complex Gaussian entries
    with ``E|h|^2 = gain^2``.
    """
    if kind == "siso_rayleigh":
        return gain * rng.rayleigh(scale=1.0 / math.sqrt(2.0), size=(count, n))
    if kind == "mimo_rayleigh":
        g = rng.standard_normal((count, mr, mt, 2)) * (gain / math.sqrt(2.0))
        return g[..., 0] + 1j * g[..., 1]
    raise ConfigInvalidError(f"unknown channel kind {kind!r}", field="kind")


def detect_joint(y, h, candidates):
    """Nearest scaled candidate: ``argmin_c sum_l |y[l] - h[l] c[l]|^2``.

    ``y`` and ``h`` are ``(K, n)`` (real or complex) with ``h`` the
    effective gain including ``sqrt(P)``; ``candidates`` is ``(N, n)``.
    Ties (to a relative 1e-12 of the metric scale) go to the lowest
    candidate index.
    """
    y = np.atleast_2d(y)
    h = np.atleast_2d(h)
    c = np.asarray(candidates)
    if np.iscomplexobj(y) or np.iscomplexobj(h) or np.iscomplexobj(c):
        # |y - h c|^2 - |y|^2 = |h|^2 |c|^2 - 2 Re(conj(y) h c)
        w = np.conj(y) * h
        metric = (np.abs(h) ** 2) @ (np.abs(c) ** 2).T - 2.0 * (
            w.real @ c.real.T - w.imag @ c.imag.T
        )
    else:
        metric = (h * h) @ (c * c).T - 2.0 * ((y * h) @ c.T)
    # the expanded metric rounds differently for equidistant candidates, so
    # anything within a few ulps of the row scale counts as a tie
    scale = (np.abs(y) ** 2).sum(axis=1) + (np.abs(h) ** 2).sum(axis=1) * float(
        (np.abs(c) ** 2).max())
    best = metric.min(axis=1)
    return np.argmax(metric <= (best + 1e-12 * scale)[:, None], axis=1)


def detect_single_user(y, h, scheme, user):
    """Joint nearest composite point, projected onto ``user``'s label."""
    idx = detect_joint(y, h, scheme.points)
    return scheme.labels[idx, user - 1]


def detect_sic(y, h, scheme, genie=False, true_label2=None):
    """User-1 receiver with successive interference cancellation.

    ``genie=True`` subtracts the true user-2 component (``true_label2``
    required); otherwise user 2's label is first detected with the
    single-user rule.  Returns ``(label1, label2)`` arrays.
    """
    y = np.atleast_2d(y)
    h = np.atleast_2d(h)
    u1, u2 = scheme.user1_points, scheme.user2_points
    if genie:
        if true_label2 is None:
            raise ConfigInvalidError("genie SIC needs the true user-2 labels", field="true_label2")
        l2 = np.broadcast_to(np.asarray(true_label2), (len(y),))
    else:
        l2 = detect_single_user(y, h, scheme, 2)
    residual = y - h * u2[l2]
    l1 = detect_joint(residual, h, u1)
    return l1, np.asarray(l2)


class _ComplexView:
    """An ``n = 2`` scheme with its points mapped to scaled complex symbols."""

    def __init__(self, scheme, scale):
        to_c = lambda a: scale * (a[:, :1] + 1j * a[:, 1:2])
        self.labels = scheme.labels
        self.user_sizes = scheme.user_sizes
        self.points = to_c(scheme.points)
        self.user1_points = to_c(scheme.user1_points)
        self.user2_points = to_c(scheme.user2_points)


def alamouti_encode(x1, x2):
    """Codeword(s) ``[[x1, -x2*], [x2, x1*]]`` (rows: antennas, columns: slots)."""
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    X = np.empty(x1.shape + (2, 2), dtype=complex)
    X[..., 0, 0] = x1
    X[..., 0, 1] = -np.conj(x2)
    X[..., 1, 0] = x2
    X[..., 1, 1] = np.conj(x1)
    return X


def alamouti_combine(Y, H):
    """Linear combining of received blocks ``Y = H X + Z``.

    Returns ``(x1_tilde, x2_tilde, g)`` with ``x_tilde = g x + noise`` and
    ``g = ||H||_F^2``.
    """
    y1 = Y[..., :, 0]
    y2 = Y[..., :, 1]
    h1 = H[..., :, 0]
    h2 = H[..., :, 1]
    x1 = (np.conj(h1) * y1 + h2 * np.conj(y2)).sum(axis=-1)
    x2 = (np.conj(h2) * y1 - h1 * np.conj(y2)).sum(axis=-1)
    g = (np.abs(H) ** 2).sum(axis=(-2, -1))
    return x1, x2, g


def alamouti_roundtrip(symbols, H, noise, candidates, power=1.0):
    """Encode two symbols, pass ``sqrt(power) H X + noise``, combine and detect.

    ``candidates`` is the complex alphabet; returns the detected symbols.
    """
    x1, x2 = symbols
    X = alamouti_encode(x1, x2)
    Y = math.sqrt(power) * (np.asarray(H) @ X) + np.asarray(noise)
    t1, t2, g = alamouti_combine(Y, np.asarray(H))
    cand = np.asarray(candidates).reshape(-1, 1)
    gain = np.atleast_1d(math.sqrt(power) * g)[:, None]
    k1 = detect_joint(np.atleast_1d(t1)[:, None], gain, cand)
    k2 = detect_joint(np.atleast_1d(t2)[:, None], gain, cand)
    return cand[k1, 0], cand[k2, 0]


def _detect_user1(y, h, scheme, decoder, l2_true):
    if decoder == "single":
        return detect_single_user(y, h, scheme, 1)
    return detect_sic(y, h, scheme, genie=(decoder == "genie"), true_label2=l2_true)[0]


def _siso_chunk(scheme, cfg, decoder, snr_db, count, rng):
    n = scheme.n
    M1, M2 = scheme.user_sizes
    l1 = rng.integers(0, M1, size=count)
    l2 = rng.integers(0, M2, size=count)
    x = scheme.points[l1 * M2 + l2]
    P = 10.0 ** (snr_db / 10.0) / n
    sp = math.sqrt(P)
    errs = []
    for user, gain in ((1, 1.0), (2, cfg.user2_gain)):
        h = sample_fading(cfg.kind, count, rng, n=n, gain=gain)
        y = sp * h * x + rng.standard_normal((count, n))
        if user == 1:
            det = _detect_user1(y, sp * h, scheme, decoder, l2)
            errs.append(int(np.count_nonzero(det != l1)))
        else:
            det = detect_single_user(y, sp * h, scheme, 2)
            errs.append(int(np.count_nonzero(det != l2)))
    return count, errs[0], errs[1]


def _mimo_chunk(view, scheme, cfg, decoder, snr_db, count, rng):
    M1, M2 = scheme.user_sizes
    l1 = rng.integers(0, M1, size=(count, 2))
    l2 = rng.integers(0, M2, size=(count, 2))
    s = view.points[l1 * M2 + l2, 0]
    X = alamouti_encode(s[:, 0], s[:, 1])
    P = 10.0 ** (snr_db / 10.0) / (cfg.mt * cfg.mr)
    sp = math.sqrt(P)
    errs = []
    for user, gain in ((1, 1.0), (2, cfg.user2_gain)):
        H = sample_fading(cfg.kind, count, rng, mt=cfg.mt, mr=cfg.mr, gain=gain)
        Zr = rng.standard_normal((count, cfg.mr, 2, 2)) / math.sqrt(2.0)
        Y = sp * (H @ X) + (Zr[..., 0] + 1j * Zr[..., 1])
        t1, t2, g = alamouti_combine(Y, H)
        y = np.concatenate([t1, t2])[:, None]
        gain_eff = np.concatenate([sp * g, sp * g])[:, None]
        true1 = np.concatenate([l1[:, 0], l1[:, 1]])
        true2 = np.concatenate([l2[:, 0], l2[:, 1]])
        if user == 1:
            det = _detect_user1(y, gain_eff, view, decoder, true2)
            errs.append(int(np.count_nonzero(det != true1)))
        else:
            det = detect_single_user(y, gain_eff, view, 2)
            errs.append(int(np.count_nonzero(det != true2)))
    return 2 * count, errs[0], errs[1]


def _trial_schedule(trials, count):
    if np.ndim(trials) == 0:
        trials = [trials] * count
    trials = list(trials)
    if len(trials) != count:
        raise ConfigInvalidError(f"{len(trials)} trial counts for {count} SNR points",
                                 field="trials")
    for t in trials:
        if isinstance(t, bool) or int(t) != t or t < MIN_TRIALS:
            raise ConfigInvalidError(f"trials must be integers >= {MIN_TRIALS}", field="trials")
    return [int(t) for t in trials]


def simulate_ser(scheme, channel, decoder="single", trials=100_000, seed=0,
                 threads=None, target_errors=None, tau=1.0, unit_complex_power=True):
    """Monte Carlo SER of both users at every SNR point of ``channel``.

    ``trials`` is the number of transmissions per SNR point (an int, or one
    int per SNR point): composite symbols in SISO, Alamouti blocks (two
    symbols each) in MIMO.  User 1
    uses ``decoder`` (``single``, ``sic`` or ``genie``); user 2 always
    decodes alone.  ``target_errors`` enables early stopping once both
    users reach that many errors (checked at chunk boundaries, in chunk
    order).
    """
    if decoder not in DECODERS:
        raise ConfigInvalidError(f"unknown decoder {decoder!r}", field="decoder")
    schedule = _trial_schedule(trials, len(channel.snr_db))
    threads = default_threads() if threads is None else max(1, int(threads))
    if channel.kind == "mimo_rayleigh":
        if scheme.n != 2:
            raise ConfigInvalidError("Alamouti mapping needs an n=2 scheme", field="n")
        scale = tau / math.sqrt(2.0) if unit_complex_power else tau
        view = _ComplexView(scheme, scale)
        run = lambda snr, cnt, rng: _mimo_chunk(view, scheme, channel, decoder, snr, cnt, rng)
    else:
        run = lambda snr, cnt, rng: _siso_chunk(scheme, channel, decoder, snr, cnt, rng)

    points = {1: [], 2: []}
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for si, snr in enumerate(channel.snr_db):
            n_chunks = -(-schedule[si] // CHUNK)
            sizes = [min(CHUNK, schedule[si] - k * CHUNK) for k in range(n_chunks)]
            job = lambda k: run(snr, sizes[k], make_rng(seed, si, k))
            tot = e1 = e2 = 0
            k = 0
            while k < n_chunks:
                wave = range(k, min(n_chunks, k + threads))
                results = list(pool.map(job, wave)) if pool else [job(j) for j in wave]
                stop = False
                for res in results:
                    tot += res[0]
                    e1 += res[1]
                    e2 += res[2]
                    k += 1
                    if target_errors is not None and min(e1, e2) >= target_errors:
                        stop = True
                        break
                if stop:
                    break
            points[1].append(SerPoint(snr, snr, tot, e1))
            points[2].append(SerPoint(snr, snr - channel.snr_gap_db, tot, e2))
    finally:
        if pool:
            pool.shutdown()
    desc = scheme.descriptor() if hasattr(scheme, "descriptor") else {}
    if channel.kind == "mimo_rayleigh":
        desc = dict(desc, tau=tau, unit_complex_power=unit_complex_power)
    return SerCurve(points=points, decoder=decoder, seed=int(seed), scheme=desc,
                    channel=asdict(channel))


def diversity_slope(snr_db, ser):
    """Least-squares slope of ``log10(ser)`` against ``-snr_db / 10``."""
    snr_db = np.asarray(snr_db, dtype=float)
    ser = np.asarray(ser, dtype=float)
    if len(snr_db) < 3:
        raise InsufficientDataError(f"need at least 3 points, got {len(snr_db)}")
    if np.any(ser <= 0) or np.any(~np.isfinite(ser)):
        raise InsufficientDataError("all SER values in the window must be positive")
    slope, _ = np.polyfit(-snr_db / 10.0, np.log10(ser), 1)
    return float(slope)


def estimate_diversity(curve, snr_window_db, user=1):
    """Diversity order of ``user`` from the points inside ``snr_window_db``."""
    lo, hi = snr_window_db
    snr = np.array([pt.user_snr_db for pt in curve.points[user]])
    ser = curve.ser(user)
    sel = (snr >= lo - 1e-9) & (snr <= hi + 1e-9)
    return diversity_slope(snr[sel], ser[sel])
