"""Command-line front end.

Every subcommand reads its parameters from flags and, optionally, from the
section of an INI file named after the subcommand (``--config``).  Flags
win over the file; unknown keys are rejected.  Exit status is 0 on
success, 2 for an invalid request (the message names the field) and 1 when
a computed postcondition fails.
"""

import argparse
import configparser
import csv
import hashlib
import io
import json
import subprocess
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import MAX_PAIR_POINTS, BAND_VARIANTS, min_determinant
from .constellation import (
    MAX_BITS,
    alpha_lattice_partition,
    coset_leaders,
    lattice_partition_scheme,
    superimpose,
)
from .errors import (
    AlphaOutOfRangeError,
    ConfigInvalidError,
    NomaLabError,
    SizeCapError,
    UnknownFigureError,
)
from .lattice import build_lattice, identity_lattice
from .plot import write_svg
from .reproduce import FIGURES, FIG89_TRIALS, alpha_grid, dpmin_sweep, reproduce
from .sim import DECODERS, ChannelConfig, default_threads, simulate_ser

EXIT_OK, EXIT_POSTCONDITION, EXIT_CONFIG = 0, 1, 2


# ---------------------------------------------------------------------------
# value parsers shared by flags and config files

def _floats(text):
    """``"25,30,35"`` or inclusive ``"25:40:5"``."""
    text = str(text).strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"range must be start:stop:step with step > 0, got {text!r}")
        lo, hi, step = parts
        out, k = [], 0
        while lo + k * step <= hi + 1e-9 * step:
            out.append(round(lo + k * step, 12))
            k += 1
        return out
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    vals = []
    for x in str(text).split(","):
        x = x.strip()
        if not x:
            continue
        f = float(x)
        if f != int(f):
            raise ValueError(f"{x!r} is not an integer")
        vals.append(int(f))
    return vals


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _alpha(text):
    t = str(text).strip().lower()
    return "lp" if t in ("lp", "lattice_partition", "lattice-partition") else float(t)


@dataclass(frozen=True)
class Opt:
    name: str
    kind: object = str
    default: object = None
    help: str = ""
    choices: tuple = None
    required: bool = False

    @property
    def flag(self):
        return "--" + self.name.replace("_", "-")


COMMON = [
    Opt("threads", int, None, "worker threads (falls back to NOMA_LAB_THREADS, then 1)"),
]

SCHEME = [
    Opt("p", int, 5, "cyclotomic prime p >= 5"),
    Opt("identity_n", int, None, "use the unrotated Z^n lattice of this dimension instead of p"),
    Opt("m1", int, 1, "bits per real dimension of user 1"),
    Opt("m2", int, 1, "bits per real dimension of user 2"),
    Opt("alpha", _alpha, "lp", "user-1 power fraction, or 'lp' for the lattice-partition scheme"),
    Opt("max_bits", int, MAX_BITS, "size cap: n*(m1+m2) may not exceed this"),
]

OPTIONS = {
    "lattice": [
        Opt("p", int, None, "cyclotomic prime p >= 5", required=True),
        Opt("out", str, None, "CSV path for the generator rows"),
    ],
    "constellation": SCHEME + [
        Opt("out", str, None, "CSV path (stdout when omitted)"),
        Opt("svg", str, None, "SVG of coordinates 1 and 2, one trace per user-2 label"),
    ],
    "dpmin-sweep": [
        Opt("p", int, 5, "cyclotomic prime p >= 5"),
        Opt("m1", int, 1, "bits per real dimension of user 1"),
        Opt("m2", int, 1, "bits per real dimension of user 2"),
        Opt("grid", int, 512, "number of equispaced alphas on [0, 1]"),
        Opt("alphas", _floats, None, "explicit alpha list (overrides --grid)"),
        Opt("include_lp", _bool, True, "insert the lattice-partition alpha into the grid"),
        Opt("band", str, "printed", "bound band-edge variant", choices=BAND_VARIANTS),
        Opt("method", str, "auto", "exact search method", choices=("auto", "pairs", "grid")),
        Opt("out", str, None, "CSV path (stdout when omitted)"),
        Opt("svg", str, None, "SVG plot path"),
    ],
    "mindet-sweep": [
        Opt("p", int, 5, "cyclotomic prime (must give n = 2)"),
        Opt("m1", int, 2, "bits per real dimension of user 1"),
        Opt("m2", int, 1, "bits per real dimension of user 2"),
        Opt("grid", int, 101, "number of equispaced alphas on [0, 1]"),
        Opt("alphas", _floats, None, "explicit alpha list (overrides --grid)"),
        Opt("tau", float, 1.0, "power scaling of the complex symbols"),
        Opt("unit_complex_power", _bool, True, "normalise to unit power per complex symbol"),
        Opt("out", str, None, "CSV path (stdout when omitted)"),
        Opt("svg", str, None, "SVG plot path"),
    ],
    "ser-sim": SCHEME + [
        Opt("channel", str, "siso_rayleigh", "fading model",
            choices=("siso_rayleigh", "mimo_rayleigh")),
        Opt("snr", _floats, None, "user-1 SNR points in dB, e.g. 0:40:5", required=True),
        Opt("snr_gap", float, 0.0, "user-2 SNR deficit in dB"),
        Opt("trials", _ints, None, "trials per SNR point (one value or one per point)",
            required=True),
        Opt("seed", int, None, "RNG seed", required=True),
        Opt("decoder", str, "single", "user-1 receiver", choices=DECODERS),
        Opt("target_errors", int, None, "stop a point early once both users reach this"),
        Opt("tau", float, 1.0, "Alamouti power scaling"),
        Opt("unit_complex_power", _bool, True, "unit power per complex Alamouti symbol"),
        Opt("out", str, None, "CSV path (stdout when omitted; sidecar needs a path)"),
        Opt("svg", str, None, "SVG plot path"),
    ],
    "reproduce": [
        Opt("seed", int, 2019, "RNG seed for the Monte Carlo recipes"),
        Opt("blocks", int, 10 ** 6, "Alamouti blocks per scheme and decoder (fig12-13)"),
        Opt("trials_scale", float, 1.0, "multiplier on the fig8-9 trial schedule"),
        Opt("grid", int, 512, "alpha grid size (fig7)"),
        Opt("band", str, "printed", "bound band-edge variant (fig7)", choices=BAND_VARIANTS),
        Opt("out", str, None, "CSV path for the raw rows"),
        Opt("svg", str, None, "SVG plot path"),
    ],
}


# ---------------------------------------------------------------------------
# parser construction and config merging

def _argtype(opt):
    def conv(text):
        try:
            return opt.kind(text)
        except (TypeError, ValueError) as exc:
            raise argparse.ArgumentTypeError(f"{opt.name}: {exc}")
    conv.__name__ = opt.name
    return conv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigInvalidError(message, field="argv")


def build_parser():
    parser = _Parser(prog="noma-lab", description="Rotated-lattice NOMA constellations: "
                     "construction, distance analysis and SER simulation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    helps = {
        "lattice": "print the rotation matrix of a cyclotomic prime",
        "constellation": "dump a composite constellation as CSV",
        "dpmin-sweep": "exact and bounded minimum product distance over alpha",
        "mindet-sweep": "Alamouti minimum determinant over alpha",
        "ser-sim": "Monte Carlo symbol error rate",
        "reproduce": "run a scaled-down reproduction recipe",
    }
    for name, opts in OPTIONS.items():
        sp = sub.add_parser(name, help=helps[name], description=helps[name])
        if name == "constellation":
            sp.add_argument("action", choices=("dump",))
        if name == "reproduce":
            sp.add_argument("figure", help=f"one of {', '.join(FIGURES)}")
        sp.add_argument("--config", help="INI file; the section named after the subcommand is read")
        for opt in COMMON + opts:
            kw = dict(dest=opt.name, default=None, help=opt.help, type=_argtype(opt))
            if opt.choices:
                kw["choices"] = opt.choices
            sp.add_argument(opt.flag, **kw)
    return parser


def _load_config(path, command):
    cp = configparser.ConfigParser(default_section="__none__", interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigInvalidError(f"cannot read config {path!r}: {exc}", field="config")
    except configparser.Error as exc:
        raise ConfigInvalidError(f"malformed config {path!r}: {exc}", field="config")
    for sec in cp.sections():
        if sec not in OPTIONS:
            raise ConfigInvalidError(f"unknown config section [{sec}]", field=sec)
    if not cp.has_section(command):
        return {}
    return dict(cp.items(command))


def resolve(args):
    """Merge flags over the config section over defaults; validate every field."""
    command = args.command
    opts = {o.name: o for o in COMMON + OPTIONS[command]}
    raw = _load_config(args.config, command) if args.config else {}
    cfg = {}
    for key, text in raw.items():
        name = key.strip().replace("-", "_")
        if name not in opts:
            raise ConfigInvalidError(f"unknown key {key!r} in section [{command}]", field=key)
        opt = opts[name]
        try:
            val = opt.kind(text)
        except (TypeError, ValueError) as exc:
            raise ConfigInvalidError(f"{name}: {exc}", field=name)
        if opt.choices and val not in opt.choices:
            raise ConfigInvalidError(f"{name}={val!r} not in {opt.choices}", field=name)
        cfg[name] = val
    out = {}
    for name, opt in opts.items():
        val = getattr(args, name)
        if val is None:
            val = cfg.get(name, opt.default)
        if val is None and opt.required:
            raise ConfigInvalidError(f"missing required field {name!r}", field=name)
        out[name] = val
    if out["threads"] is None:
        out["threads"] = default_threads()
    elif out["threads"] < 1:
        raise ConfigInvalidError("threads must be >= 1", field="threads")
    return out


def _config_digest(cfg):
    text = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()


def _git_describe():
    try:
        res = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             capture_output=True, text=True, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return None
    return res.stdout.strip() or None if res.returncode == 0 else None


# ---------------------------------------------------------------------------
# scheme construction with field-aware errors

def _lattice(cfg):
    try:
        if cfg.get("identity_n") is not None:
            return identity_lattice(cfg["identity_n"])
        return build_lattice(cfg["p"])
    except NomaLabError as exc:
        raise ConfigInvalidError(str(exc), field="identity_n" if cfg.get("identity_n") else "p")


def _scheme(cfg):
    lat = _lattice(cfg)
    for k in ("m1", "m2"):
        if cfg[k] < 1:
            raise ConfigInvalidError(f"{k} must be >= 1", field=k)
    try:
        if cfg["alpha"] == "lp":
            return lattice_partition_scheme(lat, cfg["m1"], cfg["m2"], cfg["max_bits"])
        c1 = coset_leaders(lat, cfg["m1"], cfg["max_bits"])
        c2 = coset_leaders(lat, cfg["m2"], cfg["max_bits"])
        return superimpose(c1, c2, cfg["alpha"], cfg["max_bits"])
    except SizeCapError as exc:
        raise ConfigInvalidError(str(exc), field="max_bits")
    except AlphaOutOfRangeError as exc:
        raise ConfigInvalidError(str(exc), field="alpha")


def _check_alphas(alphas):
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ConfigInvalidError(f"alpha {a} outside [0, 1]", field="alphas")


# ---------------------------------------------------------------------------
# output helpers

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _write_csv(path, header, rows, fmt=_fmt):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _summary(text, to_stderr):
    print(text, file=sys.stderr if to_stderr else sys.stdout)


# ---------------------------------------------------------------------------
# subcommands

def cmd_lattice(cfg):
    lat = _lattice(cfg)
    G = lat.generator
    print(f"p={lat.p} n={lat.n}")
    for row in G:
        print("  " + "  ".join(f"{v: .6f}" for v in row))
    print(f"dpmin={lat.dpmin:.6f}")
    print(f"orthogonality_residual={lat.orthogonality_residual():.3e}")
    if cfg["out"]:
        _write_csv(cfg["out"], [f"g_{j + 1}" for j in range(lat.n)], G.tolist())
    return EXIT_OK


def cmd_constellation(cfg):
    s = _scheme(cfg)
    header = ["label1", "label2"] + [f"coord_{j + 1}" for j in range(s.n)]
    rows = [[int(l1), int(l2)] + list(pt) for (l1, l2), pt in zip(s.labels, s.points)]
    fmt = lambda v: f"{v:.12g}" if isinstance(v, (float, np.floating)) else str(int(v))
    _write_csv(cfg["out"], header, rows, fmt)
    if cfg["svg"]:
        series = []
        for l2 in range(s.user_sizes[1]):
            sel = s.labels[:, 1] == l2
            pts = s.points[sel]
            order = pts[:, 0].argsort()
            series.append((f"label2={l2}", pts[order, 0], pts[order, 1 % s.n]))
        write_svg(cfg["svg"], series, xlabel="coord_1", ylabel="coord_2",
                  title="composite points by user-2 label")
    _summary(f"constellation: {s.size} points n={s.n} mode={s.mode} alpha={s.alpha:.6g} "
             f"eta={s.eta:.6g}", cfg["out"] is None)
    return EXIT_OK


def cmd_dpmin_sweep(cfg):
    lat = _lattice(cfg)
    m1, m2 = cfg["m1"], cfg["m2"]
    if cfg["alphas"] is not None:
        _check_alphas(cfg["alphas"])
    elif cfg["grid"] < 2:
        raise ConfigInvalidError("grid must be >= 2", field="grid")
    size = 2 ** (lat.n * (m1 + m2))
    if cfg["method"] == "pairs" and size > MAX_PAIR_POINTS:
        raise ConfigInvalidError(f"{size} points exceed the pair-scan cap {MAX_PAIR_POINTS}; "
                                 "use --method grid", field="method")
    rows = dpmin_sweep(lat.p, m1, m2, cfg["grid"], cfg["band"], cfg["method"],
                       cfg["include_lp"], cfg["threads"], cfg["alphas"])
    _write_csv(cfg["out"], ["alpha", "dpmin_exact", "dpmin_bound", "demin_exact",
                            "is_lattice_partition_alpha"], rows)
    if cfg["svg"]:
        xs = [r[0] for r in rows]
        write_svg(cfg["svg"], [("exact", xs, [r[1] for r in rows]),
                               ("upper bound", xs, [r[2] for r in rows])],
                  xlabel="alpha", ylabel="minimum product distance", logy=True,
                  title=f"p={lat.p} m1={m1} m2={m2}")
    viol = sum(r[2] < r[1] - 1e-12 for r in rows)
    _summary(f"dpmin-sweep: {len(rows)} alphas, bound violations={viol}", cfg["out"] is None)
    if viol:
        print(f"error: upper bound below exact value on {viol} rows", file=sys.stderr)
        return EXIT_POSTCONDITION
    return EXIT_OK


def cmd_mindet_sweep(cfg):
    lat = _lattice(cfg)
    if lat.n != 2:
        raise ConfigInvalidError(f"the Alamouti mapping needs n=2, p={lat.p} gives n={lat.n}",
                                 field="p")
    alphas = cfg["alphas"]
    if alphas is None:
        if cfg["grid"] < 2:
            raise ConfigInvalidError("grid must be >= 2", field="grid")
        alphas = alpha_grid(cfg["grid"], cfg["m1"])
    _check_alphas(alphas)
    try:
        c1 = coset_leaders(lat, cfg["m1"])
        c2 = coset_leaders(lat, cfg["m2"])
    except SizeCapError as exc:
        raise ConfigInvalidError(str(exc), field="m1")
    rows = []
    for a in alphas:
        s = superimpose(c1, c2, a)
        rows.append((a, min_determinant(s, tau=cfg["tau"],
                                        unit_complex_power=cfg["unit_complex_power"])))
    _write_csv(cfg["out"], ["alpha", "min_det"], rows)
    if cfg["svg"]:
        write_svg(cfg["svg"], [("min det", [r[0] for r in rows], [r[1] for r in rows])],
                  xlabel="alpha", ylabel="minimum determinant", logy=True)
    best = max(rows, key=lambda r: r[1])
    _summary(f"mindet-sweep: {len(rows)} alphas, best alpha={best[0]:.6g} "
             f"min_det={best[1]:.4e} (alpha_LP={alpha_lattice_partition(cfg['m1']):.6g})",
             cfg["out"] is None)
    return EXIT_OK


def cmd_ser_sim(cfg):
    s = _scheme(cfg)
    try:
        ch = ChannelConfig(kind=cfg["channel"], snr_db=cfg["snr"], snr_gap_db=cfg["snr_gap"])
    except ConfigInvalidError as exc:
        raise ConfigInvalidError(str(exc), field={"snr_db": "snr", "snr_gap_db": "snr_gap",
                                                  "kind": "channel"}.get(exc.field, exc.field))
    trials = cfg["trials"]
    trials = trials[0] if len(trials) == 1 else trials
    curve = simulate_ser(s, ch, decoder=cfg["decoder"], trials=trials, seed=cfg["seed"],
                         threads=cfg["threads"], target_errors=cfg["target_errors"],
                         tau=cfg["tau"], unit_complex_power=cfg["unit_complex_power"])
    _write_csv(cfg["out"], ["user", "snr_db", "trials", "errors", "ser"], curve.rows())
    if cfg["out"]:
        meta = curve.metadata()
        meta["config_sha256"] = _config_digest({k: v for k, v in cfg.items() if k != "threads"})
        meta["git_describe"] = _git_describe()
        with open(cfg["out"] + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    if cfg["svg"]:
        write_svg(cfg["svg"], [(f"user {u}", curve.snr_db, curve.ser(u)) for u in (1, 2)],
                  xlabel="user-1 SNR (dB)", ylabel="SER", logy=True,
                  title=f"decoder={cfg['decoder']}")
    parts = " ".join(f"u{u}@{curve.snr_db[-1]:g}dB={curve.ser(u)[-1]:.3e}" for u in (1, 2))
    _summary(f"ser-sim: seed={cfg['seed']} decoder={cfg['decoder']} {parts}", cfg["out"] is None)
    return EXIT_OK


def cmd_reproduce(cfg, figure):
    if figure not in FIGURES:
        raise ConfigInvalidError(str(UnknownFigureError(
            f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")), field="figure")
    if cfg["blocks"] < 10 ** 4:
        raise ConfigInvalidError("blocks must be >= 10000", field="blocks")
    if cfg["trials_scale"] <= 0:
        raise ConfigInvalidError("trials_scale must be positive", field="trials_scale")
    kw = {}
    if figure == "fig7":
        kw = dict(grid=cfg["grid"], band=cfg["band"], threads=cfg["threads"])
        print(f"# reproduce fig7 grid={cfg['grid']} band={cfg['band']} (deterministic)")
    elif figure == "fig8-9":
        trials = {k: tuple(max(10 ** 4, int(round(t * cfg["trials_scale"]))) for t in v)
                  for k, v in FIG89_TRIALS.items()}
        kw = dict(seed=cfg["seed"], trials=trials, threads=cfg["threads"])
        print(f"# reproduce fig8-9 seed={cfg['seed']} trials={trials}")
    elif figure == "fig12-13":
        kw = dict(seed=cfg["seed"], blocks=cfg["blocks"], threads=cfg["threads"])
        print(f"# reproduce fig12-13 seed={cfg['seed']} blocks={cfg['blocks']}")
    else:
        print("# reproduce mindet-table tau=1 unit_complex_power=true (deterministic)")
    rep = reproduce(figure, **kw)
    for v in rep.verdicts:
        print(v.line())
    if cfg["out"]:
        _write_csv(cfg["out"], rep.columns, rep.rows)
    if cfg["svg"] and rep.curves:
        xlabel = "alpha" if figure == "fig7" else "SNR (dB)"
        write_svg(cfg["svg"], rep.curves, xlabel=xlabel, logy=True, title=figure)
    print(f"{figure}: {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_POSTCONDITION


COMMANDS = {
    "lattice": cmd_lattice,
    "constellation": cmd_constellation,
    "dpmin-sweep": cmd_dpmin_sweep,
    "mindet-sweep": cmd_mindet_sweep,
    "ser-sim": cmd_ser_sim,
}


def run(argv=None):
    """Execute one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return EXIT_CONFIG
        cfg = resolve(args)
        if args.command == "reproduce":
            return cmd_reproduce(cfg, args.figure)
        return COMMANDS[args.command](cfg)
    except ConfigInvalidError as exc:
        field = f" [field: {exc.field}]" if exc.field else ""
        print(f"noma-lab: error: {exc}{field}", file=sys.stderr)
        return EXIT_CONFIG
    except NomaLabError as exc:
        print(f"noma-lab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"noma-lab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
