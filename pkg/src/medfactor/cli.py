"""Command-line entry point.

Exit codes: 0 success, 2 usage, 3 I/O failure, 4 schema mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    lemma1_envelope_check,
    median_ratio,
    prefactor_drift,
    ratio_csv,
    ratio_table,
    sup_deviation,
)
from .empirical import (
    DEFAULT_DELTA_BETA,
    DEFAULT_P_CUT,
    accumulate,
    counts_from_json,
    counts_to_json,
    empirical_cdf_grid,
    tail_count,
)
from .errors import DomainError, SchemaError, UsageError
from .manifest import RunManifest, atomic_write
from .sieve import DEFAULT_SEGMENT_SIZE, WORD_LIMIT
from .special import SQRT_2_OVER_PI, euler_gamma, meissel_mertens, normal_cdf, prime_zeta
from .theory import predict_cdf_grid, scale_from_log2, scale_point, tau_details

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SCHEMA = 0, 2, 3, 4


def parse_t_grid(spec: str) -> np.ndarray:
    """'lo:hi:step' -> inclusive grid."""
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"t grid must be lo:hi:step, got {spec!r}")
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad t grid {spec!r}")
    n = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(n), 12)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _emit(args, manifest: RunManifest, doc: dict) -> None:
    """Write JSON to --out with a sidecar manifest, or to stdout with the manifest inline."""
    if args.out:
        text = json.dumps(doc, indent=2) + "\n"
        manifest.output_checksums[args.out] = atomic_write(args.out, text)
        manifest.finish().write_beside(args.out)
    else:
        doc = dict(doc, manifest=manifest.finish().to_dict())
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _manifest(args, command: str) -> RunManifest:
    params = {}
    for k, v in vars(args).items():
        if k == "func":
            continue
        params[k] = v.tolist() if isinstance(v, np.ndarray) else v
    return RunManifest(command, params, __version__)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_sieve(args) -> int:
    if args.x > WORD_LIMIT:
        raise UsageError("--x exceeds 2^63 - 1")
    m = _manifest(args, "sieve")
    c = accumulate(args.x, args.nu, args.p_cut, args.delta_beta, args.segments, args.workers)
    embedded = {k: v for k, v in m.to_dict().items() if k not in ("output_checksums",)}
    embedded["finished_at"] = m.finish().finished_at
    embedded["wall_seconds"] = m.wall_seconds
    m.output_checksums[args.out] = atomic_write(args.out, counts_to_json(c, embedded))
    m.write_beside(args.out)
    return EXIT_OK


def _load_counts(path: str, m: RunManifest):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    m.add_input(path)
    try:
        return counts_from_json(text)
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path} is not a counts file: {exc}") from exc


def cmd_cdf(args) -> int:
    m = _manifest(args, "cdf")
    c = _load_counts(args.counts, m)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "A"])
    for t, a in zip(args.t_grid, empirical_cdf_grid(c, args.t_grid)):
        w.writerow([_fmt(t), _fmt(a)])
    m.output_checksums[args.out] = atomic_write(args.out, buf.getvalue())
    m.finish().write_beside(args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    m = _manifest(args, "predict")
    s = scale_from_log2(args.log2x) if args.log2x is not None else scale_point(x=args.x)
    pred = predict_cdf_grid(args.nu, s, args.t_grid)
    root = math.sqrt(s.L2)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "predict_cdf", "phi_2t", "diff", "scaled_diff"])
    for t, p in zip(args.t_grid, pred):
        phi = normal_cdf(2.0 * t)
        w.writerow([_fmt(t), _fmt(p), _fmt(phi), _fmt(p - phi), _fmt((p - phi) * root)])
    m.output_checksums[args.out] = atomic_write(args.out, buf.getvalue())
    m.finish().write_beside(args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    m = _manifest(args, "compare")
    c = _load_counts(args.counts, m)
    os.makedirs(args.out, exist_ok=True)
    dev = sup_deviation(c)
    rows = ratio_table(c, tuple(args.beta_window))
    env = lemma1_envelope_check(c)
    summary = {
        "x": c.x,
        "nu": c.nu,
        "L2": dev.s.L2,
        "sup_dev": dev.sup_dev,
        "scaled_sup_dev": dev.scaled_sup_dev,
        "beta_window": list(args.beta_window),
        "ratio_rows": len(rows),
        "median_ratio": median_ratio(rows),
        "envelope": {"qualifying": env.qualifying, "constant": env.constant, "note": env.describe()},
    }
    if c.nu == "omega":
        summary["prefactor_drift"] = prefactor_drift(c)
    outputs = {
        "deviation.csv": dev.to_csv(),
        "ratio.csv": ratio_csv(rows),
        "summary.json": json.dumps(summary, indent=2) + "\n",
    }
    for name, text in outputs.items():
        path = os.path.join(args.out, name)
        m.output_checksums[path] = atomic_write(path, text)
    m.finish().write_beside(os.path.join(args.out, "compare"))
    return EXIT_OK


def cmd_constants(args) -> int:
    m = _manifest(args, "constants")
    doc = {
        "gamma": euler_gamma(),
        "kappa": meissel_mertens(),
        "sqrt_2_over_pi": SQRT_2_OVER_PI,
        "prime_zeta": {str(k): prime_zeta(k) for k in range(2, 9)},
    }
    _emit(args, m, doc)
    return EXIT_OK


def cmd_tau(args) -> int:
    m = _manifest(args, "tau")
    est = tau_details(args.nu)
    _emit(args, m, {"nu": args.nu, "tau": est.tau, "stability": est.stability,
                    "scaled_deviation_limit": -SQRT_2_OVER_PI * est.tau / 4.0})
    return EXIT_OK


def cmd_tails(args) -> int:
    m = _manifest(args, "tails")
    rep = tail_count(args.x, args.nu, (args.e_lo, args.e_hi), args.side, args.factor)
    _emit(args, m, rep.to_dict())
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _window(spec: str) -> list[float]:
    try:
        lo, hi = (float(v) for v in spec.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be lo:hi, got {spec!r}")
    return [lo, hi]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="medfactor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    nu = dict(choices=["omega", "Omega"], required=True)
    grid = dict(type=parse_t_grid, default=parse_t_grid("-4:4:0.02"))

    s = sub.add_parser("sieve", help="sieve middle-prime counts up to x")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--nu", **nu)
    s.add_argument("--p-cut", type=int, default=DEFAULT_P_CUT)
    s.add_argument("--delta-beta", type=float, default=DEFAULT_DELTA_BETA)
    s.add_argument("--segments", type=int, default=DEFAULT_SEGMENT_SIZE, help="segment size (integers per segment)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("cdf", help="empirical A_nu(x, t) from a counts file")
    s.add_argument("--counts", required=True)
    s.add_argument("--t-grid", **grid)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cdf)

    s = sub.add_parser("predict", help="semi-theoretical distribution against Phi(2t)")
    s.add_argument("--nu", **nu)
    scale = s.add_mutually_exclusive_group(required=True)
    scale.add_argument("--log2x", type=float)
    scale.add_argument("--x", type=int)
    s.add_argument("--t-grid", **grid)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("compare", help="deviation, local-law ratios and envelope for a counts file")
    s.add_argument("--counts", required=True)
    s.add_argument("--beta-window", type=_window, default=[0.45, 0.55])
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("constants", help="gamma, kappa, sqrt(2/pi), P(2..8) as JSON")
    s.add_argument("--out")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("tau", help="optimality constant for one nu")
    s.add_argument("--nu", **nu)
    s.add_argument("--out")
    s.set_defaults(func=cmd_tau)

    s = sub.add_parser("tails", help="Hall-Tenenbaum tail count for a prime interval")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--nu", **nu)
    s.add_argument("--e-lo", type=int, required=True)
    s.add_argument("--e-hi", type=int, required=True)
    s.add_argument("--side", choices=["below", "above"], required=True)
    s.add_argument("--factor", type=float, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_tails)
    return p


_VALUE_FLAGS = ("--t-grid", "--beta-window")


def _join_range_flags(argv: list[str]) -> list[str]:
    # argparse reads "-2:2:0.5" as an option; bind such values with "="
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_range_flags(argv))
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"medfactor: schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (DomainError, UsageError, ValueError) as exc:
        print(f"medfactor: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"medfactor: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
