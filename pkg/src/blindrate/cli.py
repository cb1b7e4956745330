"""Command-line front end.

Every subcommand reads an optional flat ``key = value`` config file through
``--config``; keys are the long flag names (dashes or underscores) and any
flag given on the command line wins over the file.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

from . import theory
from .channel import read_frames, sigma2_from_snr_db, write_frames
from .codes import from_alist, random_code
from .errors import (
    FrameParseError,
    InfeasibleBudgetError,
    InsufficientFramesError,
)
from .estimator import AUTO, REPORT_COLUMNS, recover
from .filtering import FilterParams
from .optimize import contour_grid, optimize_constrained, optimize_unconstrained, write_contour_csv
from .simulation import (
    SIMULATE_COLUMNS,
    parse_count,
    resolve_params,
    run_trial,
    simulate_rank_increase,
    trial_seed,
)


class ConfigError(ValueError):
    pass


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def load_config(path):
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{no}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{no}: empty key")
            values[key.replace("-", "_")] = (value, no)
    return values


def parse_snr_list(text):
    """``"5:20"`` (1 dB steps), ``"5:20:0.5"`` or ``"5,7,9"``."""
    text = str(text).strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValueError(f"bad SNR range {text!r}")
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1.0
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(count)]
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError("empty SNR list")
    return values


def _t1(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"t1 must lie in [0, 1], got {value}")
    return value


def _common(p):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="blindrate",
        description="Blind code-rate recovery for linear block codes over BPSK/AWGN.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser(
        "simulate",
        help="Monte Carlo recovery sweep",
        description="CSV columns: " + ",".join(SIMULATE_COLUMNS),
    )
    _common(p)
    p.add_argument("--n", type=int, help="code length for a random code")
    p.add_argument("--k", type=int, help="message length for a random code")
    p.add_argument("--code-seed", type=int, default=1)
    p.add_argument("--alist", help="parity-check matrix in alist format")
    p.add_argument("--snr-db", type=parse_snr_list, default="5:20")
    p.add_argument("--messages", type=int, default=1000, help="frames per trial (M)")
    p.add_argument("--t1", type=_t1, default=0.3)
    p.add_argument("--t2", default="n/2", help="integer, 'n' or 'n/<d>'")
    p.add_argument("--m-s", type=int, help="word-matrix rows (default n)")
    p.add_argument("--auto", action="store_true", help="choose t1, t2 by constrained optimisation")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--e-c-mode", choices=("exact", "observed"), default="exact")
    p.add_argument("--frames-dir", help="also write each trial's frames here")
    p.add_argument("--noiseless", action="store_true", help="use sigma^2 = 1e-12 at every point")

    p = sub.add_parser(
        "theory", help="closed-form metrics as key=value lines",
        description="Prints p_u, p_e, p_eu, p_er, E[C] (exact and approximate), "
        "E[M], algorithmic and ambient error.",
    )
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--t1", type=_t1)
    p.add_argument("--t2", help="integer, 'n' or 'n/<d>'")
    p.add_argument("--m-s", type=int, help="word-matrix rows (default n)")

    p = sub.add_parser(
        "optimize", help="grid search for t1, t2",
        description="Contour CSV columns: t1,t2,algorithmic_error,f_value",
    )
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--budget", type=int, help="total frames M; enables the constrained search")
    p.add_argument("--tolerance", type=float, default=0.25)
    p.add_argument("--contour", help="write the full grid as CSV here")

    p = sub.add_parser(
        "recover", help="recover the rate from a frame file",
        description="Report CSV columns: " + ",".join(REPORT_COLUMNS),
    )
    _common(p)
    p.add_argument("--frames", help="frame file, one frame per line")
    p.add_argument("--n", type=int)
    p.add_argument("--t1", type=_t1, help="omit t1 and t2 for automatic thresholds")
    p.add_argument("--t2")
    p.add_argument("--m-s", type=int)
    p.add_argument("--e-c-mode", choices=("exact", "observed"), default="exact")
    p.add_argument("--csv", help="append the report as a CSV row to this file")

    p = sub.add_parser(
        "verify-theorem1", help="Monte Carlo check of the rank-increase bound",
    )
    _common(p)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--m-s", type=int, default=200)
    p.add_argument("--p-e-prime", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=10000)
    return parser


def _apply_config(parser, args, argv):
    if not getattr(args, "config", None):
        return args
    sub = parser.subcommands[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, (value, no) in load_config(args.config).items():
        if key not in known or key in ("config", "help"):
            raise ConfigError(f"{args.config}:{no}: unknown key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            low = value.lower()
            if low not in _TRUE | _FALSE:
                raise ConfigError(f"{args.config}:{no}: {key} expects true/false")
            defaults[key] = low in _TRUE
        else:
            try:
                defaults[key] = action.type(value) if action.type else value
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"{args.config}:{no}: bad value for {key}: {exc}") from None
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _kv(pairs):
    return "".join(f"{k}={repr(v) if isinstance(v, float) else v}\n" for k, v in pairs)


def cmd_simulate(args):
    if args.alist:
        with open(args.alist) as fh:
            code = from_alist(fh.read())
    else:
        _require(args, "n", "k")
        code = random_code(args.n, args.k, args.code_seed)
    if args.trials < 1:
        raise ConfigError("trials must be at least 1")
    snrs = args.snr_db if isinstance(args.snr_db, list) else parse_snr_list(args.snr_db)
    params = resolve_params(args.t1, args.t2, code.n, auto=args.auto)
    if args.frames_dir:
        os.makedirs(args.frames_dir, exist_ok=True)
    out = _open_out(args.out)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SIMULATE_COLUMNS)
        for si, snr in enumerate(snrs):
            for trial in range(args.trials):
                result = run_trial(
                    code, snr, args.messages, params, trial_seed(args.seed, si, trial),
                    trial=trial, m_s=args.m_s, e_c_mode=args.e_c_mode,
                    sigma2=1e-12 if args.noiseless else None,
                    keep_frames=bool(args.frames_dir),
                )
                writer.writerow(result.csv_row())
                if args.frames_dir:
                    write_frames(
                        os.path.join(args.frames_dir, f"frames_snr{snr:g}_trial{trial}.txt"),
                        result.frames,
                    )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def theory_block(n, snr_db, t1, t2, m_s=None):
    sigma = math.sqrt(sigma2_from_snr_db(snr_db))
    inputs = theory.TheoryInputs(n=n, m_s=n if m_s is None else m_s, sigma=sigma, t1=t1, t2=t2)
    m = theory.compute_metrics(inputs)
    return _kv([
        ("n", n), ("m_s", inputs.m_s), ("snr_db", float(snr_db)), ("sigma", sigma),
        ("t1", float(t1)), ("t2", t2),
        ("p_u", m.p_u), ("p_e", m.p_e), ("p_eu", m.p_eu), ("p_er", m.p_er),
        ("e_c_exact", m.e_c_exact), ("e_c_approx", m.e_c_approx), ("e_m", m.e_m),
        ("algorithmic_error", m.algorithmic_error), ("ambient_error", m.ambient_error),
    ])


def cmd_theory(args):
    _require(args, "n", "snr_db", "t1", "t2")
    text = theory_block(args.n, args.snr_db, args.t1, parse_count(args.t2, args.n), args.m_s)
    out = _open_out(args.out)
    out.write(text)
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_optimize(args):
    _require(args, "n", "snr_db")
    sigma = math.sqrt(sigma2_from_snr_db(args.snr_db))
    if args.budget is None:
        res = optimize_unconstrained(args.n, sigma, args.step)
    else:
        res = optimize_constrained(args.n, sigma, args.budget, args.step, args.tolerance)
    text = _kv([
        ("t1_star", res.t1_star), ("t2_star", res.t2_star), ("objective", res.objective),
        ("constraint_value", res.constraint_value), ("grid_resolution", res.grid_resolution),
        ("constrained", int(res.constrained)),
    ])
    out = _open_out(args.out)
    out.write(text)
    if out is not sys.stdout:
        out.close()
    if args.contour:
        with open(args.contour, "w", newline="") as fh:
            write_contour_csv(fh, contour_grid(args.n, sigma, args.step))
    return 0


def cmd_recover(args):
    _require(args, "frames", "n")
    frames = read_frames(args.frames, args.n)
    if (args.t1 is None) != (args.t2 is None):
        raise ConfigError("give both --t1 and --t2, or neither for automatic thresholds")
    params = AUTO if args.t1 is None else FilterParams(args.t1, parse_count(args.t2, args.n))
    report = recover(frames, args.n, params, m_s=args.m_s, e_c_mode=args.e_c_mode)
    out = _open_out(args.out)
    out.write(report.to_text())
    if out is not sys.stdout:
        out.close()
    if args.csv:
        fresh = not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
        with open(args.csv, "a", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if fresh:
                writer.writerow(REPORT_COLUMNS)
            writer.writerow(report.csv_row())
    return 0


def cmd_verify_theorem1(args):
    if args.trials < 1:
        raise ConfigError("trials must be at least 1")
    if not args.m_s > args.d >= 1 or not 0.0 <= args.p_e_prime < 1.0:
        raise ConfigError("need m_s > d >= 1 and 0 <= p_e_prime < 1")
    report = simulate_rank_increase(args.d, args.m_s, args.p_e_prime, args.trials, args.seed)
    out = _open_out(args.out)
    out.write(report.to_text())
    if out is not sys.stdout:
        out.close()
    return 0 if report.passed is not False else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "theory": cmd_theory,
    "optimize": cmd_optimize,
    "recover": cmd_recover,
    "verify-theorem1": cmd_verify_theorem1,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(parser, args, argv)
        return COMMANDS[args.command](args)
    except (ConfigError, FrameParseError, InsufficientFramesError,
            InfeasibleBudgetError, ValueError, OSError) as exc:
        print(f"blindrate {argv[0] if argv else ''}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
