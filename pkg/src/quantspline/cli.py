"""Command-line interface: ``quantspline {estimate,test,simulate,spectral,diagnose}``.

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
Output files are written atomically and only after all arguments validate.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .dataio import atomic_write, curve_csv, ingest_csv, read_grid_values, to_json
from .estimator import evaluate, fit, gcv_select
from .exceptions import QuantSplineError
from .inference import (
    check_conditions,
    linearity_test,
    quantization_error_terms,
    quantization_test,
    separation_rate,
)
from .quantizer import Quantizer, log_bit_testing_quantizer, midpoint_marks, quantize_sample, uniform_symmetric_quantizer
from .simulation import ExperimentConfig, run
from .spectral import build_spectral


class UsageError(Exception):
    pass


def _lambda_arg(text: str):
    if text in ("gcv", "gcv-log"):
        return text
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, 'gcv' or 'gcv-log', got {text!r}") from None
    if not val > 0 or not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"lambda must be positive, got {text!r}")
    return val


def _positive_float(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not val > 0 or not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return val


def _alpha_arg(text: str) -> float:
    val = _positive_float(text)
    if val >= 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text!r}")
    return val


def _bits_arg(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer bit budget, got {text!r}") from None
    if not 1 <= val <= 16:
        raise argparse.ArgumentTypeError(f"bit budget must lie in 1..16, got {val}")
    return val


def _null_arg(text: str) -> str:
    if text in ("zero", "linear") or (text.startswith("file:") and len(text) > 5):
        return text
    raise argparse.ArgumentTypeError(f"null must be 'zero', 'linear' or 'file:<csv>', got {text!r}")


def _add_data_args(p: argparse.ArgumentParser, default_lambda: str) -> None:
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--x-col", default="x", help="covariate column (default: x)")
    p.add_argument("--y-col", default="y", help="response column (default: y)")
    p.add_argument("--mapping", choices=("rank", "none"), default="rank", help="how x is placed on the grid i/n")
    p.add_argument("--b", type=_bits_arg, default=None, help="bit budget; omit to use the raw responses")
    p.add_argument("--marks", choices=("empirical", "midpoint"), default="empirical")
    p.add_argument("--m", type=int, choices=range(1, 9), default=2, metavar="M", help="smoothness order (default: 2)")
    p.add_argument("--lambda", dest="lam", type=_lambda_arg, default=default_lambda, help="penalty: number, gcv or gcv-log")
    p.add_argument("--center-y", action="store_true", help="subtract the sample mean of y first")
    p.add_argument("--seed", type=int, default=None, help="recorded in the metadata; these commands are deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quantspline", description="Spline estimation and testing from quantized samples.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit a periodic smoothing spline and write the curve")
    _add_data_args(p, "gcv")
    p.add_argument("--grid-size", type=int, default=1000, help="evaluation points j/G, j = 1..G (default: 1000)")
    p.add_argument("--output", default=None, help="curve CSV path (default: stdout)")
    p.add_argument("--meta", default=None, help="metadata JSON path (default: <output>.json)")

    p = sub.add_parser("test", help="test a null hypothesis on (possibly quantized) data")
    _add_data_args(p, "gcv-log")
    p.add_argument("--null", type=_null_arg, default="zero", help="zero, linear or file:<csv with column f>")
    p.add_argument("--alpha", type=_alpha_arg, default=0.1)
    p.add_argument("--output", default=None, help="result JSON path (default: stdout)")

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment from a JSON config")
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--replications", type=int, default=None, help="override the config replication count")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", default=None, help="result CSV path (default: stdout); the config is saved next to it")

    p = sub.add_parser("spectral", help="dump the spectral quantities of the smoother")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, choices=range(1, 9), default=2, metavar="M")
    p.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    p.add_argument("--output", default=None, help="JSON path (default: stdout)")

    p = sub.add_parser("diagnose", help="quantization error terms and condition checks for a quantizer")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, choices=range(1, 9), default=2, metavar="M")
    p.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    p.add_argument("--sigma", type=_positive_float, default=1.0)
    p.add_argument("--scheme", choices=("log-bit", "uniform-symmetric", "uniform"), default="log-bit")
    p.add_argument("--c", type=_positive_float, default=None, help="cell width (uniform-symmetric)")
    p.add_argument("--l", type=int, default=None, help="cells per side (uniform-symmetric)")
    p.add_argument("--b", type=_bits_arg, default=None, help="bit budget (uniform)")
    p.add_argument("--tail", type=_positive_float, default=None, help="outer threshold magnitude (uniform)")
    p.add_argument("--output", default=None, help="JSON path (default: stdout)")
    return parser


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def _load(args):
    data = ingest_csv(args.input, args.x_col, args.y_col, args.mapping)
    y = data.y
    y_mean = float(np.mean(y))
    if args.center_y:
        y = y - y_mean
    if args.b is None:
        z, q = y, None
    else:
        z, q = quantize_sample(y, args.b, args.marks)
    return data, y, z, q, y_mean


def _choose_lambda(z, m, rule):
    if isinstance(rule, float):
        return rule, "fixed"
    lam, _ = gcv_select(z, m)
    if rule == "gcv-log":
        lam /= math.log(z.size)
    return lam, rule


def _cmd_estimate(args) -> None:
    if args.grid_size < 2:
        raise UsageError("--grid-size must be at least 2")
    if args.meta is None and args.output is None:
        meta_path = None
    else:
        meta_path = args.meta or f"{args.output}.json"
    data, _, z, q, y_mean = _load(args)
    lam, rule = _choose_lambda(z, args.m, args.lam)
    f = fit(z, args.m, lam, source="raw" if q is None else "quantized")
    grid = np.arange(1, args.grid_size + 1) / args.grid_size
    curve = curve_csv(grid, evaluate(f, grid))
    meta = {
        "command": "estimate",
        "n": f.n,
        "m": f.m,
        "lambda": f.lam,
        "lambda_rule": rule,
        "b": args.b,
        "marks": args.marks if q is not None else None,
        "quantizer": None if q is None else q.to_dict(),
        "mapped_grid": data.mapped_grid,
        "center_y": bool(args.center_y),
        "y_mean": y_mean,
        "grid_size": args.grid_size,
        "seed": args.seed,
        "theta": f.theta.tolist(),
    }
    _emit(curve, args.output)
    if meta_path is not None:
        atomic_write(meta_path, to_json(meta))
    else:
        sys.stderr.write(to_json({k: v for k, v in meta.items() if k != "theta"}))


def _cmd_test(args) -> None:
    data, _, z, q, y_mean = _load(args)
    lam, rule = _choose_lambda(z, args.m, args.lam)
    if args.null == "linear":
        res = linearity_test(z, args.m, lam, args.alpha, quantizer=q)
    elif args.null == "zero":
        res = quantization_test(z, None, args.m, lam, args.alpha, quantizer=q)
    else:
        f_star = read_grid_values(args.null[5:], data.n)
        if args.center_y:
            f_star = f_star - y_mean
        res = quantization_test(z, f_star, args.m, lam, args.alpha, quantizer=q, null="file")
    out = res.to_dict()
    out.update(
        {
            "n": data.n,
            "m": args.m,
            "lambda_rule": rule,
            "b": args.b,
            "mapped_grid": data.mapped_grid,
            "center_y": bool(args.center_y),
            "y_mean": y_mean,
            "seed": args.seed,
        }
    )
    _emit(to_json(out), args.output)


def _cmd_simulate(args) -> None:
    try:
        config = ExperimentConfig.from_json(args.config)
    except OSError as exc:
        raise QuantSplineError(f"cannot read config: {exc}") from exc
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    if overrides:
        config = ExperimentConfig.from_dict({**config.to_dict(), **overrides})
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    result = run(config, workers=args.workers)
    _emit(result.to_csv(), args.output)
    if args.output is not None:
        atomic_write(f"{args.output}.config.json", to_json(config.to_dict()))


def _cmd_spectral(args) -> None:
    if args.n < 4:
        raise UsageError("--n must be at least 4")
    sq = build_spectral(args.n, args.m, args.lam)
    out = sq.to_dict()
    out["s_n_sq"] = sq.s_n_sq
    out.update({"lam_c": sq.lam_c, "lam_d": sq.lam_d, "xi": sq.xi})
    _emit(to_json(out), args.output)


def _diagnose_quantizer(args) -> Quantizer:
    if args.scheme == "log-bit":
        return log_bit_testing_quantizer(args.sigma, args.n, args.m)
    if args.scheme == "uniform-symmetric":
        if args.c is None or args.l is None:
            raise UsageError("uniform-symmetric needs --c and --l")
        return uniform_symmetric_quantizer(args.c, args.l)
    if args.b is None or args.tail is None:
        raise UsageError("uniform needs --b and --tail")
    k = 2**args.b
    t = np.array([0.0]) if k == 2 else np.linspace(-args.tail, args.tail, k - 1)
    return Quantizer(t, midpoint_marks(t), scheme="uniform")


def _cmd_diagnose(args) -> None:
    if args.n < 4:
        raise UsageError("--n must be at least 4")
    q = _diagnose_quantizer(args)
    sq = build_spectral(args.n, args.m, args.lam)
    conditions = check_conditions(q, args.sigma, args.n, args.lam, args.m)
    out = {
        "n": args.n,
        "m": args.m,
        "lambda": args.lam,
        "sigma": args.sigma,
        "quantizer": q.to_dict(),
        "error_terms": quantization_error_terms(np.zeros(args.n), args.sigma, q.t, args.m),
        "separation_rate": separation_rate(sq, conditions["tau_sq_null"], q.t),
        "conditions": conditions,
    }
    _emit(to_json(out), args.output)


COMMANDS = {
    "estimate": _cmd_estimate,
    "test": _cmd_test,
    "simulate": _cmd_simulate,
    "spectral": _cmd_spectral,
    "diagnose": _cmd_diagnose,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"quantspline {args.command}: error: {exc}\n")
        return 2
    except (QuantSplineError, OSError) as exc:
        sys.stderr.write(f"quantspline {args.command}: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
