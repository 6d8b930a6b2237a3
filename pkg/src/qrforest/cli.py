"""Command-line interface.

Subcommands: ``generate`` (random forest file), ``forecast`` (classical /
quantum-simulated / both, with a comparison report), ``reproduce`` (the
built-in reference experiment over many seeds), ``metrics`` (error metrics
over a two-column pairs file).

Reports come in two formats: ``text`` (human-readable, includes wall time)
and ``structured`` (versioned JSON whose bytes are fully determined by the
inputs and seed; volatile fields like wall time are text-only).

Exit codes: 0 success, 2 usage (argparse), 3 input parsing/validation,
4 simulation resource limits.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from .exceptions import DegenerateRangeError, QrfError, ResourceLimitError
from .forest_io import load_forest, save_forest
from .model import (
    Attribute,
    InputObject,
    METRIC_NAMES,
    PredictionPair,
    beta_classical,
    error_metric,
    forecast_classical,
    generate_random_forest,
)
from .qae import PhaseEstimation, QaeConfig, error_bound, query_count, reconstruct_R, run_forecast
from .reference import REFERENCE_RUNS, REFERENCE_T, reference_forest, reference_input
from .compiler import compile_forest_op
from .exceptions import MetricError

SCHEMA_VERSION = 1
SUCCESS_FLOOR = 8.0 / math.pi**2

EXIT_OK = 0
EXIT_DATA = 3
EXIT_RESOURCE = 4


def _parse_attrs(text: str) -> tuple[Attribute, ...]:
    out = []
    for token in text.split(","):
        token = token.strip()
        if token == "real":
            out.append(Attribute("real"))
        elif token.startswith("disc:"):
            out.append(Attribute("discrete", int(token[5:])))
        else:
            raise QrfError(f"bad attribute token {token!r} (use 'real' or 'disc:K')")
    if not out:
        raise QrfError("need at least one attribute")
    return tuple(out)


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise QrfError(f"bad range {text!r} (use LO:HI)") from None
    return lo, hi


def _parse_input(value: str) -> InputObject:
    """--input takes a comma-separated value list, or a path to a file
    containing one such line."""
    try:
        with open(value) as fh:
            value = fh.read().strip()
    except OSError:
        pass
    try:
        return InputObject(tuple(float(v) for v in value.split(",")))
    except ValueError:
        raise QrfError(f"bad input values {value!r}") from None


def _write_out(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit(doc: dict, text: str, args) -> None:
    _write_out(json.dumps(doc, indent=2) + "\n" if args.format == "structured" else text, args.out)


def _comparison_metrics(truth: float, forecast: float) -> dict:
    table = {}
    for name in METRIC_NAMES:
        try:
            table[name] = error_metric([PredictionPair(truth, forecast)], name)
        except MetricError:
            table[name] = None
    return table


def cmd_generate(args) -> int:
    forest = generate_random_forest(
        args.trees, args.height, _parse_attrs(args.attrs), _parse_range(args.range), args.seed
    )
    _write_out(save_forest(forest), args.out)
    return EXIT_OK


def cmd_forecast(args) -> int:
    with open(args.forest) as fh:
        forest = load_forest(fh.read())
    x = _parse_input(args.input)
    started = time.perf_counter()

    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "command": "forecast",
        "forest": {"n": forest.n, "h": forest.height, "y_min": forest.y_min, "y_max": forest.y_max},
        "input": list(x.values),
        "mode": args.mode,
        "target": args.target,
        "seed": args.seed,
    }
    lines = [
        f"forest: n={forest.n} h={forest.height} y_min={forest.y_min!r} y_max={forest.y_max!r}",
        "input: " + ",".join(repr(v) for v in x.values),
        f"mode: {args.mode}  target: {args.target}  seed: {args.seed}",
    ]

    classical_r = classical_beta = None
    if args.mode in ("classical", "both"):
        classical_r = forecast_classical(forest, x)
        try:
            classical_beta = beta_classical(forest, x)
        except DegenerateRangeError:
            classical_beta = None
        doc["classical"] = {"r": classical_r, "beta": classical_beta}
        lines.append(f"classical: R={classical_r!r} beta={classical_beta!r}")

    if args.mode in ("quantum", "both"):
        config = QaeConfig(
            t=args.t,
            repetitions=None if args.delta is not None else args.reps,
            delta=args.delta,
            target=args.target,
            seed=args.seed,
        )
        try:
            result = run_forecast(forest, x, config)
        except DegenerateRangeError:
            constant = forecast_classical(forest, x)
            print(
                "warning: all leaf labels equal; returning the constant forecast",
                file=sys.stderr,
            )
            doc["quantum"] = {"degenerate_range": True, "r_estimate": constant}
            lines.append(f"quantum: degenerate range, constant forecast R={constant!r}")
        else:
            r_estimate = reconstruct_R(result.beta_estimate, forest.y_min, forest.y_max)
            doc["quantum"] = {
                "degenerate_range": False,
                "t": result.t,
                "repetitions": result.repetitions,
                "beta_estimate": result.beta_estimate,
                "r_estimate": r_estimate,
                "error_bound": result.error_bound,
                "grover_calls": result.grover_calls,
                "u_invocations": result.u_invocations,
                "query_count": query_count(result),
                "raw_estimates": list(result.raw_estimates),
            }
            lines.append(
                f"quantum: beta={result.beta_estimate!r} R={r_estimate!r} "
                f"bound={result.error_bound!r} t={result.t} reps={result.repetitions} "
                f"grover_calls={result.grover_calls} queries={query_count(result)}"
            )
            if args.mode == "both" and classical_r is not None:
                if args.target == "beta" and classical_beta is not None:
                    pair = (classical_beta, result.beta_estimate)
                else:
                    pair = (classical_r, r_estimate)
                doc["comparison"] = _comparison_metrics(*pair)
                lines.append(
                    "comparison: "
                    + "  ".join(
                        f"{k}={v!r}" if v is not None else f"{k}=degenerate"
                        for k, v in doc["comparison"].items()
                    )
                )

    lines.append(f"wall_time_s: {time.perf_counter() - started:.3f}")
    _emit(doc, "\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.runs < 1:
        raise QrfError("need at least one run")
    forest, x = reference_forest(), reference_input()
    beta_cl = beta_classical(forest, x)
    r_cl = forecast_classical(forest, x)
    spread = forest.y_max - forest.y_min
    bound = error_bound(beta_cl, args.t)
    circuit = compile_forest_op(forest, x)
    engine = PhaseEstimation(circuit, args.t)

    runs = []
    seeds = np.random.SeedSequence(args.seed).spawn(args.runs)
    for i, s in enumerate(seeds):
        outcome = engine.sample_outcome(np.random.default_rng(s))
        beta_est = engine.estimate_of(outcome)
        r_est = reconstruct_R(beta_est, forest.y_min, forest.y_max)
        runs.append(
            {
                "run": i,
                "outcome": outcome,
                "beta_estimate": beta_est,
                "abs_beta_error": abs(beta_est - beta_cl),
                "within_bound": abs(beta_est - beta_cl) <= bound,
                "r_estimate": r_est,
                "rel_r_error": abs(r_est - r_cl) / abs(r_cl),
            }
        )

    success_rate = sum(r["within_bound"] for r in runs) / len(runs)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "reproduce",
        "t": args.t,
        "runs": args.runs,
        "seed": args.seed,
        "beta_classical": beta_cl,
        "r_classical": r_cl,
        "beta_error_bound": bound,
        "r_error_bound": bound * spread,
        "success_floor": SUCCESS_FLOOR,
        "results": runs,
        "summary": {
            "success_rate": success_rate,
            "mean_abs_beta_error": sum(r["abs_beta_error"] for r in runs) / len(runs),
            "median_rel_r_error": sorted(r["rel_r_error"] for r in runs)[len(runs) // 2],
        },
    }
    lines = [
        f"reference experiment: n={forest.n} h={forest.height} t={args.t} "
        f"runs={args.runs} seed={args.seed}",
        f"classical: beta={beta_cl!r} R={r_cl!r}",
        f"single-run bound: {bound!r} (success floor {SUCCESS_FLOOR:.4f})",
        f"{'run':>4} {'k':>3} {'beta_est':>10} {'abs_err':>10} {'ok':>3} {'r_est':>10} {'rel_r_err':>10}",
    ]
    for r in runs:
        lines.append(
            f"{r['run']:>4} {r['outcome']:>3} {r['beta_estimate']:>10.6f} "
            f"{r['abs_beta_error']:>10.6f} {'y' if r['within_bound'] else 'n':>3} "
            f"{r['r_estimate']:>10.6f} {r['rel_r_error']:>10.6f}"
        )
    s = doc["summary"]
    lines.append(
        f"summary: success_rate={s['success_rate']:.3f} "
        f"mean_abs_beta_error={s['mean_abs_beta_error']:.6f} "
        f"median_rel_r_error={s['median_rel_r_error']:.6f}"
    )
    _emit(doc, "\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_metrics(args) -> int:
    pairs = []
    with open(args.pairs) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise QrfError(f"{args.pairs}:{lineno}: expected two numbers per line")
            try:
                pairs.append(PredictionPair(float(parts[0]), float(parts[1])))
            except ValueError:
                raise QrfError(f"{args.pairs}:{lineno}: expected two numbers per line") from None
    if not pairs:
        raise QrfError(f"{args.pairs}: no pairs found")
    wanted = METRIC_NAMES if args.metrics is None else tuple(args.metrics.split(","))
    for name in wanted:
        if name not in METRIC_NAMES:
            raise QrfError(f"unknown metric {name!r} (choose from {', '.join(METRIC_NAMES)})")
    table = {}
    for name in wanted:
        try:
            table[name] = error_metric(pairs, name)
        except MetricError:
            table[name] = None
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "metrics",
        "pairs": len(pairs),
        "metrics": table,
    }
    lines = [f"pairs: {len(pairs)}"] + [
        f"{k}: {v!r}" if v is not None else f"{k}: degenerate" for k, v in table.items()
    ]
    _emit(doc, "\n".join(lines) + "\n", args)
    return EXIT_OK


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrforest",
        description="Quantum amplitude-estimation forecasting for random-forest regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random forest file")
    p.add_argument("-n", "--trees", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--attrs", required=True, help="comma list of 'real' or 'disc:K'")
    p.add_argument("--range", default="0:1", help="leaf label range LO:HI")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("forecast", help="forecast one input object")
    p.add_argument("--forest", required=True, help="forest file path")
    p.add_argument("--input", required=True, help="comma-separated values, or a file path")
    p.add_argument("--mode", choices=("classical", "quantum", "both"), default="both")
    p.add_argument("--target", choices=("beta", "r"), default="r")
    p.add_argument("--t", type=int, default=REFERENCE_T, help="phase grid size (power of two)")
    p.add_argument("--reps", type=int, default=1, help="odd repetition count for the median")
    p.add_argument("--delta", type=float, default=None, help="derive repetitions from a failure bound")
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("reproduce", help="run the built-in reference experiment")
    p.add_argument("--runs", type=int, default=REFERENCE_RUNS)
    p.add_argument("--t", type=int, default=REFERENCE_T)
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("metrics", help="error metrics over a pairs file")
    p.add_argument("--pairs", required=True, help="two numeric columns: truth forecast")
    p.add_argument("--metrics", default=None, help=f"comma list from {','.join(METRIC_NAMES)}")
    _add_output_flags(p)
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (QrfError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
