"""Command-line front end.

Subcommands::

    missing-mass estimate FILE [--format F] [--delta D] [--variant V] [--json]
    missing-mass bias-table [--s ...] [--n ...] [--n-features N] [--json]
    missing-mass zipf-bench [--s ...] [--n ...] [--reps R] [--seed S] [--json]
    missing-mass stop (FILE | --zipf S) --cost C [--utility H] [--n-max N] [--json]

Human-readable tables go to standard output by default; ``--json`` prints a
single JSON document instead.  Errors exit with the ``exit_code`` of their
class (see :mod:`missing_mass.errors`); ``stop`` exits with
:data:`EXIT_NOT_STOPPED` when the rule never fired within ``--n-max``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .confidence import Variant, confidence_interval
from .errors import MissingMassError, ParseError
from .estimators import check_delta, good_turing, w_bounds, w_hat
from .formats import FORMATS, detect_format, read_incidence, stream_feature_list
from .oracle import exact_bias, exact_risk
from .simulate import (
    DEFAULT_SEED,
    ExperimentConfig,
    PopulationSpec,
    default_workers,
    replicate_rng,
    risk_experiment,
    zipf_population,
)
from .spectrum import build_spectrum
from .stopping import StoppingOutcome, UtilitySpec, replay_source, simulated_stopping_time, stopping_time

EXIT_NOT_STOPPED = 20
EXIT_IO = 14

DEFAULT_S = (0.6, 0.8, 1.0, 1.2, 1.4, 1.6)
DEFAULT_BIAS_N = (10, 50, 100, 1000)
DEFAULT_BENCH_N = (50, 250, 1000)
DEFAULT_N_FEATURES = 100_000


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


# estimate


def estimate_report(matrix, delta: float = 0.05, variant="theorem") -> dict:
    """Report record for an in-memory sample matrix.

    Keys are fixed: ``n, K_n, K_n1, K_n2, M_hat, CI, W_hat, W_bounds``, plus
    ``warning`` only when ``n < 3`` and the interval is omitted.
    """
    delta = check_delta(delta)
    variant = Variant(variant)
    spec = build_spectrum(matrix)
    wb = w_bounds(spec, delta)
    record = {
        "n": spec.n,
        "K_n": spec.k_total,
        "K_n1": spec.k1,
        "K_n2": spec.k2,
        "M_hat": good_turing(spec),
        "CI": None,
        "W_hat": w_hat(spec),
        "W_bounds": {"lower": wb.lower, "upper": wb.upper, "delta": delta},
    }
    if spec.n >= 3:
        ci = confidence_interval(spec, delta, variant)
        record["CI"] = {"lower": ci.lower, "upper": ci.upper, "delta": delta, "variant": variant.value}
    else:
        record["warning"] = f"confidence interval needs n >= 3; only the point estimate is reported for n={spec.n}"
    return record


def cmd_estimate(path, fmt: Optional[str] = None, delta: float = 0.05, variant="theorem", mapping=None) -> dict:
    """Read an incidence file and estimate its missing mass.

    ``mapping``, if given, is a path that receives the token-to-id table.
    """
    matrix = read_incidence(path, fmt)
    if mapping is not None:
        table = {label: i for i, label in enumerate(matrix.labels or ())}
        Path(mapping).write_text(_dumps(table), encoding="utf-8")
    return estimate_report(matrix, delta, variant)


def render_estimate(record: dict) -> str:
    rows = [
        ("samples n", record["n"]),
        ("distinct features K_n", record["K_n"]),
        ("singletons K_n1", record["K_n1"]),
        ("doubletons K_n2", record["K_n2"]),
        ("missing mass M_hat", f"{record['M_hat']:.6g}"),
    ]
    ci = record["CI"]
    if ci is not None:
        level = 100 * (1 - ci["delta"])
        rows.append((f"{level:g}% CI ({ci['variant']})", f"({ci['lower']:.6g}, {ci['upper']:.6g})"))
    rows.append(("total mass W_hat", f"{record['W_hat']:.6g}"))
    wb = record["W_bounds"]
    rows.append(("W lower / upper bound", f"{wb['lower']:.6g} / {wb['upper']:.6g}"))
    width = max(len(k) for k, _ in rows)
    lines = [f"{k:<{width}}  {v}" for k, v in rows]
    if "warning" in record:
        lines.append(f"warning: {record['warning']}")
    return "\n".join(lines) + "\n"


# bias-table


def cmd_bias_table(
    s_values: Sequence[float] = DEFAULT_S,
    n_values: Sequence[int] = DEFAULT_BIAS_N,
    n_features: int = DEFAULT_N_FEATURES,
) -> list:
    """Exact bias and squared-bias share of the risk on a Zipf grid, one record per cell."""
    rows = []
    for s in s_values:
        pop = zipf_population(s, n_features)
        for n in n_values:
            risk = exact_risk(pop, n)
            rows.append(
                {
                    "s": s,
                    "n": n,
                    "n_features": n_features,
                    "W": pop.w,
                    "bias": exact_bias(pop, n),
                    "variance": risk.variance,
                    "risk": risk.risk,
                    "bias_share_pct": risk.bias_share_pct,
                    "upper_bound": risk.upper_bound,
                    "minimax_lower": risk.minimax_lower,
                }
            )
    return rows


def _grid(rows, key, fmt) -> str:
    s_values = list(dict.fromkeys(r["s"] for r in rows))
    n_values = list(dict.fromkeys(r["n"] for r in rows))
    cell = {(r["s"], r["n"]): r[key] for r in rows}
    head = "s \\ n".ljust(8) + "".join(f"{n:>10}" for n in n_values)
    lines = [head]
    for s in s_values:
        lines.append(f"{s:<8g}" + "".join(f"{format(cell[s, n], fmt):>10}" for n in n_values))
    return "\n".join(lines)


def render_bias_table(rows: list) -> str:
    n_features = rows[0]["n_features"] if rows else DEFAULT_N_FEATURES
    return (
        f"bias of M_hat (Zipf, N={n_features})\n"
        + _grid(rows, "bias", ".3f")
        + "\n\nsquared bias as % of risk\n"
        + _grid(rows, "bias_share_pct", ".2f")
        + "\n"
    )


# zipf-bench


def cmd_zipf_bench(
    s_values: Sequence[float] = DEFAULT_S,
    n_values: Sequence[int] = DEFAULT_BENCH_N,
    reps: int = 100,
    delta: float = 0.05,
    seed: int = DEFAULT_SEED,
    variant="theorem",
    n_features: int = DEFAULT_N_FEATURES,
    workers: int = 1,
) -> list:
    """Monte Carlo summary per ``(s, n)`` cell: mean realised mass, mean estimate, mean interval."""
    out = []
    for s in s_values:
        for n in n_values:
            config = ExperimentConfig(
                population=PopulationSpec("zipf", s=s, n_features=n_features),
                n=n,
                reps=reps,
                delta=delta,
                seed=seed,
                variant=variant,
            )
            out.append(risk_experiment(config, workers).as_dict())
    return out


def _fmt_opt(x, spec=".2f"):
    return "-" if x is None else format(x, spec)


def render_zipf_bench(rows: list) -> str:
    head = f"{'s':>5} {'n':>6} {'M_n':>8} {'M_hat':>8} {'mean CI':>18} {'cover':>6} {'E M_n':>8} {'bias':>8}"
    lines = [head]
    for r in rows:
        ci = "-" if r["mean_lower"] is None else f"({r['mean_lower']:.2f}, {r['mean_upper']:.2f})"
        lines.append(
            f"{r['population']['s']:>5g} {r['n']:>6} {r['mean_missing_mass']:>8.2f} {r['mean_estimate']:>8.2f} "
            f"{ci:>18} {_fmt_opt(r['coverage']):>6} {r['expected_missing_mass']:>8.3f} {r['exact_bias']:>8.4f}"
        )
    if rows:
        r = rows[0]
        lines.append(f"reps={r['reps']} delta={r['delta']} seed={r['seed']} variant={r['variant']}")
    return "\n".join(lines) + "\n"


# stop


def cmd_stop(
    path=None,
    zipf: Optional[float] = None,
    utility="identity",
    cost: float = 1.0,
    n_max: int = 100_000,
    seed: int = DEFAULT_SEED,
    n_features: int = DEFAULT_N_FEATURES,
    fmt: Optional[str] = None,
) -> StoppingOutcome:
    """Run the stopping rule on a file (replayed in order) or on a simulated Zipf population."""
    h = utility if isinstance(utility, UtilitySpec) else UtilitySpec.parse(utility)
    if (path is None) == (zipf is None):
        raise MissingMassError("give exactly one of an input file or a Zipf exponent")
    if zipf is not None:
        pop = zipf_population(zipf, n_features)
        return simulated_stopping_time(pop, h, cost, n_max, replicate_rng(seed, 0))
    if detect_format(path, fmt) == "list":
        return stopping_time(stream_feature_list(path), h, cost, n_max)
    return stopping_time(replay_source(read_incidence(path, fmt)), h, cost, n_max)


def render_stop(outcome: StoppingOutcome, tail: int = 10) -> str:
    status = "stopped" if outcome.stopped else "n_max reached without stopping"
    lines = [f"n_star = {outcome.n_star} ({status})", f"{'n':>8} {'K_n':>8} {'K_n1':>8} {'M_hat':>10} {'gain':>10}"]
    for r in outcome.trajectory[-tail:]:
        lines.append(f"{r.n:>8} {r.k_total:>8} {r.k1:>8} {r.estimate:>10.4g} {r.gain:>10.4g}")
    return "\n".join(lines) + "\n"


# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print a JSON document instead of a table")


def _add_ci(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, default=0.05, help="1 - confidence level (default 0.05)")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="theorem", help="interval assembly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="missing-mass", description="Good-Turing missing mass for feature data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the missing mass of an incidence file")
    p.add_argument("input", help="incidence file")
    p.add_argument("--format", choices=FORMATS, default=None, help="file format (default: from the extension)")
    p.add_argument("--mapping", default=None, help="write the token-to-id table to this JSON file")
    _add_ci(p)
    _add_common(p)

    p = sub.add_parser("bias-table", help="exact bias and bias share of the risk on a Zipf grid")
    p.add_argument("--s", type=float, nargs="+", default=list(DEFAULT_S))
    p.add_argument("--n", type=int, nargs="+", default=list(DEFAULT_BIAS_N))
    p.add_argument("--n-features", type=int, default=DEFAULT_N_FEATURES)
    _add_common(p)

    p = sub.add_parser("zipf-bench", help="Monte Carlo benchmark on Zipf populations")
    p.add_argument("--s", type=float, nargs="+", default=list(DEFAULT_S))
    p.add_argument("--n", type=int, nargs="+", default=list(DEFAULT_BENCH_N))
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--n-features", type=int, default=DEFAULT_N_FEATURES)
    p.add_argument("--workers", type=int, default=None, help="processes (default: CPU count)")
    _add_ci(p)
    _add_common(p)

    p = sub.add_parser("stop", help="run the cost-per-sample stopping rule")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("input", nargs="?", default=None, help="incidence file, replayed in order")
    src.add_argument("--zipf", type=float, default=None, metavar="S", help="simulate a Zipf(S) population")
    p.add_argument("--format", choices=FORMATS, default=None)
    p.add_argument("--n-features", type=int, default=DEFAULT_N_FEATURES)
    p.add_argument("--utility", default="identity", help="identity, log1p, sqrt or power:GAMMA")
    p.add_argument("--cost", type=float, required=True, help="cost of one more sample")
    p.add_argument("--n-max", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"simulation seed (default {DEFAULT_SEED})")
    _add_common(p)
    return parser


def _run(args) -> tuple:
    if args.command == "estimate":
        record = cmd_estimate(args.input, args.format, args.delta, args.variant, args.mapping)
        return record, render_estimate(record), 0
    if args.command == "bias-table":
        rows = cmd_bias_table(args.s, args.n, args.n_features)
        return rows, render_bias_table(rows), 0
    if args.command == "zipf-bench":
        workers = args.workers or default_workers()
        rows = cmd_zipf_bench(
            args.s, args.n, args.reps, args.delta, args.seed, args.variant, args.n_features, workers
        )
        return rows, render_zipf_bench(rows), 0
    outcome = cmd_stop(
        args.input, args.zipf, args.utility, args.cost, args.n_max, args.seed, args.n_features, args.format
    )
    return outcome.as_dict(), render_stop(outcome), 0 if outcome.stopped else EXIT_NOT_STOPPED


def error_record(exc: Exception) -> dict:
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        record["kind"] = exc.kind
        record["line"] = exc.line
    return record


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, table, code = _run(args)
    except MissingMassError as exc:
        code = exc.exit_code
        payload, table = error_record(exc), None
    except OSError as exc:
        code = EXIT_IO
        payload, table = {"error": type(exc).__name__, "message": str(exc)}, None
    if table is None:
        if args.json:
            sys.stdout.write(_dumps(payload))
        else:
            sys.stderr.write(f"error: {payload['message']}\n")
        return code
    sys.stdout.write(_dumps(payload) if args.json else table)
    return code


if __name__ == "__main__":
    sys.exit(main())
