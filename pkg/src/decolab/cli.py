"""Command-line front end: run scenarios, reproduce figures, run scans."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .ensemble import (
    ObservableUnavailableError,
    average,
    compare_strategies,
    decoherence_metrics,
    derive_seed,
    kick_rate_scan,
)
from .figures import DEFAULT_SEED, FIGURE_IDS, reproduce_figure
from .report import fmt, metric_cells, summary_text, write_series_csv, write_table_csv
from .scenario_io import ScenarioError, parse_scan_config, parse_scenario, scenario_echo

SCAN_KINDS = ("gamma-scan", "integer-check", "strategy-compare")
INTEGER_CHECK_RESIDUAL = 0.999


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decolab",
        description="Two-qubit engineered-decoherence simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file, write a CSV time series")
    p_run.add_argument("scenario", help="scenario file (key = value lines)")
    p_run.add_argument("-o", "--output", required=True, help="output CSV path")
    p_run.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p_run.add_argument("--plot", action="store_true", help="also render <output>.png")

    p_fig = sub.add_parser("figure", help="reproduce a built-in figure's data")
    p_fig.add_argument("id", choices=FIGURE_IDS, help="figure identifier")
    p_fig.add_argument("-o", "--output", required=True, help="output directory")
    p_fig.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_fig.add_argument("--realizations", type=int, default=500)
    p_fig.add_argument("--horizon", type=float, default=None, help="override the time horizon (s)")
    p_fig.add_argument("--workers", type=int, default=1)
    p_fig.add_argument("--no-plot", action="store_true", help="skip the rendered image")

    p_scan = sub.add_parser("scan", help="parameter scans and strategy comparisons")
    p_scan.add_argument("kind", choices=SCAN_KINDS)
    p_scan.add_argument("config", help="scenario file, plus scan_* keys")
    p_scan.add_argument("-o", "--output", required=True, help="output CSV path")
    p_scan.add_argument("--workers", type=int, default=1)
    p_scan.add_argument("--no-plot", action="store_true", help="skip the rendered image")
    return parser


def _cmd_run(args) -> int:
    text = Path(args.scenario).read_text(encoding="utf-8")
    scenario = parse_scenario(text)
    result = average(scenario, workers=args.workers)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_series_csv(out, result, echo=scenario_echo(scenario), comments=("decolab run",))
    if args.plot:
        from . import plotting

        if result.abs_f01 is not None:
            curves = [("|f01|", result.times, result.abs_f01, result.stderr_abs_f01)]
            ylabel = "|f01(t)|"
        else:
            curves = [("rho00", result.times, result.rho00, result.stderr_rho00)]
            ylabel = "rho00(t)"
        plotting.save_curves(out.with_suffix(".png"), curves, ylabel=ylabel, title=out.stem)
    print(f"{out}: {summary_text(result)}")
    return 0


def _cmd_figure(args) -> int:
    produced = reproduce_figure(
        args.id,
        args.output,
        seed=args.seed,
        realizations=args.realizations,
        horizon=args.horizon,
        workers=args.workers,
        plot=not args.no_plot,
    )
    for label, path, summary in produced:
        print(f"{path} [{label}]: {summary}")
    return 0


def _scan_gamma(scenario, gammas, args, out):
    scan = kick_rate_scan(scenario, gammas, workers=args.workers)
    rows = []
    for entry in scan.entries:
        t_half, rate, residual, status = metric_cells(entry)
        rows.append([fmt(entry.parameter), t_half, rate, residual, status])
    write_table_csv(
        out,
        ("gamma", "t_half", "lambda", "residual", "status"),
        rows,
        comments=("decolab scan gamma-scan",) + tuple(scenario_echo(scenario).splitlines()),
    )
    if not args.no_plot:
        from . import plotting

        plotting.save_scan(out.with_suffix(".png"), "gamma (kicks/s)", gammas,
                           scan.entries, title="kick-rate scan")
    for entry in scan.entries:
        status = f"t_half = {entry.t_half:.6g} s" if entry.reached else "threshold not reached"
        print(f"gamma = {entry.parameter:g}: {status}, residual = {entry.residual:.6g}")
    return 0


def _scan_integer(scenario, ps, args, out):
    rows = []
    entries = []
    for i, p in enumerate(ps):
        gamma = scenario.model.omega_half / p
        variant = replace(
            scenario,
            kicks=replace(scenario.kicks, gamma=gamma),
            kondo=None,
            dd=None,
            seed=derive_seed(scenario.seed, i),
        )
        result = average(variant, workers=args.workers)
        entry = decoherence_metrics(result, parameter=p)
        entries.append(entry)
        t_half, rate, residual, _ = metric_cells(entry)
        verdict = "pass" if entry.residual >= INTEGER_CHECK_RESIDUAL else "fail"
        rows.append([str(p), fmt(gamma), t_half, rate, residual, verdict])
        print(f"p = {p} (gamma = {gamma:g}): residual = {entry.residual:.9g} -> {verdict}")
    write_table_csv(
        out,
        ("p", "gamma", "t_half", "lambda", "residual", "pass"),
        rows,
        comments=("decolab scan integer-check",) + tuple(scenario_echo(scenario).splitlines()),
    )
    if not args.no_plot:
        from . import plotting

        plotting.save_scan(out.with_suffix(".png"), "integer ratio p", list(ps),
                           entries, title="integer-ratio check")
    return 0


def _scan_strategies(scenario, dd_freqs, args, out):
    entries = compare_strategies(scenario, dd_freqs, workers=args.workers)
    rows = []
    curves = []
    for entry in entries:
        if entry.metrics is not None:
            t_half, rate, residual, status = metric_cells(entry.metrics)
        else:
            t_half = rate = residual = ""
            status = "f01-unavailable"
        rows.append([entry.label, t_half, rate, residual, status])
        result = entry.result
        if result.abs_f01 is not None:
            curves.append((entry.label, result.times, result.abs_f01, result.stderr_abs_f01))
        else:
            curves.append((entry.label, result.times, result.rho00, result.stderr_rho00))
        print(f"{entry.label}: " + (summary_text(result)))
    write_table_csv(
        out,
        ("strategy", "t_half", "lambda", "residual", "status"),
        rows,
        comments=("decolab scan strategy-compare",) + tuple(scenario_echo(scenario).splitlines()),
    )
    if not args.no_plot:
        from . import plotting

        ylabel = "|f01(t)|" if entries[0].result.abs_f01 is not None else "rho00(t)"
        plotting.save_curves(out.with_suffix(".png"), curves, ylabel=ylabel,
                             title="strategy comparison")
    return 0


def _cmd_scan(args) -> int:
    text = Path(args.config).read_text(encoding="utf-8")
    scenario, values = parse_scan_config(args.kind, text)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "gamma-scan":
        return _scan_gamma(scenario, values, args, out)
    if args.kind == "integer-check":
        return _scan_integer(scenario, values, args, out)
    return _scan_strategies(scenario, values, args, out)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "figure":
            return _cmd_figure(args)
        return _cmd_scan(args)
    except (ScenarioError, ObservableUnavailableError, ValueError, OSError) as exc:
        print(f"decolab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
