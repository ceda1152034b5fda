"""Delimited output: time-series and scan CSVs, plus run summaries.

All files use '.' as the decimal separator and 17 significant digits so a
re-run with the same seed is byte-identical.  Comment lines prefixed with
'# ' carry the resolved scenario (in scenario-file syntax) and any notes.
"""

from __future__ import annotations

import math
from pathlib import Path

from .ensemble import (
    EnsembleResult,
    MetricEntry,
    ObservableUnavailableError,
    decoherence_metrics,
)

SERIES_COLUMNS = (
    "t",
    "re_f01",
    "im_f01",
    "abs_f01",
    "stderr_abs_f01",
    "rho00",
    "rho11",
    "stderr_rho00",
)


def fmt(x) -> str:
    """17-significant-digit, locale-independent float rendering."""
    return format(float(x), ".17g")


def write_series_csv(path, result: EnsembleResult, echo: str = "", comments=()) -> Path:
    """Write one ensemble time series; f01 columns stay blank when undefined."""
    path = Path(path)
    lines = [f"# {c}" for c in comments]
    lines.extend(f"# {ln}" for ln in echo.splitlines())
    lines.append(",".join(SERIES_COLUMNS))
    has_f01 = result.f01 is not None
    for i, t in enumerate(result.times):
        row = [fmt(t)]
        if has_f01:
            row += [
                fmt(result.f01[i].real),
                fmt(result.f01[i].imag),
                fmt(result.abs_f01[i]),
                fmt(result.stderr_abs_f01[i]),
            ]
        else:
            row += ["", "", "", ""]
        row += [fmt(result.rho00[i]), fmt(result.rho11[i]), fmt(result.stderr_rho00[i])]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_table_csv(path, columns, rows, comments=()) -> Path:
    """Write a small summary table (cells are pre-formatted strings)."""
    path = Path(path)
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def metric_cells(entry: MetricEntry):
    """(t_half, lambda, residual, status) cells of one metric entry."""
    t_half = fmt(entry.t_half) if entry.reached else ""
    rate = fmt(entry.decay_rate) if math.isfinite(entry.decay_rate) else ""
    status = "ok" if entry.reached else "not-reached"
    return t_half, rate, fmt(entry.residual), status


def summary_text(result: EnsembleResult, threshold: float = 0.5) -> str:
    """One-line human summary: decay metrics, or populations when f01 is undefined."""
    try:
        entry = decoherence_metrics(result, threshold=threshold)
    except ObservableUnavailableError:
        return (
            f"f01 unavailable (diagonal initial state); "
            f"rho00(T) = {result.rho00[-1]:.6g} "
            f"+/- {result.stderr_rho00[-1]:.2g}"
        )
    if entry.reached:
        head = f"t_half = {entry.t_half:.6g} s (+/- {entry.t_half_stderr:.2g})"
    else:
        head = f"|f01| never dropped below {threshold:g}"
    rate = f"lambda = {entry.decay_rate:.6g} /s" if math.isfinite(entry.decay_rate) else "lambda = n/a"
    return f"{head}; {rate}; residual |f01(T)| = {entry.residual:.6g}"
