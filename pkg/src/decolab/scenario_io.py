"""Flat key = value scenario files: parsing, validation and echo.

The format is line oriented: one ``key = value`` pair per line, ``#``
starts a comment, blank lines are ignored.  Unknown or duplicate keys are
rejected with the offending line number.  ``scenario_echo`` renders a
Scenario back into this format with every default resolved, and parsing
that echo reproduces the scenario exactly.
"""

from __future__ import annotations

import numpy as np

from . import qmat
from .ensemble import (
    Scenario,
    default_dd_axis,
    default_kondo_axis,
)
from .model import DDParams, KickParams, KondoParams, ModelParams

PLUS_STATE = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
ZERO_STATE = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
THERMAL_Z_STATE = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)

NAMED_SYSTEM_STATES = {"plus": PLUS_STATE, "zero": ZERO_STATE}
# thermal-z first: it is the documented default and aliases the same
# matrix as "zero" (the pseudo-pure convention taken literally)
NAMED_ENV_STATES = {"thermal-z": THERMAL_Z_STATE, "zero": ZERO_STATE}

SCENARIO_KEYS = (
    "coupling",
    "omega_half",
    "nu_s",
    "nu_e",
    "alpha",
    "gamma",
    "kondo",
    "kondo_delta_max",
    "kondo_gap_max",
    "dd_freq",
    "dd_axis",
    "dd_target",
    "rho_s0",
    "rho_e0",
    "T",
    "grid_points",
    "realizations",
    "seed",
)

SCAN_KEYS = ("scan_gammas", "scan_ps", "scan_dd_freqs")

DEFAULT_GRID_POINTS = 200
DEFAULT_REALIZATIONS = 500
DEFAULT_SEED = 1


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate."""


def _tokenize(text: str, allowed) -> dict:
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise ScenarioError(f"line {lineno}: unknown key '{key}'")
        if key in entries:
            raise ScenarioError(f"line {lineno}: duplicate key '{key}'")
        if not value:
            raise ScenarioError(f"line {lineno}: key '{key}' has no value")
        entries[key] = (value, lineno)
    return entries


def _take(entries, key, default=None, required=False):
    if key in entries:
        return entries.pop(key)
    if required:
        raise ScenarioError(f"missing required key '{key}'")
    return (default, None)


def _parse_float(key, value, lineno):
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"line {lineno}: key '{key}': unparsable number {value!r}") from None


def _parse_int(key, value, lineno):
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"line {lineno}: key '{key}': unparsable integer {value!r}") from None


def _parse_state(key, value, lineno, named):
    token = value.strip()
    if token in named:
        return named[token].copy()
    parts = token.split()
    if parts and parts[0] == "custom":
        if len(parts) != 5:
            raise ScenarioError(
                f"line {lineno}: key '{key}': custom state needs 4 complex entries "
                f"(row-major), got {len(parts) - 1}"
            )
        try:
            vals = [complex(p) for p in parts[1:]]
        except ValueError:
            raise ScenarioError(
                f"line {lineno}: key '{key}': unparsable complex entry in {value!r}"
            ) from None
        mat = np.array(vals, dtype=complex).reshape(2, 2)
    else:
        names = ", ".join(sorted(named))
        raise ScenarioError(
            f"line {lineno}: key '{key}': expected one of {names} or 'custom a b c d', "
            f"got {value!r}"
        )
    try:
        return qmat.validate_density(mat, key)
    except qmat.MatrixInvariantError as exc:
        raise ScenarioError(f"line {lineno}: key '{key}': {exc}") from None


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario document into a fully resolved Scenario."""
    entries = _tokenize(text, SCENARIO_KEYS)
    return _build_scenario(entries)


def _build_scenario(entries: dict) -> Scenario:
    value, lineno = _take(entries, "coupling", required=True)
    coupling = value.lower()
    if coupling not in ("zz", "xx"):
        raise ScenarioError(f"line {lineno}: coupling must be 'zz' or 'xx', got {value!r}")

    value, lineno = _take(entries, "omega_half", required=True)
    omega_half = _parse_float("omega_half", value, lineno)
    if omega_half <= 0:
        raise ScenarioError(f"line {lineno}: omega_half must be positive")

    shifts = {}
    for key in ("nu_s", "nu_e"):
        value, lineno = _take(entries, key)
        shifts[key] = 0.0 if value is None else _parse_float(key, value, lineno)

    model = ModelParams(
        omega_half=omega_half, coupling=coupling, nu_s=shifts["nu_s"], nu_e=shifts["nu_e"]
    )

    value, lineno = _take(entries, "T", required=True)
    horizon = _parse_float("T", value, lineno)
    if horizon <= 0:
        raise ScenarioError(f"line {lineno}: T must be positive")

    alpha_val, alpha_line = _take(entries, "alpha")
    gamma_val, gamma_line = _take(entries, "gamma")
    kicks = None
    if (alpha_val is None) != (gamma_val is None):
        missing = "gamma" if gamma_val is None else "alpha"
        raise ScenarioError(f"missing required key '{missing}' (kicks need both alpha and gamma)")
    if alpha_val is not None:
        alpha = _parse_float("alpha", alpha_val, alpha_line)
        gamma = _parse_float("gamma", gamma_val, gamma_line)
        if alpha < 0:
            raise ScenarioError(f"line {alpha_line}: alpha must be non-negative")
        if gamma <= 0:
            raise ScenarioError(f"line {gamma_line}: gamma must be positive")
        kicks = KickParams(alpha=alpha, gamma=gamma)

    value, lineno = _take(entries, "kondo", default="off")
    token = value.lower()
    if token not in ("on", "off"):
        raise ScenarioError(f"line {lineno}: kondo must be 'on' or 'off', got {value!r}")
    kondo_on = token == "on"

    value, lineno = _take(entries, "kondo_delta_max")
    delta_max = 1.0 / omega_half if value is None else _parse_float("kondo_delta_max", value, lineno)
    if delta_max <= 0:
        raise ScenarioError(f"line {lineno}: kondo_delta_max must be positive")
    value, lineno = _take(entries, "kondo_gap_max")
    gap_max = delta_max if value is None else _parse_float("kondo_gap_max", value, lineno)
    if gap_max < 0:
        raise ScenarioError(f"line {lineno}: kondo_gap_max must be non-negative")
    kondo = None
    if kondo_on:
        kondo = KondoParams(
            delta_max=delta_max,
            gap_max=gap_max,
            target="E",
            axis=default_kondo_axis(coupling),
        )

    value, lineno = _take(entries, "dd_freq", default="0")
    dd_freq = _parse_float("dd_freq", value, lineno)
    if dd_freq < 0:
        raise ScenarioError(f"line {lineno}: dd_freq must be >= 0 (0 disables decoupling)")
    value, lineno = _take(entries, "dd_axis")
    dd_axis = default_dd_axis(coupling) if value is None else value.lower()
    if dd_axis not in ("x", "y", "z"):
        raise ScenarioError(f"line {lineno}: dd_axis must be x, y or z, got {value!r}")
    value, lineno = _take(entries, "dd_target", default="s")
    dd_target = value.lower()
    if dd_target not in ("s", "e"):
        raise ScenarioError(f"line {lineno}: dd_target must be 's' or 'e', got {value!r}")
    dd = None
    if dd_freq > 0:
        dd = DDParams(freq=dd_freq, target=dd_target.upper(), axis=dd_axis)

    value, lineno = _take(entries, "rho_s0", default="plus")
    rho_s0 = _parse_state("rho_s0", value, lineno, NAMED_SYSTEM_STATES)
    value, lineno = _take(entries, "rho_e0", default="thermal-z")
    rho_e0 = _parse_state("rho_e0", value, lineno, NAMED_ENV_STATES)

    value, lineno = _take(entries, "grid_points")
    grid_points = DEFAULT_GRID_POINTS if value is None else _parse_int("grid_points", value, lineno)
    if grid_points < 2:
        raise ScenarioError(f"line {lineno}: grid_points must be >= 2")

    value, lineno = _take(entries, "realizations")
    realizations = (
        DEFAULT_REALIZATIONS if value is None else _parse_int("realizations", value, lineno)
    )
    if realizations < 1:
        raise ScenarioError(f"line {lineno}: realizations must be >= 1")

    value, lineno = _take(entries, "seed")
    seed = DEFAULT_SEED if value is None else _parse_int("seed", value, lineno)
    if not 0 <= seed < 2**64:
        raise ScenarioError(f"line {lineno}: seed must be a 64-bit unsigned integer")

    assert not entries, f"unconsumed keys: {sorted(entries)}"
    grid = np.linspace(0.0, horizon, grid_points)
    return Scenario(
        model=model,
        rho_s0=rho_s0,
        rho_e0=rho_e0,
        horizon=horizon,
        grid=grid,
        realizations=realizations,
        seed=seed,
        kicks=kicks,
        kondo=kondo,
        dd=dd,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_state(mat: np.ndarray, named: dict) -> str:
    for name, ref in named.items():
        if np.array_equal(mat, ref):
            return name
    flat = mat.reshape(-1)
    parts = [f"{z.real:.17g}{z.imag:+.17g}j" for z in flat]
    return "custom " + " ".join(parts)


def scenario_echo(scenario: Scenario) -> str:
    """Render a Scenario as a parseable key = value document, defaults resolved."""
    lines = [
        f"coupling = {scenario.model.coupling}",
        f"omega_half = {_fmt(scenario.model.omega_half)}",
        f"nu_s = {_fmt(scenario.model.nu_s)}",
        f"nu_e = {_fmt(scenario.model.nu_e)}",
    ]
    if scenario.kicks is not None:
        lines.append(f"alpha = {_fmt(scenario.kicks.alpha)}")
        lines.append(f"gamma = {_fmt(scenario.kicks.gamma)}")
    if scenario.kondo is not None:
        lines.append("kondo = on")
        lines.append(f"kondo_delta_max = {_fmt(scenario.kondo.delta_max)}")
        lines.append(f"kondo_gap_max = {_fmt(scenario.kondo.gap_max)}")
    else:
        lines.append("kondo = off")
    if scenario.dd is not None:
        lines.append(f"dd_freq = {_fmt(scenario.dd.freq)}")
        lines.append(f"dd_axis = {scenario.dd.axis}")
        lines.append(f"dd_target = {scenario.dd.target.lower()}")
    else:
        lines.append("dd_freq = 0")
    lines.append(f"rho_s0 = {_fmt_state(scenario.rho_s0, NAMED_SYSTEM_STATES)}")
    lines.append(f"rho_e0 = {_fmt_state(scenario.rho_e0, NAMED_ENV_STATES)}")
    lines.append(f"T = {_fmt(scenario.horizon)}")
    lines.append(f"grid_points = {scenario.grid.size}")
    lines.append(f"realizations = {scenario.realizations}")
    lines.append(f"seed = {scenario.seed}")
    return "\n".join(lines)


def _parse_values(key, value, lineno, cast):
    token = value.strip()
    if ":" in token:
        parts = token.split(":")
        if len(parts) != 3:
            raise ScenarioError(f"line {lineno}: key '{key}': ranges are start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ScenarioError(f"line {lineno}: key '{key}': unparsable range {value!r}") from None
        if step <= 0:
            raise ScenarioError(f"line {lineno}: key '{key}': range step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(max(count, 0))]
    else:
        try:
            values = [float(p) for p in token.split(",") if p.strip()]
        except ValueError:
            raise ScenarioError(f"line {lineno}: key '{key}': unparsable list {value!r}") from None
    if not values:
        raise ScenarioError(f"line {lineno}: key '{key}': empty value list")
    return [cast(v) for v in values]


def parse_scan_config(kind: str, text: str):
    """Parse a scan document: a scenario plus the scan_* key for ``kind``.

    Returns (scenario, values) where values are kick rates (gamma-scan),
    integer ratios p (integer-check) or decoupling frequencies
    (strategy-compare).
    """
    entries = _tokenize(text, SCENARIO_KEYS + SCAN_KEYS)
    scan_entries = {k: entries.pop(k) for k in SCAN_KEYS if k in entries}
    scenario = _build_scenario(entries)

    if kind == "gamma-scan":
        if "scan_gammas" not in scan_entries:
            raise ScenarioError("missing required key 'scan_gammas'")
        value, lineno = scan_entries["scan_gammas"]
        values = _parse_values("scan_gammas", value, lineno, float)
    elif kind == "integer-check":
        if "scan_ps" in scan_entries:
            value, lineno = scan_entries["scan_ps"]
            values = _parse_values("scan_ps", value, lineno, int)
            if any(p < 1 for p in values):
                raise ScenarioError(f"line {lineno}: scan_ps entries must be >= 1")
        else:
            values = [1, 2, 3]
    elif kind == "strategy-compare":
        if "scan_dd_freqs" in scan_entries:
            value, lineno = scan_entries["scan_dd_freqs"]
            values = _parse_values("scan_dd_freqs", value, lineno, float)
        else:
            values = [7.6]
    else:
        raise ScenarioError(f"unknown scan kind {kind!r}")
    return scenario, values
