"""Monte Carlo ensembles: averaging, observables, metrics and scans.

A Scenario bundles the model, the noise processes, the initial states and
the sampling plan.  ``average`` runs the requested number of independent
realizations and reduces them in fixed index order, so results are
bitwise reproducible for a given seed regardless of the worker count.

Random streams: realization r draws its kick angles from the stream
(seed, r, 0) and its pulse-pair delays from (seed, r, 1).  Keeping the
channels separate means strategies that differ only in deterministic
events (or in the presence of the pulse pairs) share identical kick
realizations, which sharpens strategy comparisons.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import qmat
from .model import (
    DDParams,
    KickParams,
    KondoParams,
    ModelParams,
    Trajectory,
    dd_timeline,
    run_realization,
    sample_kick_timeline,
    sample_kondo_timeline,
)

KICK_STREAM = 0
KONDO_STREAM = 1

F01_CUTOFF = 1e-12


class ObservableUnavailableError(ValueError):
    """Requested an observable the scenario cannot define."""


def default_kondo_axis(coupling: str) -> str:
    """Pulse axis that flips E between the conditional branches of the coupling."""
    return "x" if coupling == "zz" else "z"


def default_dd_axis(coupling: str) -> str:
    """Pulse axis on S that anticommutes with the system side of the coupling."""
    return "x" if coupling == "zz" else "z"


def default_kondo_params(model: ModelParams) -> KondoParams:
    """Pulse-pair process whose per-pair phase sweeps a full turn."""
    if model.omega_half <= 0:
        raise ValueError("pulse-pair defaults require a positive coupling strength")
    delta_max = 1.0 / model.omega_half
    return KondoParams(
        delta_max=delta_max,
        gap_max=delta_max,
        target="E",
        axis=default_kondo_axis(model.coupling),
    )


def kick_aligned_grid(gamma: float, horizon: float) -> np.ndarray:
    """t = 0 plus the kick instants of rate ``gamma`` on [0, horizon].

    The stroboscopic frame of the kick sequencer: between kicks the
    conditional phase sweeps a near-full turn, so observables sampled off
    this grid show a fast collapse/revival comb once pulses have flipped
    part of the ensemble, while the decay envelopes and the near-resonant
    slow oscillation live on the grid itself.
    """
    span = gamma * horizon
    if span < 1.0:
        raise ValueError(f"gamma*T = {span:.3g} < 1: no kick grid on this horizon")
    n = int(math.floor(span + 0.5))
    return np.concatenate(([0.0], np.linspace(horizon / n, horizon, n)))


@dataclass(frozen=True, eq=False)
class Scenario:
    """Full experiment description.

    For xx coupling ``rho_s0`` is interpreted in the |+/-> frame (the
    working frame of that model) and is moved to the computational basis
    before propagation; ``rho_e0`` is always computational.
    """

    model: ModelParams
    rho_s0: np.ndarray
    rho_e0: np.ndarray
    horizon: float
    grid: np.ndarray
    realizations: int
    seed: int
    kicks: KickParams | None = None
    kondo: KondoParams | None = None
    dd: DDParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho_s0", qmat.validate_density(self.rho_s0, "rho_s0"))
        object.__setattr__(self, "rho_e0", qmat.validate_density(self.rho_e0, "rho_e0"))
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a non-empty 1-d array")
        if np.any(np.diff(grid) < 0) or grid[0] < 0 or grid[-1] > self.horizon + 1e-12:
            raise ValueError("grid must be sorted within [0, horizon]")
        object.__setattr__(self, "grid", grid)
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def system_initial_state(scenario: Scenario) -> np.ndarray:
    """Computational-basis initial system state."""
    if scenario.model.coupling == "xx":
        return qmat.hadamard_frame(scenario.rho_s0)
    return scenario.rho_s0


def realization_rng(seed: int, realization: int, channel: int) -> np.random.Generator:
    """Independent stream for (seed, realization, channel), scheduling-free."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(realization, channel))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, index: int) -> int:
    """Fresh 64-bit seed deterministically derived from (seed, index)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def build_timelines(scenario: Scenario, realization: int) -> list:
    """All noise/control timelines of one realization.

    With kicks present, the pulse-pair process fires on the kick
    sequencer's clock (drawn times snap to kick instants); without kicks
    the pulse times are continuous.
    """
    timelines = []
    clock = None
    if scenario.kicks is not None:
        rng = realization_rng(scenario.seed, realization, KICK_STREAM)
        kick_tl = sample_kick_timeline(scenario.kicks, scenario.horizon, rng)
        timelines.append(kick_tl)
        clock = np.concatenate(([0.0], [ev.time for ev in kick_tl.events]))
    if scenario.kondo is not None:
        rng = realization_rng(scenario.seed, realization, KONDO_STREAM)
        timelines.append(
            sample_kondo_timeline(scenario.kondo, scenario.horizon, rng, clock=clock)
        )
    if scenario.dd is not None:
        timelines.append(dd_timeline(scenario.dd, scenario.horizon))
    return timelines


def run_single(scenario: Scenario, realization: int) -> Trajectory:
    """Propagate one realization of the scenario."""
    return run_realization(
        scenario.model,
        build_timelines(scenario, realization),
        system_initial_state(scenario),
        scenario.rho_e0,
        scenario.grid,
        scenario.horizon,
    )


def _run_block(args) -> np.ndarray:
    scenario, lo, hi = args
    return np.stack([run_single(scenario, r).states for r in range(lo, hi)])


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Ensemble-averaged system states and derived observables.

    ``f01`` (and its companions) are None when the initial system state has
    no off-diagonal coherence in the computational basis; per-realization
    samples are kept for statistical checks.
    """

    times: np.ndarray
    mean_rho: np.ndarray
    rho00: np.ndarray
    rho11: np.ndarray
    stderr_rho00: np.ndarray
    rho00_samples: np.ndarray
    realizations: int
    f01: np.ndarray | None = None
    abs_f01: np.ndarray | None = None
    stderr_abs_f01: np.ndarray | None = None
    f01_samples: np.ndarray | None = None

    def require_f01(self):
        """abs_f01 with an explicit error when the observable is undefined."""
        if self.abs_f01 is None:
            raise ObservableUnavailableError(
                "observable unavailable: initial system state is diagonal, "
                "so the decoherence factor f01 is undefined"
            )
        return self.abs_f01


def _check_result(result: EnsembleResult):
    if np.any(result.rho00 + result.rho11 - 1.0 > 1e-9):
        raise qmat.MatrixInvariantError("ensemble populations do not sum to 1")
    if result.abs_f01 is not None and np.any(result.abs_f01 > 1.0 + 1e-6):
        raise qmat.MatrixInvariantError("ensemble |f01| exceeds 1 beyond tolerance")


def average(scenario: Scenario, workers: int = 1) -> EnsembleResult:
    """Mean system state over all realizations, with standard errors.

    Realizations are independent work units; with workers > 1 they are
    distributed over processes in contiguous index blocks and concatenated
    in index order, so the result does not depend on the worker count.
    """
    n_real = scenario.realizations
    if workers > 1 and n_real > 1:
        n_workers = min(workers, n_real)
        bounds = np.linspace(0, n_real, n_workers + 1).astype(int)
        jobs = [
            (scenario, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
        states = np.concatenate(blocks, axis=0)
    else:
        states = _run_block((scenario, 0, n_real))

    mean_rho = states.mean(axis=0)
    rho00_samples = states[:, :, 0, 0].real
    rho00 = mean_rho[:, 0, 0].real
    rho11 = mean_rho[:, 1, 1].real
    if n_real > 1:
        stderr_rho00 = rho00_samples.std(axis=0, ddof=1) / math.sqrt(n_real)
    else:
        stderr_rho00 = np.zeros_like(rho00)

    rho01_initial = complex(system_initial_state(scenario)[0, 1])
    f01 = abs_f01 = stderr_abs = f01_samples = None
    if abs(rho01_initial) > F01_CUTOFF:
        f01_samples = states[:, :, 0, 1] / rho01_initial
        f01 = f01_samples.mean(axis=0)
        abs_f01 = np.abs(f01)
        if n_real > 1:
            # delta-method standard error of |mean|: spread of the samples
            # projected on the direction of the mean
            unit = np.where(abs_f01 > 0, f01, 1.0) / np.where(abs_f01 > 0, abs_f01, 1.0)
            proj = (f01_samples * np.conj(unit)).real
            stderr_abs = proj.std(axis=0, ddof=1) / math.sqrt(n_real)
        else:
            stderr_abs = np.zeros_like(abs_f01)

    result = EnsembleResult(
        times=scenario.grid.copy(),
        mean_rho=mean_rho,
        rho00=rho00,
        rho11=rho11,
        stderr_rho00=stderr_rho00,
        rho00_samples=rho00_samples,
        realizations=n_real,
        f01=f01,
        abs_f01=abs_f01,
        stderr_abs_f01=stderr_abs,
        f01_samples=f01_samples,
    )
    _check_result(result)
    return result


@dataclass(frozen=True)
class MetricEntry:
    """Decay metrics of one |f01| curve (or one scan point)."""

    parameter: object
    t_half: float
    t_half_stderr: float
    decay_rate: float
    residual: float
    reached: bool


@dataclass(frozen=True)
class ScanResult:
    """Metric entries of a parameter scan, in scan order."""

    parameter_name: str
    entries: tuple


def decoherence_metrics(
    result: EnsembleResult,
    threshold: float = 0.5,
    parameter: object = None,
) -> MetricEntry:
    """Time-to-threshold and fitted decay rate of the |f01| curve.

    t_half is the first crossing of ``threshold``, linearly interpolated
    between grid points, with a delta-method standard error (|f01| error
    at the crossing divided by the local slope).  The decay rate comes
    from a least-squares line through log|f01| over the window before the
    crossing (the whole window when the threshold is never reached); it is
    NaN when fewer than 3 usable points exist.
    """
    abs_f01 = result.require_f01()
    times = result.times
    stderr = result.stderr_abs_f01

    below = np.nonzero(abs_f01 < threshold)[0]
    if below.size == 0:
        reached = False
        t_half = math.nan
        t_half_stderr = math.nan
        window = slice(None)
    else:
        reached = True
        i = int(below[0])
        if i == 0:
            t_half = float(times[0])
            t_half_stderr = math.nan
        else:
            run = (abs_f01[i] - abs_f01[i - 1]) / (times[i] - times[i - 1])
            t_half = float(times[i - 1] + (threshold - abs_f01[i - 1]) / run)
            frac = (t_half - times[i - 1]) / (times[i] - times[i - 1])
            se_here = (1 - frac) * stderr[i - 1] + frac * stderr[i]
            t_half_stderr = float(se_here / abs(run)) if run != 0 else math.inf
        window = slice(0, i + 1)

    t_fit = times[window]
    a_fit = abs_f01[window]
    usable = a_fit > 0
    if np.count_nonzero(usable) >= 3:
        slope = np.polyfit(t_fit[usable], np.log(a_fit[usable]), 1)[0]
        decay_rate = float(-slope)
    else:
        decay_rate = math.nan

    return MetricEntry(
        parameter=parameter,
        t_half=t_half,
        t_half_stderr=t_half_stderr,
        decay_rate=decay_rate,
        residual=float(abs_f01[-1]),
        reached=reached,
    )


def kick_rate_scan(base: Scenario, gammas, workers: int = 1) -> ScanResult:
    """Decay metrics versus kick rate, one fresh-seeded run per rate.

    Each run samples on its own kick-aligned grid so the metrics track the
    stroboscopic envelope rather than the intra-interval comb.
    """
    if base.kicks is None:
        raise ValueError("kick rate scan requires kicks in the base scenario")
    if len(gammas) == 0:
        raise ValueError("kick rate scan needs at least one rate")
    entries = []
    for i, gamma in enumerate(gammas):
        scenario = replace(
            base,
            kicks=KickParams(alpha=base.kicks.alpha, gamma=float(gamma)),
            grid=kick_aligned_grid(float(gamma), base.horizon),
            seed=derive_seed(base.seed, i),
        )
        result = average(scenario, workers=workers)
        entries.append(decoherence_metrics(result, parameter=float(gamma)))
    return ScanResult(parameter_name="gamma", entries=tuple(entries))


@dataclass(frozen=True, eq=False)
class StrategyEntry:
    """One strategy of a comparison run: label, full result, metrics."""

    label: str
    scenario: Scenario
    result: EnsembleResult
    metrics: MetricEntry | None


def compare_strategies(base: Scenario, dd_freqs, workers: int = 1) -> list:
    """Kicks-only vs kicks+DD (per frequency) vs kicks+randomized pairs.

    All strategies share the base seed, hence identical kick realizations,
    and all sample on the kick-aligned grid; metrics are attached where
    the decoherence factor is defined.
    """
    if base.kicks is None:
        raise ValueError("strategy comparison requires kicks in the base scenario")
    base = replace(base, grid=kick_aligned_grid(base.kicks.gamma, base.horizon))
    variants = [("kicks-only", replace(base, kondo=None, dd=None))]
    for freq in dd_freqs:
        dd = DDParams(
            freq=float(freq), target="S", axis=default_dd_axis(base.model.coupling)
        )
        label = f"kicks+dd@{freq:g}Hz"
        variants.append((label, replace(base, kondo=None, dd=dd)))
    kondo = base.kondo if base.kondo is not None else default_kondo_params(base.model)
    variants.append(("kicks+kondo", replace(base, kondo=kondo, dd=None)))

    entries = []
    for label, scenario in variants:
        result = average(scenario, workers=workers)
        metrics = None
        if result.abs_f01 is not None:
            metrics = decoherence_metrics(result, parameter=label)
        entries.append(StrategyEntry(label, scenario, result, metrics))
    return entries


def population_observables(result: EnsembleResult):
    """(times, rho00, rho11) series of the ensemble mean."""
    return result.times, result.rho00, result.rho11


def time_to_band(result: EnsembleResult, center: float = 0.5, halfwidth: float = 0.05) -> float:
    """First grid time where rho00 enters [center - halfwidth, center + halfwidth]."""
    inside = np.nonzero(np.abs(result.rho00 - center) <= halfwidth)[0]
    if inside.size == 0:
        return math.nan
    return float(result.times[int(inside[0])])
