"""decolab: two-qubit engineered-decoherence simulator.

Dephasing (zz) and population-exchange (xx) system-environment models
driven by random kicks, temporally randomized pulse pairs and periodic
dynamical-decoupling trains, with ensemble Monte Carlo averaging and
deterministic analytic/quadrature oracles.
"""

from .ensemble import (
    EnsembleResult,
    MetricEntry,
    ObservableUnavailableError,
    ScanResult,
    Scenario,
    StrategyEntry,
    average,
    compare_strategies,
    decoherence_metrics,
    default_dd_axis,
    default_kondo_axis,
    default_kondo_params,
    derive_seed,
    kick_aligned_grid,
    kick_rate_scan,
    population_observables,
    run_single,
    system_initial_state,
    time_to_band,
)
from .model import (
    DDParams,
    KickParams,
    KondoParams,
    ModelParams,
    PulseEvent,
    Timeline,
    Trajectory,
    dd_timeline,
    free_propagator,
    hamiltonian,
    kick_operator,
    pi_pulse,
    run_realization,
    sample_kick_timeline,
    sample_kondo_timeline,
)
from .oracle import (
    XXState,
    ZurekEnvironment,
    kick_average_quadrature,
    kondo_averaged_rho,
    xx_rho_computational,
    zurek_z,
)
from .scenario_io import ScenarioError, parse_scan_config, parse_scenario, scenario_echo

__version__ = "0.1.0"

__all__ = [
    "DDParams",
    "EnsembleResult",
    "KickParams",
    "KondoParams",
    "MetricEntry",
    "ModelParams",
    "ObservableUnavailableError",
    "PulseEvent",
    "ScanResult",
    "Scenario",
    "ScenarioError",
    "StrategyEntry",
    "Timeline",
    "Trajectory",
    "XXState",
    "ZurekEnvironment",
    "average",
    "compare_strategies",
    "dd_timeline",
    "decoherence_metrics",
    "default_dd_axis",
    "default_kondo_axis",
    "default_kondo_params",
    "derive_seed",
    "free_propagator",
    "hamiltonian",
    "kick_aligned_grid",
    "kick_average_quadrature",
    "kick_operator",
    "kick_rate_scan",
    "kondo_averaged_rho",
    "parse_scan_config",
    "parse_scenario",
    "pi_pulse",
    "population_observables",
    "run_realization",
    "run_single",
    "sample_kick_timeline",
    "sample_kondo_timeline",
    "scenario_echo",
    "system_initial_state",
    "time_to_band",
    "xx_rho_computational",
    "zurek_z",
]
