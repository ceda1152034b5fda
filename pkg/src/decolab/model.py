"""Two-qubit system-environment model and single-realization propagation.

The joint Hamiltonian is

    H0 = pi * (nu_s * sz_S + nu_e * sz_E + omega_half * c_S c_E)     [rad/s]

with c = sigma_z for "zz" coupling (pure dephasing of S) and c = sigma_x
for "xx" coupling (population exchange).  Frequencies are in Hz; the pi
prefactor is part of H0.

Three timed processes perturb the free evolution:

* random kicks: y-rotations of E by an angle drawn uniformly from
  (-alpha, alpha), applied at rate gamma (every T/n with n = round(gamma*T));
* randomized pulse pairs: pairs of pi pulses on E separated by a random
  delay, so E always returns to its initial population class;
* dynamical decoupling: equidistant pi pulses, by default on S.

A pulse event with angle ``a`` applies exp(-i * a * sigma_axis) to its
target qubit; kicks store the kick angle epsilon, pi pulses store pi/2.
All pulses are instantaneous unitaries between free-evolution segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat

EVENT_ORDER = {"kick": 0, "kondo": 1, "dd": 2}

_TIME_SLACK = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Couplings and shifts of the joint Hamiltonian (frequencies in Hz)."""

    omega_half: float
    coupling: str = "zz"
    nu_s: float = 0.0
    nu_e: float = 0.0

    def __post_init__(self):
        if self.coupling not in ("zz", "xx"):
            raise ValueError(f"coupling must be 'zz' or 'xx', got {self.coupling!r}")
        if not (math.isfinite(self.omega_half) and self.omega_half >= 0):
            raise ValueError(f"omega_half must be finite and non-negative, got {self.omega_half}")
        if not (math.isfinite(self.nu_s) and math.isfinite(self.nu_e)):
            raise ValueError("chemical shifts must be finite")


@dataclass(frozen=True)
class KickParams:
    """Random-kick process: amplitude bound alpha (rad), rate gamma (1/s)."""

    alpha: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class KondoParams:
    """Randomized pi-pulse pairs on the environment qubit.

    delta_max bounds the intra-pair separation, gap_max the gap between
    consecutive pairs; both are drawn uniformly.
    """

    delta_max: float
    gap_max: float
    target: str = "E"
    axis: str = "x"

    def __post_init__(self):
        if not (math.isfinite(self.delta_max) and self.delta_max > 0):
            raise ValueError(f"delta_max must be positive, got {self.delta_max}")
        if not (math.isfinite(self.gap_max) and self.gap_max >= 0):
            raise ValueError(f"gap_max must be >= 0, got {self.gap_max}")
        _check_target_axis(self.target, self.axis)


@dataclass(frozen=True)
class DDParams:
    """Periodic decoupling pulses: repetition frequency in Hz."""

    freq: float
    target: str = "S"
    axis: str = "x"

    def __post_init__(self):
        if not (math.isfinite(self.freq) and self.freq > 0):
            raise ValueError(f"freq must be positive, got {self.freq}")
        _check_target_axis(self.target, self.axis)


def _check_target_axis(target, axis):
    if target not in ("S", "E"):
        raise ValueError(f"target must be 'S' or 'E', got {target!r}")
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be 'x', 'y' or 'z', got {axis!r}")


@dataclass(frozen=True)
class PulseEvent:
    """One instantaneous rotation exp(-i*angle*sigma_axis) on one qubit.

    ``kind`` records which process produced the event; simultaneous events
    are applied in the fixed order kick -> kondo -> dd.
    """

    time: float
    target: str
    axis: str
    angle: float
    kind: str

    def __post_init__(self):
        _check_target_axis(self.target, self.axis)
        if self.kind not in EVENT_ORDER:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if not math.isfinite(self.angle):
            raise ValueError("pulse angle must be finite")
        if not (math.isfinite(self.time) and self.time >= 0):
            raise ValueError(f"event time must be finite and >= 0, got {self.time}")


@dataclass(frozen=True)
class Timeline:
    """Time-ordered pulse events within [0, horizon]."""

    events: tuple
    horizon: float

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        last = 0.0
        for ev in self.events:
            if ev.time < last - _TIME_SLACK:
                raise ValueError("timeline events must be sorted by time")
            if ev.time > self.horizon + _TIME_SLACK:
                raise ValueError(f"event at t={ev.time} exceeds horizon {self.horizon}")
            last = ev.time


@dataclass(frozen=True)
class Trajectory:
    """System states (2x2) sampled on a time grid, one stochastic realization."""

    times: np.ndarray
    states: np.ndarray


def hamiltonian(p: ModelParams) -> np.ndarray:
    """Joint 4x4 Hamiltonian in rad/s (diagonal for zz coupling)."""
    pauli_c = qmat.SIGMA_Z if p.coupling == "zz" else qmat.SIGMA_X
    h = (
        p.nu_s * qmat.kron(qmat.SIGMA_Z, qmat.IDENTITY_2)
        + p.nu_e * qmat.kron(qmat.IDENTITY_2, qmat.SIGMA_Z)
        + p.omega_half * qmat.kron(pauli_c, pauli_c)
    )
    return np.pi * h


def free_propagator(p: ModelParams, dt: float) -> np.ndarray:
    """exp(-i * H0 * dt)."""
    return qmat.expm_hermitian(hamiltonian(p), dt)


def embed_on(target: str, op2) -> np.ndarray:
    """Lift a 2x2 operator to the joint space, acting on S or E."""
    if target == "S":
        return qmat.kron(op2, qmat.IDENTITY_2)
    if target == "E":
        return qmat.kron(qmat.IDENTITY_2, op2)
    raise ValueError(f"target must be 'S' or 'E', got {target!r}")


def kick_operator(epsilon: float) -> np.ndarray:
    """Random-amplitude kick exp(-i*epsilon*sigma_y) on the environment qubit."""
    return embed_on("E", qmat.rotation("y", epsilon))


def pi_pulse(target: str, axis: str) -> np.ndarray:
    """Population-flipping pulse exp(-i*(pi/2)*sigma_axis) on one qubit."""
    return embed_on(target, qmat.rotation(axis, np.pi / 2))


def event_unitary(ev: PulseEvent) -> np.ndarray:
    """Joint-space unitary realized by a pulse event."""
    return embed_on(ev.target, qmat.rotation(ev.axis, ev.angle))


def sample_kick_timeline(kick: KickParams, horizon: float, rng: np.random.Generator) -> Timeline:
    """Draw one realization of the kick process on [0, horizon].

    n = round(gamma*horizon) kicks at times m*horizon/n, each a y-rotation
    of E with angle uniform in (-alpha, alpha).
    """
    span = kick.gamma * horizon
    if span < 1.0:
        raise ValueError(
            f"gamma*T = {span:.3g} < 1: no kicks representable on this horizon"
        )
    n = int(math.floor(span + 0.5))
    times = np.linspace(horizon / n, horizon, n)
    angles = rng.uniform(-kick.alpha, kick.alpha, size=n)
    events = tuple(
        PulseEvent(time=float(t), target="E", axis="y", angle=float(a), kind="kick")
        for t, a in zip(times, angles)
    )
    return Timeline(events=events, horizon=horizon)


def sample_kondo_timeline(
    kondo: KondoParams,
    horizon: float,
    rng: np.random.Generator,
    clock=None,
) -> Timeline:
    """Draw one realization of the randomized pulse-pair process.

    From the current time draw gap ~ U[0, gap_max] and delta ~ U[0, delta_max];
    place pulses at t+gap and t+gap+delta, repeating while the pair fits in
    the horizon.  Pairs are placed atomically, so the event count is even.

    ``clock``, when given, is the sorted array of instants the pulse
    hardware can fire at (the kick sequencer's grid, clock[0] == 0); each
    drawn pulse time is then snapped to the nearest instant.  Sharing the
    kick clock is what makes the pulse pairs stroboscopically gentle when
    the kick rate sits near the coupling strength, and disruptive away
    from it.
    """
    events = []
    t = 0.0
    half_pi = np.pi / 2
    if clock is not None:
        clock = np.asarray(clock, dtype=float)
        step = clock[1] - clock[0] if clock.size > 1 else horizon

        def place(time):
            idx = min(max(int(math.floor(time / step + 0.5)), 0), clock.size - 1)
            return float(clock[idx])

    else:

        def place(time):
            return time

    while True:
        gap = rng.uniform(0.0, kondo.gap_max)
        delta = rng.uniform(0.0, kondo.delta_max)
        first = t + gap
        second = first + delta
        if second > horizon:
            break
        if second <= t:  # zero-length draw cannot advance time
            break
        events.append(PulseEvent(place(first), kondo.target, kondo.axis, half_pi, "kondo"))
        events.append(PulseEvent(place(second), kondo.target, kondo.axis, half_pi, "kondo"))
        t = second
    return Timeline(events=tuple(events), horizon=horizon)


def dd_timeline(dd: DDParams, horizon: float) -> Timeline:
    """Deterministic decoupling train: pulses at m/freq, m = 1 .. floor(freq*T)."""
    span = dd.freq * horizon
    if span < 1.0:
        raise ValueError(
            f"freq*T = {span:.3g} < 1: no decoupling pulses representable on this horizon"
        )
    count = int(math.floor(span))
    times = np.minimum(np.arange(1, count + 1) / dd.freq, horizon)
    events = tuple(
        PulseEvent(float(t), dd.target, dd.axis, np.pi / 2, "dd") for t in times
    )
    return Timeline(events=events, horizon=horizon)


def merge_timelines(timelines) -> list:
    """Flatten timelines into one event list ordered by (time, kind priority)."""
    events = [ev for tl in timelines for ev in tl.events]
    events.sort(key=lambda ev: (ev.time, EVENT_ORDER[ev.kind]))
    return events


def _validate_trajectory_states(states: np.ndarray, times: np.ndarray):
    traces = np.einsum("tii->t", states)
    bad = np.abs(traces - 1.0) > qmat.TRACE_TOL
    herm = np.max(np.abs(states - states.conj().transpose(0, 2, 1)), axis=(1, 2))
    bad |= herm > qmat.HERMITICITY_TOL
    bad |= qmat.min_eigenvalue_2x2_batch(states) < qmat.MIN_EIGENVALUE
    if np.any(bad):
        i = int(np.argmax(bad))
        raise qmat.MatrixInvariantError(
            f"system state violates density-matrix invariants at t={times[i]:.9g} s"
        )


def run_realization(
    params: ModelParams,
    timelines,
    rho_s0,
    rho_e0,
    grid,
    horizon: float,
) -> Trajectory:
    """Propagate one stochastic realization and record the system state.

    The joint state starts as rho_s0 ⊗ rho_e0, evolves freely between
    events, and each event applies its instantaneous unitary.  Events at a
    grid time are applied before the state is recorded there.  The recorded
    2x2 states are checked against the density-matrix invariants.

    Parameters
    ----------
    params : ModelParams
    timelines : iterable of Timeline
        Merged by time; simultaneous events apply kick -> kondo -> dd.
    rho_s0, rho_e0 : (2,2) array_like
        Initial system / environment states (computational basis).
    grid : array_like
        Sorted sample times within [0, horizon].
    horizon : float
        Total evolution time T; all events must satisfy time <= T.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array of times")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid times must be sorted non-decreasing")
    if grid[0] < 0 or grid[-1] > horizon + _TIME_SLACK:
        raise ValueError(f"grid must lie within [0, {horizon}]")
    rho_s0 = qmat.validate_density(rho_s0, "rho_s0")
    rho_e0 = qmat.validate_density(rho_e0, "rho_e0")
    if rho_s0.shape != (2, 2) or rho_e0.shape != (2, 2):
        raise ValueError("initial states must be 2x2")

    events = merge_timelines(timelines)
    if events and events[-1].time > horizon + _TIME_SLACK:
        raise ValueError(f"event at t={events[-1].time} exceeds horizon {horizon}")

    w, v = np.linalg.eigh(hamiltonian(params))
    vh = v.conj().T
    prop_cache: dict = {}

    def evolve(rho, dt):
        if dt == 0.0:
            return rho
        u = prop_cache.get(dt)
        if u is None:
            u = (v * np.exp(-1j * w * dt)) @ vh
            prop_cache[dt] = u
        return u @ rho @ u.conj().T

    unitary_cache: dict = {}

    def pulse_unitary(ev):
        key = (ev.target, ev.axis, ev.angle)
        u = unitary_cache.get(key)
        if u is None:
            u = event_unitary(ev)
            unitary_cache[key] = u
        return u

    rho = np.kron(rho_s0, rho_e0)
    states = np.empty((grid.size, 2, 2), dtype=complex)
    t_cur = 0.0
    i_ev = 0
    n_ev = len(events)
    for gi, g in enumerate(grid):
        while i_ev < n_ev and events[i_ev].time <= g:
            ev = events[i_ev]
            rho = evolve(rho, ev.time - t_cur)
            u = pulse_unitary(ev)
            rho = u @ rho @ u.conj().T
            t_cur = ev.time
            i_ev += 1
        rho = evolve(rho, g - t_cur)
        t_cur = g
        states[gi] = np.einsum("ikjk->ij", rho.reshape(2, 2, 2, 2))

    _validate_trajectory_states(states, grid)
    return Trajectory(times=grid.copy(), states=states)
