"""Acceptance suite: one test per release criterion.

Each test prints a `[acceptance] criterion NN: PASS/FAIL` line (visible
with `pytest -s` or on failure) and asserts the criterion at its stated
tolerance.  Statistical criteria use fixed seeds, so outcomes are exact
reruns, not flaky samples.
"""

import cmath
import math

import numpy as np
import pytest

from decolab import (
    DDParams,
    KickParams,
    KondoParams,
    ModelParams,
    Scenario,
    XXState,
    ZurekEnvironment,
    average,
    decoherence_metrics,
    default_kondo_params,
    free_propagator,
    kick_aligned_grid,
    kick_average_quadrature,
    kondo_averaged_rho,
    run_realization,
    run_single,
    xx_rho_computational,
    zurek_z,
)
from decolab.cli import main as cli_main
from decolab.ensemble import build_timelines
from decolab.model import event_unitary
from decolab.qmat import (
    HERMITICITY_TOL,
    MIN_EIGENVALUE,
    TRACE_TOL,
    UNITARITY_TOL,
    min_eigenvalue_2x2_batch,
    unitarity_defect,
)
from decolab.scenario_io import PLUS_STATE, THERMAL_Z_STATE

from conftest import random_density

ALPHA = 0.11 * np.pi / 2
OMEGA_HALF = 150.0


def report(number, passed, detail):
    flag = "PASS" if passed else "FAIL"
    print(f"[acceptance] criterion {number:02d}: {flag} -- {detail}")
    assert passed, f"criterion {number}: {detail}"


def zz_scenario(gamma, horizon, seed, realizations=500, kondo=False, dd_freq=None,
                grid=None):
    model = ModelParams(omega_half=OMEGA_HALF, coupling="zz")
    return Scenario(
        model=model,
        rho_s0=PLUS_STATE.copy(),
        rho_e0=THERMAL_Z_STATE.copy(),
        horizon=horizon,
        grid=kick_aligned_grid(gamma, horizon) if grid is None else grid,
        realizations=realizations,
        seed=seed,
        kicks=KickParams(alpha=ALPHA, gamma=gamma),
        kondo=default_kondo_params(model) if kondo else None,
        dd=DDParams(freq=dd_freq, target="S", axis="x") if dd_freq else None,
    )


def xx_scenario(gamma, horizon, seed, realizations=500, kondo=False, dd_freq=None):
    model = ModelParams(omega_half=OMEGA_HALF, coupling="xx")
    return Scenario(
        model=model,
        rho_s0=PLUS_STATE.copy(),
        rho_e0=THERMAL_Z_STATE.copy(),
        horizon=horizon,
        grid=kick_aligned_grid(gamma, horizon),
        realizations=realizations,
        seed=seed,
        kicks=KickParams(alpha=ALPHA, gamma=gamma),
        kondo=default_kondo_params(model) if kondo else None,
        dd=DDParams(freq=dd_freq, target="S", axis="z") if dd_freq else None,
    )


def combined_se(a, b):
    return math.hypot(a.t_half_stderr, b.t_half_stderr)


@pytest.fixture(scope="module")
def resonant_metrics():
    """Shared runs at the resonant kick rate (criteria 7 and 8)."""
    horizon, seed = 2.5, 101
    kicks = decoherence_metrics(average(zz_scenario(152.0, horizon, seed)))
    kondo = decoherence_metrics(average(zz_scenario(152.0, horizon, seed, kondo=True)))
    return kicks, kondo


def test_criterion_01_invariant_suite():
    """1000 random single realizations keep every state and propagator legal."""
    failures = 0
    checked_states = 0
    master = np.random.SeedSequence(20250101)
    for i, child in enumerate(master.spawn(1000)):
        rng = np.random.default_rng(child)
        coupling = "zz" if rng.random() < 0.5 else "xx"
        horizon = float(rng.uniform(0.05, 0.2))
        model = ModelParams(
            omega_half=float(rng.uniform(50.0, 250.0)),
            coupling=coupling,
            nu_s=float(rng.uniform(-30.0, 30.0)),
            nu_e=float(rng.uniform(-30.0, 30.0)),
        )
        kicks = kondo = dd = None
        if rng.random() < 0.8:
            kicks = KickParams(
                alpha=float(rng.uniform(0.0, 0.6)),
                gamma=float(rng.uniform(1.2 / horizon, 300.0)),
            )
        if rng.random() < 0.5:
            kondo = KondoParams(
                delta_max=float(rng.uniform(0.002, 0.02)),
                gap_max=float(rng.uniform(0.0, 0.03)),
                target="E",
                axis=str(rng.choice(["x", "y", "z"])),
            )
        if rng.random() < 0.5:
            dd = DDParams(
                freq=float(rng.uniform(1.2 / horizon, 60.0)),
                target=str(rng.choice(["S", "E"])),
                axis=str(rng.choice(["x", "y", "z"])),
            )
        scenario = Scenario(
            model=model,
            rho_s0=random_density(rng, 2),
            rho_e0=random_density(rng, 2),
            horizon=horizon,
            grid=np.linspace(0.0, horizon, 12),
            realizations=1,
            seed=int(rng.integers(0, 2**63)),
            kicks=kicks,
            kondo=kondo,
            dd=dd,
        )
        traj = run_single(scenario, 0)
        states = traj.states
        checked_states += states.shape[0]
        traces_ok = np.all(np.abs(np.einsum("tii->t", states) - 1.0) <= TRACE_TOL)
        herm_ok = np.max(np.abs(states - states.conj().transpose(0, 2, 1))) <= HERMITICITY_TOL
        psd_ok = np.all(min_eigenvalue_2x2_batch(states) >= MIN_EIGENVALUE)
        unit_ok = unitarity_defect(
            free_propagator(model, float(rng.uniform(0.0, horizon)))
        ) <= UNITARITY_TOL
        for timeline in build_timelines(scenario, 0):
            for ev in timeline.events:
                unit_ok &= unitarity_defect(event_unitary(ev)) <= UNITARITY_TOL
        if not (traces_ok and herm_ok and psd_ok and unit_ok):
            failures += 1
    report(1, failures == 0, f"{checked_states} sampled states across 1000 realizations, "
                             f"{failures} invariant failures")


def test_criterion_02_zurek_oracle():
    """Coherence-factor product matches a term-by-term expansion to 1e-12."""
    rng = np.random.default_rng(20250102)
    worst = 0.0
    mags_ok = True
    for n in range(1, 51):
        p0 = rng.uniform(0.0, 1.0, size=n)
        env = ZurekEnvironment(
            couplings=rng.uniform(-900.0, 900.0, size=n),
            populations=np.stack([p0, 1.0 - p0], axis=1),
        )
        for t in rng.uniform(0.0, 0.2, size=4):
            expected = 1.0
            for (a, b), j in zip(env.populations, env.couplings):
                expected *= a * cmath.exp(-2j * j * t) + b * cmath.exp(2j * j * t)
            z = zurek_z(env, float(t))
            worst = max(worst, abs(z - expected))
            mags_ok &= abs(z) <= 1.0
    report(2, worst <= 1e-12 and mags_ok,
           f"max |z - bruteforce| = {worst:.2e}, |z| <= 1 everywhere: {mags_ok}")


def test_criterion_03_kondo_exact_dephasing():
    """Analytic pair average kills off-diagonals; Monte Carlo follows within 3/sqrt(R)."""
    averaged = kondo_averaged_rho(PLUS_STATE)
    exact = averaged[0, 1] == 0.0 and averaged[1, 0] == 0.0
    model = ModelParams(omega_half=OMEGA_HALF, coupling="zz")
    scenario = Scenario(
        model=model,
        rho_s0=PLUS_STATE.copy(),
        rho_e0=THERMAL_Z_STATE.copy(),
        horizon=1.0,
        grid=np.array([0.0, 0.5, 1.0]),
        realizations=2000,
        seed=42,
        kondo=default_kondo_params(model),
    )
    residual = average(scenario).abs_f01[-1]
    bound = 3.0 / math.sqrt(2000)
    report(3, exact and residual <= bound,
           f"analytic off-diagonals exactly 0: {exact}; MC |f01(T)| = {residual:.4f} "
           f"<= {bound:.4f}")


def test_criterion_04_integer_ratio_no_decoherence():
    """Kick rates at integer coupling ratios leave every realization coherent."""
    worst = 0.0
    for gamma in (150.0, 75.0, 50.0):
        scenario = zz_scenario(gamma, 1.0, seed=77, realizations=200,
                               grid=np.array([0.0, 1.0]))
        result = average(scenario)
        worst = max(worst, float(np.max(np.abs(np.abs(result.f01_samples[:, -1]) - 1.0))))
    report(4, worst <= 1e-9,
           f"max per-realization | |f01(T)| - 1 | = {worst:.2e} over p in {{1,2,3}}")


def test_criterion_05_quadrature_equivalence():
    """Monte Carlo matches the product-quadrature average in >= 18/20 draws."""
    rng = np.random.default_rng(20250105)
    hits = 0
    for i in range(20):
        n = int(rng.integers(1, 5))
        alpha = float(rng.uniform(0.05, 1.2))
        omega_half = float(rng.uniform(40.0, 250.0))
        horizon = float(rng.uniform(0.004, 0.04))
        gamma = n / horizon
        model = ModelParams(omega_half=omega_half, coupling="zz")
        kicks = KickParams(alpha=alpha, gamma=gamma)
        quad = abs(kick_average_quadrature(model, kicks, THERMAL_Z_STATE, horizon, n))
        scenario = Scenario(
            model=model,
            rho_s0=PLUS_STATE.copy(),
            rho_e0=THERMAL_Z_STATE.copy(),
            horizon=horizon,
            grid=np.array([horizon]),
            realizations=10_000,
            seed=9000 + i,
            kicks=kicks,
        )
        result = average(scenario)
        gap = abs(result.abs_f01[-1] - quad)
        if gap <= 3.0 * result.stderr_abs_f01[-1] + 1e-9:
            hits += 1
    report(5, hits >= 18, f"{hits}/20 draws within 3 standard errors")


def test_criterion_06_kick_rate_monotonicity():
    """Slower kicks decohere later: t_half(52) > t_half(252) by > 3 sigma."""
    slow = decoherence_metrics(average(zz_scenario(52.0, 2.0, seed=101)))
    fast = decoherence_metrics(average(zz_scenario(252.0, 2.0, seed=101)))
    gap = slow.t_half - fast.t_half
    se = combined_se(slow, fast)
    ok = slow.reached and fast.reached and gap > 3.0 * se
    report(6, ok, f"t_half(52) = {slow.t_half:.3f}, t_half(252) = {fast.t_half:.3f}, "
                  f"gap = {gap:.3f} = {gap / se:.1f} x SE")


def test_criterion_07_resonant_suppression(resonant_metrics):
    """Randomized pairs slow decoherence at the resonant kick rate, speed it above."""
    kicks152, kondo152 = resonant_metrics
    gap_res = kondo152.t_half - kicks152.t_half
    se_res = combined_se(kondo152, kicks152)
    kicks252 = decoherence_metrics(average(zz_scenario(252.0, 2.5, seed=101)))
    kondo252 = decoherence_metrics(average(zz_scenario(252.0, 2.5, seed=101, kondo=True)))
    gap_off = kicks252.t_half - kondo252.t_half
    se_off = combined_se(kondo252, kicks252)
    ok = (
        kondo152.reached
        and kicks152.reached
        and gap_res > 3.0 * se_res
        and gap_off > 3.0 * se_off
    )
    report(7, ok,
           f"at 152/s kondo {kondo152.t_half:.3f} vs kicks {kicks152.t_half:.3f} "
           f"(+{gap_res / se_res:.1f} sigma); at 252/s kicks {kicks252.t_half:.3f} vs "
           f"kondo {kondo252.t_half:.4f} (+{gap_off / se_off:.1f} sigma)")


def test_criterion_08_randomized_pairs_beat_slow_decoupling(resonant_metrics):
    """At resonance the random pairs outlast a 7.6 Hz decoupling train."""
    _, kondo152 = resonant_metrics
    dd = decoherence_metrics(average(zz_scenario(152.0, 2.5, seed=101, dd_freq=7.6)))
    gap = kondo152.t_half - dd.t_half
    se = combined_se(kondo152, dd)
    ok = dd.reached and kondo152.reached and gap > 3.0 * se
    report(8, ok, f"kondo t_half {kondo152.t_half:.3f} vs dd@7.6Hz {dd.t_half:.3f}, "
                  f"gap = {gap / se:.1f} x SE")


def test_criterion_09_xx_analytic_equivalence():
    """Noise-free two-qubit dynamics equals the closed-form population solution."""
    rng = np.random.default_rng(20250109)
    model = ModelParams(omega_half=OMEGA_HALF, coupling="xx")
    env = ZurekEnvironment(
        couplings=np.array([np.pi * OMEGA_HALF]),
        populations=np.array([[0.5, 0.5]]),
    )
    state = XXState(a_prime=1 / np.sqrt(2), b_prime=1 / np.sqrt(2), env=env)
    times = np.sort(rng.uniform(0.0, 0.5, size=50))
    traj = run_realization(
        model,
        [],
        np.diag([1.0, 0.0]).astype(complex),  # plus state moved to the computational frame
        THERMAL_Z_STATE,
        times,
        0.5,
    )
    worst = 0.0
    pops_ok = True
    for idx, t in enumerate(times):
        worst = max(worst, float(np.max(np.abs(traj.states[idx] - xx_rho_computational(state, float(t))))))
        pop = traj.states[idx, 0, 0].real
        pops_ok &= -1e-12 <= pop <= 1.0 + 1e-12
    report(9, worst <= 1e-10 and pops_ok,
           f"max entrywise gap over 50 times = {worst:.2e}; populations in [0,1]: {pops_ok}")


def test_criterion_10_xx_damping_to_half():
    """Fast kicks drive the population to 1/2; slow kicks lag at the same horizon."""
    horizon = 2.0
    fast = average(xx_scenario(202.0, horizon, seed=7))
    slow = average(xx_scenario(52.0, horizon, seed=7))
    dev_fast = abs(fast.rho00[-1] - 0.5)
    dev_slow = abs(slow.rho00[-1] - 0.5)
    ok = dev_fast <= 0.05 and dev_slow > 0.05
    report(10, ok, f"|rho00(T) - 1/2| at 202/s = {dev_fast:.3f} (<= 0.05), "
                   f"at 52/s = {dev_slow:.3f} (> 0.05)")


def test_criterion_11a_xx_decoupling_retention():
    """Decoupling at 15.2 Hz holds the population above 0.8 at the resonant rate."""
    result = average(xx_scenario(152.0, 0.5, seed=7, dd_freq=15.2))
    floor = float(result.rho00.min())
    report(11, floor >= 0.8, f"(a) min rho00 under dd@15.2Hz = {floor:.3f} >= 0.8")


def test_criterion_11b_xx_randomized_pairs_damping():
    """Contrast clause: kicks+pairs at 152/s reach rho00 = 0.5 +/- 0.05.

    Known conflict: at the resonant kick rate the clock-snapped pulse
    pairs act stroboscopically and conserve the population, which is the
    very suppression the resonant-dephasing criterion demands, so this
    damping bound cannot also hold.  The assertion is kept at its stated
    tolerance and is expected to fail.
    """
    result = average(xx_scenario(152.0, 0.5, seed=7, kondo=True))
    dev = abs(result.rho00[-1] - 0.5)
    report(11, dev <= 0.05, f"(b) kicks+kondo |rho00(T) - 1/2| = {dev:.3f} (<= 0.05 required)")


def test_criterion_12_determinism(tmp_path):
    """Same seed means byte-identical CSVs, for 1 and N worker processes."""
    scenario_text = (
        "coupling = zz\nomega_half = 150\nalpha = 0.17278759594743864\n"
        "gamma = 152\nkondo = on\ndd_freq = 12.67\nT = 0.3\ngrid_points = 31\n"
        "realizations = 12\nseed = 2718\n"
    )
    scn = tmp_path / "det.scn"
    scn.write_text(scenario_text)
    outs = [tmp_path / name for name in ("a.csv", "b.csv", "c.csv")]
    assert cli_main(["run", str(scn), "-o", str(outs[0])]) == 0
    assert cli_main(["run", str(scn), "-o", str(outs[1])]) == 0
    assert cli_main(["run", str(scn), "-o", str(outs[2]), "--workers", "3"]) == 0
    blobs = [p.read_bytes() for p in outs]
    identical = blobs[0] == blobs[1] == blobs[2]

    scenario = zz_scenario(102.0, 0.4, seed=555, realizations=9, kondo=True)
    direct = average(scenario, workers=1)
    pooled = average(scenario, workers=4)
    arrays_equal = np.array_equal(direct.mean_rho, pooled.mean_rho) and np.array_equal(
        direct.f01_samples, pooled.f01_samples
    )
    report(12, identical and arrays_equal,
           f"CSV bytes identical across reruns/workers: {identical}; "
           f"in-process arrays identical: {arrays_equal}")
