"""Deterministic reference results for validating the stochastic engine.

Three independent routes are provided:

* ``zurek_z``: the exact coherence factor of a qubit dephased by n-1
  environment qubits under zz couplings,
      z(t) = prod_k [ p0_k * exp(-2i*J_k*t) + p1_k * exp(+2i*J_k*t) ];
* ``kondo_averaged_rho`` / ``xx_rho_computational``: closed forms for the
  randomized-pulse-pair average and for the xx-coupling population
  dynamics;
* ``kick_average_quadrature``: the kick-averaged decoherence factor for
  the zz model, computed by Gauss-Legendre product quadrature over the
  kick angles instead of Monte Carlo sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .model import KickParams, ModelParams, hamiltonian

PAIR_TOL = 1e-12
MAX_QUADRATURE_KICKS = 4


@dataclass(frozen=True, eq=False)
class ZurekEnvironment:
    """Couplings (rad/s) and level populations of the environment qubits.

    ``populations[k] = (|alpha_k|^2, |beta_k|^2)`` must each sum to one.
    """

    couplings: np.ndarray
    populations: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.couplings, dtype=float)
        p = np.asarray(self.populations, dtype=float)
        if c.ndim != 1 or p.shape != (c.size, 2):
            raise ValueError(
                f"need one (p0, p1) pair per coupling, got shapes {c.shape} and {p.shape}"
            )
        if np.any(p < -PAIR_TOL):
            raise ValueError("populations must be non-negative")
        sums = p.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > PAIR_TOL):
            raise ValueError(f"population pairs must sum to 1, got {sums}")
        object.__setattr__(self, "couplings", c)
        object.__setattr__(self, "populations", p)

    @property
    def size(self) -> int:
        return int(self.couplings.size)


def zurek_z(env: ZurekEnvironment, t: float) -> complex:
    """Exact dephasing factor of the multi-qubit zz model at time t.

    |z| <= 1 always; the product is renormalized when floating-point
    rounding pushes it infinitesimally above one.
    """
    j = env.couplings
    p0 = env.populations[:, 0]
    p1 = env.populations[:, 1]
    terms = p0 * np.exp(-2j * j * t) + p1 * np.exp(2j * j * t)
    z = complex(np.prod(terms))
    mag = abs(z)
    if mag > 1.0:
        if mag > 1.0 + 1e-12:
            raise ArithmeticError(f"|z| = {mag} exceeds 1 beyond rounding noise")
        z /= mag
    return z


def kondo_averaged_rho(rho_s0) -> np.ndarray:
    """System state after averaging the pulse-pair phase over a full turn.

    The uniform phase average annihilates the off-diagonals exactly,
    leaving diag(rho00, rho11); the map is idempotent.
    """
    rho = qmat.validate_density(rho_s0, "rho_s0")
    if rho.shape != (2, 2):
        raise ValueError("expected a 2x2 system state")
    return np.diag(np.diag(rho)).astype(complex)


@dataclass(frozen=True, eq=False)
class XXState:
    """Factorized initial state for the xx model, written in the |+/-> basis."""

    a_prime: complex
    b_prime: complex
    env: ZurekEnvironment

    def __post_init__(self):
        norm = abs(self.a_prime) ** 2 + abs(self.b_prime) ** 2
        if abs(norm - 1.0) > PAIR_TOL:
            raise ValueError(f"|a'|^2 + |b'|^2 must be 1, got {norm}")


def xx_rho_computational(state: XXState, t: float) -> np.ndarray:
    """Closed-form system state of the xx model in the computational basis.

    In the |+/-> frame the state is
        [[|a'|^2,        a' b'* z(t)],
         [a'* b' z*(t),  |b'|^2    ]]
    and the computational-basis matrix is its Hadamard conjugate.  For real
    a', b' this reduces to
        1/2 * [[1 + 2 Re w,  a'^2 - b'^2 - 2i Im w],
               [...,         1 - 2 Re w           ]]
    with w = a' b'* z(t).
    """
    z = zurek_z(state.env, t)
    a, b = complex(state.a_prime), complex(state.b_prime)
    coherence = a * np.conj(b) * z
    plus_minus = np.array(
        [
            [abs(a) ** 2, coherence],
            [np.conj(coherence), abs(b) ** 2],
        ],
        dtype=complex,
    )
    return qmat.validate_density(qmat.hadamard_frame(plus_minus), "xx analytic state")


def _kick_matrix(epsilon: float) -> np.ndarray:
    # closed form of exp(-i*eps*sigma_y), kept local for independence
    c, s = np.cos(epsilon), np.sin(epsilon)
    return np.array([[c, -s], [s, c]], dtype=complex)


def kick_average_quadrature(
    params: ModelParams,
    kicks: KickParams,
    rho_e0,
    horizon: float,
    n_kicks: int,
    nodes: int = 32,
) -> complex:
    """Kick-averaged decoherence factor f01(T) by product quadrature.

    The conditional environment propagators V_j = <j| U(T/n) |j>_S are the
    diagonal S-blocks of the free propagator (well-defined for zz
    coupling).  Each kick angle contributes one factor K(eps)V_j on either
    side of rho_E, so the tensor-product Gauss-Legendre sum over
    (-alpha, alpha)^n factorizes exactly into n identical per-axis
    averages, which is how it is evaluated here.

    Parameters
    ----------
    params : ModelParams
        Must have zz coupling.
    kicks : KickParams
        Only the amplitude bound alpha is used; the rate is fixed by
        n_kicks and horizon.
    rho_e0 : (2,2) array_like
        Initial environment state.
    horizon : float
        Total time T; kicks occur every T/n_kicks.
    n_kicks : int
        Number of kicks, at most 4.
    nodes : int
        Gauss-Legendre nodes per kick angle (>= 32 recommended).
    """
    if params.coupling != "zz":
        raise ValueError("quadrature average is only defined for zz coupling")
    if not 1 <= n_kicks <= MAX_QUADRATURE_KICKS:
        raise ValueError(f"n_kicks must be in 1..{MAX_QUADRATURE_KICKS}, got {n_kicks}")
    if nodes < 2:
        raise ValueError(f"need at least 2 quadrature nodes, got {nodes}")
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    rho_e = qmat.validate_density(rho_e0, "rho_e0")
    if rho_e.shape != (2, 2):
        raise ValueError("rho_e0 must be 2x2")

    u = qmat.expm_hermitian(hamiltonian(params), horizon / n_kicks)
    v0 = u[:2, :2]
    v1 = u[2:, 2:]

    if kicks.alpha == 0.0:
        eps = np.array([0.0])
        weights = np.array([1.0])
    else:
        x, w = np.polynomial.legendre.leggauss(nodes)
        eps = kicks.alpha * x
        weights = 0.5 * w  # normalized average over (-alpha, alpha)

    left = np.stack([_kick_matrix(e) @ v0 for e in eps])
    right = np.stack([_kick_matrix(e) @ v1 for e in eps])

    acc = rho_e
    for _ in range(n_kicks):
        acc = np.einsum("m,mab,bc,mdc->ad", weights, left, acc, right.conj())
    return complex(np.trace(acc))
