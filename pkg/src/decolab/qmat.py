"""Dense complex 2x2/4x4 linear algebra for two-qubit density-matrix work.

Conventions used throughout the package: the system qubit S is the first
tensor factor and the environment qubit E the second, so the 4x4 basis
order is |00>, |01>, |10>, |11> with the S level listed first. States and
operators are plain complex numpy arrays; the validators below enforce the
density-matrix and unitarity contracts at module boundaries.
"""

from __future__ import annotations

import numpy as np

TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
MIN_EIGENVALUE = -1e-9  # PSD slack; long pulse trains accumulate rounding
UNITARITY_TOL = 1e-12

IDENTITY_2 = np.eye(2, dtype=complex)
IDENTITY_4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


class MatrixInvariantError(ValueError):
    """A matrix violated a density-matrix or unitarity invariant."""


def _square(m, name="matrix"):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 4):
        raise MatrixInvariantError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    return a


def hermiticity_defect(m) -> float:
    """max |m[i,j] - conj(m[j,i])| over all entries."""
    a = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T)))


def unitarity_defect(u) -> float:
    """max-norm of U†U - I."""
    a = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


def validate_density(rho, name="density matrix") -> np.ndarray:
    """Check trace, Hermiticity and positivity of a state.

    Tolerances: |tr - 1| <= 1e-10, Hermiticity defect <= 1e-10, smallest
    eigenvalue >= -1e-9.  Returns the validated array (complex dtype);
    raises MatrixInvariantError otherwise.
    """
    a = _square(rho, name)
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > TRACE_TOL:
        raise MatrixInvariantError(f"{name}: trace {tr} deviates from 1 beyond {TRACE_TOL}")
    defect = hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise MatrixInvariantError(f"{name}: Hermiticity defect {defect:.3e} > {HERMITICITY_TOL}")
    w = np.linalg.eigvalsh(a)
    if w[0] < MIN_EIGENVALUE:
        raise MatrixInvariantError(f"{name}: eigenvalue {w[0]:.3e} below {MIN_EIGENVALUE}")
    return a


def validate_unitary(u, name="unitary") -> np.ndarray:
    """Check ||U†U - I||_max <= 1e-12; returns the array or raises."""
    a = _square(u, name)
    defect = unitarity_defect(a)
    if defect > UNITARITY_TOL:
        raise MatrixInvariantError(f"{name}: unitarity defect {defect:.3e} > {UNITARITY_TOL}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 operators, S factor first."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise MatrixInvariantError(
            f"kron expects two 2x2 operators, got {a.shape} and {b.shape}"
        )
    return np.kron(a, b)


def partial_trace_env(rho, validate=True) -> np.ndarray:
    """Reduce a 4x4 state of S⊗E to the 2x2 system state.

    rho_S[i, j] = sum_k rho[(i, k), (j, k)].  With validate=True the input
    must satisfy the density-matrix invariants.
    """
    a = np.asarray(rho, dtype=complex)
    if a.shape != (4, 4):
        raise MatrixInvariantError(f"partial trace expects a 4x4 state, got {a.shape}")
    if validate:
        validate_density(a, "joint state")
    return np.einsum("ikjk->ij", a.reshape(2, 2, 2, 2))


def conjugate(rho, u) -> np.ndarray:
    """U rho U† with matching dimensions."""
    r = _square(rho, "state")
    v = _square(u, "unitary")
    if r.shape != v.shape:
        raise MatrixInvariantError(f"dimension mismatch: state {r.shape} vs unitary {v.shape}")
    return v @ r @ v.conj().T


def hadamard_frame(rho) -> np.ndarray:
    """Conjugate a 2x2 state by the Hadamard matrix (an involution).

    Re-expresses a matrix written in the sigma_x eigenbasis {|+>, |->} in
    the computational basis, and vice versa.
    """
    r = np.asarray(rho, dtype=complex)
    if r.shape != (2, 2):
        raise MatrixInvariantError(f"hadamard_frame expects a 2x2 state, got {r.shape}")
    return HADAMARD @ r @ HADAMARD.conj().T


def rotation(axis, angle) -> np.ndarray:
    """Closed-form 2x2 unitary exp(-i * angle * sigma_axis)."""
    key = str(axis).lower()
    if key not in PAULI:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    return np.cos(angle) * IDENTITY_2 - 1j * np.sin(angle) * PAULI[key]


def expm_hermitian(h, t) -> np.ndarray:
    """exp(-i h t) via eigendecomposition of a Hermitian matrix.

    Unitary by construction for any real t.  Raises if h is not Hermitian
    within 1e-10.
    """
    a = _square(h, "hamiltonian")
    defect = hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise MatrixInvariantError(f"hamiltonian: Hermiticity defect {defect:.3e} > {HERMITICITY_TOL}")
    w, v = np.linalg.eigh(a)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def min_eigenvalue_2x2_batch(states) -> np.ndarray:
    """Smallest eigenvalue of each (assumed Hermitian) 2x2 in an (n,2,2) stack."""
    a = states[:, 0, 0].real
    d = states[:, 1, 1].real
    b = states[:, 0, 1]
    disc = np.sqrt(((a - d) * 0.5) ** 2 + np.abs(b) ** 2)
    return (a + d) * 0.5 - disc
