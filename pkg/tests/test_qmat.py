import numpy as np
import pytest

from decolab import qmat
from decolab.qmat import (
    HADAMARD,
    IDENTITY_2,
    MatrixInvariantError,
    SIGMA_X,
    SIGMA_Z,
    conjugate,
    expm_hermitian,
    hadamard_frame,
    kron,
    partial_trace_env,
    rotation,
    validate_density,
    validate_unitary,
)

from conftest import random_density, random_pure_density, random_unitary


def test_kron_identity():
    assert np.array_equal(kron(IDENTITY_2, IDENTITY_2), np.eye(4))


def test_kron_sigma_z_pair():
    assert np.array_equal(kron(SIGMA_Z, SIGMA_Z), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_kron_sigma_x_pair():
    expected = np.fliplr(np.eye(4))
    assert np.array_equal(kron(SIGMA_X, SIGMA_X), expected)


def test_kron_rejects_bad_shapes():
    with pytest.raises(MatrixInvariantError):
        kron(np.eye(4), np.eye(2))


def test_partial_trace_factorized(rng):
    for _ in range(20):
        rho_s = random_density(rng, 2)
        rho_e = random_density(rng, 2)
        reduced = partial_trace_env(np.kron(rho_s, rho_e))
        assert np.max(np.abs(reduced - rho_s)) < 1e-12


def test_partial_trace_matches_basis_sum(rng):
    for _ in range(20):
        rho = random_density(rng, 4)
        expected = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    expected[i, j] += rho[2 * i + k, 2 * j + k]
        assert np.max(np.abs(partial_trace_env(rho) - expected)) < 1e-14


def test_partial_trace_bell_state():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    reduced = partial_trace_env(np.outer(bell, bell.conj()))
    assert np.max(np.abs(reduced - np.eye(2) / 2)) < 1e-12


def test_partial_trace_env_unitary_invariance(rng):
    for _ in range(20):
        rho = random_density(rng, 4)
        u = np.kron(IDENTITY_2, random_unitary(rng, 2))
        assert np.max(np.abs(partial_trace_env(u @ rho @ u.conj().T) - partial_trace_env(rho))) < 1e-12


def test_partial_trace_preserves_trace(rng):
    for _ in range(10):
        rho = random_density(rng, 4)
        assert abs(np.trace(partial_trace_env(rho)) - np.trace(rho)) < 1e-12


def test_partial_trace_rejects_invalid_state():
    with pytest.raises(MatrixInvariantError):
        partial_trace_env(np.eye(4))  # trace 4


def test_conjugate_identity(rng):
    rho = random_density(rng, 4)
    assert np.array_equal(conjugate(rho, np.eye(4)), rho)


def test_conjugate_pi_rotation_flips():
    zero = np.diag([1.0, 0.0]).astype(complex)
    flipped = conjugate(zero, rotation("x", np.pi / 2))
    assert np.max(np.abs(flipped - np.diag([0.0, 1.0]))) < 1e-15


def test_conjugate_hadamard_involution(rng):
    rho = random_density(rng, 2)
    back = conjugate(conjugate(rho, HADAMARD), HADAMARD)
    assert np.max(np.abs(back - rho)) < 1e-15


def test_conjugate_dimension_mismatch(rng):
    with pytest.raises(MatrixInvariantError):
        conjugate(random_density(rng, 4), np.eye(2))


def test_hadamard_frame_plus_becomes_zero():
    plus = 0.5 * (IDENTITY_2 + SIGMA_X)
    zero = 0.5 * (IDENTITY_2 + SIGMA_Z)
    assert np.max(np.abs(hadamard_frame(plus) - zero)) < 1e-15


def test_hadamard_frame_fixes_maximally_mixed():
    assert np.max(np.abs(hadamard_frame(np.eye(2) / 2) - np.eye(2) / 2)) < 1e-15


def test_hadamard_frame_involution(rng):
    for _ in range(5):
        rho = random_density(rng, 2)
        assert np.max(np.abs(hadamard_frame(hadamard_frame(rho)) - rho)) < 1e-12


def test_hadamard_frame_closed_form(rng):
    # real-amplitude population form of the frame change
    for _ in range(10):
        a = rng.uniform(0.05, 0.95) ** 0.5
        b = np.sqrt(1 - a**2)
        z = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        w = a * b * z
        plus_minus = np.array([[a**2, w], [np.conj(w), b**2]])
        expected = 0.5 * np.array(
            [
                [1 + 2 * w.real, a**2 - b**2 - 2j * w.imag],
                [a**2 - b**2 + 2j * w.imag, 1 - 2 * w.real],
            ]
        )
        assert np.max(np.abs(hadamard_frame(plus_minus) - expected)) < 1e-14


def test_expm_zero_time(rng):
    h = random_density(rng, 4)  # any Hermitian works
    assert np.max(np.abs(expm_hermitian(h, 0.0) - np.eye(4))) < 1e-15


def test_expm_diagonal():
    d = np.diag([1.0, -2.0, 3.0, 0.5])
    u = expm_hermitian(d.astype(complex), 0.7)
    assert np.max(np.abs(u - np.diag(np.exp(-1j * np.diag(d) * 0.7)))) < 1e-14


def test_expm_group_property(rng):
    for _ in range(5):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = a + a.conj().T
        t, s = rng.uniform(-2, 2, size=2)
        lhs = expm_hermitian(h, t) @ expm_hermitian(h, s)
        assert np.max(np.abs(lhs - expm_hermitian(h, t + s))) < 1e-11


def test_expm_unitarity(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    validate_unitary(expm_hermitian(h, 3.7))


def test_expm_rejects_non_hermitian():
    with pytest.raises(MatrixInvariantError):
        expm_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_rotation_y_closed_form():
    eps = 0.37
    expected = np.array([[np.cos(eps), -np.sin(eps)], [np.sin(eps), np.cos(eps)]])
    assert np.max(np.abs(rotation("y", eps) - expected)) < 1e-15


def test_rotation_unknown_axis():
    with pytest.raises(ValueError):
        rotation("w", 0.1)


def test_validate_density_accepts(rng):
    validate_density(random_density(rng, 2))
    validate_density(random_pure_density(rng, 4))


def test_validate_density_trace():
    with pytest.raises(MatrixInvariantError, match="trace"):
        validate_density(2 * np.eye(2))


def test_validate_density_hermiticity():
    m = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
    with pytest.raises(MatrixInvariantError, match="Hermiticity"):
        validate_density(m)


def test_validate_density_positivity():
    m = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(MatrixInvariantError, match="eigenvalue"):
        validate_density(m)


def test_validate_unitary_rejects():
    with pytest.raises(MatrixInvariantError):
        validate_unitary(np.diag([1.0, 0.5]))


def test_min_eigenvalue_batch_matches_eigvalsh(rng):
    states = np.stack([random_density(rng, 2) for _ in range(30)])
    fast = qmat.min_eigenvalue_2x2_batch(states)
    slow = np.array([np.linalg.eigvalsh(s)[0] for s in states])
    assert np.max(np.abs(fast - slow)) < 1e-12
