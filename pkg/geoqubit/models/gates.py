# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Geometric single- and two-qubit gates and the charge read-out probability.
"""
import math

import numpy as np

from .qubit import SIGMA_X, SIGMA_Y, SIGMA_Z, CyclicBasis

__all__ = [
    'UNITARY_ATOL',
    'CNOT',
    'is_unitary',
    'u1_sq',
    'u2_sq',
    'cyclic_gate',
    'conditional_gate',
    'xor_compose',
    'measure_p1',
    'measure_p1_closed',
    'fidelity',
    'off_diagonal_mass',
]

UNITARY_ATOL = 1e-10

CNOT = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=complex)


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) < atol


def u1_sq(gamma: float) -> np.ndarray:
    """
    [[cos g, i sin g], [i sin g, cos g]]; gamma = pi/2 is a spin flip and
    gamma = pi/4 an equal-weight superposition.
    """
    c, s = math.cos(gamma), math.sin(gamma)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def u2_sq(gamma: float) -> np.ndarray:
    """
    Phase-flip gate exp(-2i gamma |1><1|).
    """
    return np.diag([1.0, np.exp(-2j * gamma)]).astype(complex)


def cyclic_gate(gamma: float, theta_i: float, varphi_i: float) -> np.ndarray:
    """
    Evolution operator of a cyclic pair psi_pm(theta_i, varphi_i) that picks
    up geometric phases +-gamma:

        U = e^{i gamma} |psi_+><psi_+| + e^{-i gamma} |psi_-><psi_-|
          = cos(gamma) I + i sin(gamma) (n . sigma)

    theta_i = pi/2, varphi_i = 0 gives :func:`u1_sq`; theta_i = 0 gives
    :func:`u2_sq` up to the global phase e^{i gamma}.
    """
    nx = math.sin(theta_i) * math.cos(varphi_i)
    ny = math.sin(theta_i) * math.sin(varphi_i)
    nz = math.cos(theta_i)
    n_sigma = nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z
    return math.cos(gamma) * np.eye(2, dtype=complex) + 1j * math.sin(gamma) * n_sigma


def conditional_gate(gamma0: float, gamma1: float) -> np.ndarray:
    """
    diag(e^{-i g0}, e^{i g0}, e^{-i g1}, e^{i g1}) in the basis
    {|00>, |01>, |10>, |11>}, control first.
    """
    phases = np.array([-gamma0, gamma0, -gamma1, gamma1])
    return np.diag(np.exp(1j * phases))


def xor_compose() -> np.ndarray:
    """
    [I x U1(pi/4)] U_(0, 3pi/2) [I x U1(pi/4)]^dagger, a CNOT up to
    conditional phases.
    """
    local = np.kron(np.eye(2), u1_sq(math.pi / 4))
    return local @ conditional_gate(0.0, 1.5 * math.pi) @ local.conj().T


def measure_p1(basis: CyclicBasis, gamma: float) -> float:
    """
    Probability of finding the extra Cooper pair in the box after a cyclic
    evolution with geometric phase ``gamma``.
    """
    half = 0.5 * basis.theta_i
    amplitude = basis.a_plus * math.sin(half) + basis.a_minus * math.cos(half) * np.exp(-2j * gamma)
    p1 = abs(amplitude) ** 2
    assert -1e-12 <= p1 <= 1 + 1e-12, f"P1 = {p1} outside [0, 1]"
    return p1


def measure_p1_closed(eta: float, theta_i: float, gamma: float) -> float:
    """
    Closed form of :func:`measure_p1` valid for varphi_i = 0 (flux 0 at t = 0).
    """
    p1 = 0.5 * (1.0 - math.cos(eta - theta_i) * math.cos(theta_i)
                + math.sin(eta - theta_i) * math.sin(theta_i) * math.cos(2.0 * gamma))
    assert -1e-12 <= p1 <= 1 + 1e-12, f"P1 = {p1} outside [0, 1]"
    return p1


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """
    |tr(U^dagger V)| / N, equal to 1 iff U and V agree up to a global phase.
    """
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"Cannot compare operators of shapes {u.shape} and {v.shape}")
    return float(abs(np.trace(u.conj().T @ v)) / u.shape[0])


def off_diagonal_mass(u: np.ndarray) -> float:
    """
    Frobenius norm of the off-diagonal part.
    """
    u = np.asarray(u)
    return float(np.linalg.norm(u - np.diag(np.diag(u))))
