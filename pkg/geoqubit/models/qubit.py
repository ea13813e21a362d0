# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Single charge-qubit model: device energies, the fictitious field of the
asymmetric-SQUID Cooper-pair box, its spin-1/2 Hamiltonian and the cyclic
basis used to read out geometric phases.

Energies are in μeV at the interface. Internally the rest of the package
works with energies in units of ``E1 + E2`` and times in units of
``tau0 = hbar / (E1 + E2)`` so that hbar = 1.
"""
import math
import warnings
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

__all__ = [
    'HBAR',
    'SIGMA_X',
    'SIGMA_Y',
    'SIGMA_Z',
    'DeviceParams',
    'ControlPoint',
    'FieldVector',
    'SpinState',
    'BlochVector',
    'CyclicBasis',
    'josephson_energy',
    'mixing_angle',
    'field_components',
    'effective_field',
    'hamiltonian',
    'bloch_map',
    'bloch_to_state',
    'spin_state',
    'aligned_state',
    'ground_state',
    'cyclic_basis',
]

# hbar in μeV·ns
HBAR = 0.6582119569

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class DeviceParams:
    """
    Energies defining one asymmetric-SQUID charge qubit.

    Args:
        e1 (float): Josephson coupling of the first junction (μeV).
        e2 (float): Josephson coupling of the second junction (μeV).
        ech (float): charging energy (μeV).
    """
    e1: float
    e2: float
    ech: float

    def __post_init__(self):
        for name in ('e1', 'e2', 'ech'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite energy, got {value}")
        if self.e1 == self.e2:
            warnings.warn(
                "Symmetric SQUID (e1 == e2): E_J vanishes at half a flux quantum, "
                "the mixing angle and the cyclic-basis polar angle degenerate there.")

    @property
    def energy_scale(self) -> float:
        """E1 + E2 in μeV, the internal unit of energy."""
        return self.e1 + self.e2

    @property
    def asymmetry(self) -> float:
        return self.e1 - self.e2

    @property
    def tau0(self) -> float:
        """hbar / (E1 + E2) in ns, the internal unit of time."""
        return HBAR / self.energy_scale

    @property
    def tau0_ps(self) -> float:
        return 1e3 * self.tau0

    @property
    def elliptic_parameter(self) -> float:
        """The parameter m = -4 E1 E2 / (E1 - E2)^2 of the process II period integral."""
        if self.e1 == self.e2:
            return -math.inf
        return -4.0 * self.e1 * self.e2 / self.asymmetry ** 2

    def to_internal_energy(self, energy: ArrayLike) -> ArrayLike:
        return energy / self.energy_scale

    def to_ns(self, time: ArrayLike) -> ArrayLike:
        """Convert a time in tau0 units to ns."""
        return time * self.tau0


@dataclass(frozen=True)
class ControlPoint:
    """
    The externally driven pair: flux in units of the flux quantum and the
    dimensionless gate charge.
    """
    flux: float
    gate_charge: float

    def __post_init__(self):
        if not (math.isfinite(self.flux) and math.isfinite(self.gate_charge)):
            raise ValueError(f"Control point must be finite, got ({self.flux}, {self.gate_charge})")


@dataclass(frozen=True)
class FieldVector:
    bx: float
    by: float
    bz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz], dtype=float)

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.bx ** 2 + self.by ** 2 + self.bz ** 2)

    @property
    def transverse(self) -> float:
        return math.hypot(self.bx, self.by)

    @classmethod
    def from_array(cls, values) -> "FieldVector":
        bx, by, bz = (float(v) for v in values)
        return cls(bx, by, bz)


@dataclass(frozen=True)
class SpinState:
    """
    Two complex amplitudes in the charge basis {|0>, |1>}. Construction
    normalizes the pair.
    """
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = math.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2)
        if norm == 0 or not math.isfinite(norm):
            raise ValueError("A spin state needs a finite non-zero amplitude pair")
        object.__setattr__(self, 'amp0', complex(self.amp0) / norm)
        object.__setattr__(self, 'amp1', complex(self.amp1) / norm)

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    @classmethod
    def from_array(cls, values) -> "SpinState":
        return cls(complex(values[0]), complex(values[1]))

    def overlap(self, other: "SpinState") -> complex:
        """<self|other>"""
        return np.vdot(self.as_array(), other.as_array())


@dataclass(frozen=True)
class BlochVector:
    nx: float
    ny: float
    nz: float

    def __post_init__(self):
        norm = math.sqrt(self.nx ** 2 + self.ny ** 2 + self.nz ** 2)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"Bloch vector must have unit length, got |n| = {norm}")

    def as_array(self) -> np.ndarray:
        return np.array([self.nx, self.ny, self.nz], dtype=float)

    @classmethod
    def from_array(cls, values, normalize: bool = False) -> "BlochVector":
        values = np.asarray(values, dtype=float)
        if normalize:
            values = values / np.linalg.norm(values)
        return cls(*(float(v) for v in values))

    @classmethod
    def from_angles(cls, theta: float, varphi: float) -> "BlochVector":
        return cls(
            math.sin(theta) * math.cos(varphi),
            math.sin(theta) * math.sin(varphi),
            math.cos(theta),
        )


def josephson_energy(params: DeviceParams, flux: ArrayLike) -> ArrayLike:
    """
    Effective Josephson energy of the SQUID, in μeV, 1-periodic in flux.
    """
    cos_sq = np.cos(np.pi * np.asarray(flux, dtype=float)) ** 2
    value = np.sqrt(params.asymmetry ** 2 + 4.0 * params.e1 * params.e2 * cos_sq)
    return float(value) if np.ndim(value) == 0 else value


def mixing_angle(params: DeviceParams, flux: ArrayLike) -> ArrayLike:
    """
    Mixing angle alpha of the fictitious field. The two-argument arctangent
    keeps alpha finite at half a flux quantum where tan(pi * flux) diverges.
    """
    phase = np.pi * np.asarray(flux, dtype=float)
    value = np.arctan2(params.asymmetry * np.sin(phase), params.energy_scale * np.cos(phase))
    return float(value) if np.ndim(value) == 0 else value


def field_components(params: DeviceParams, flux: ArrayLike, gate_charge: ArrayLike) -> np.ndarray:
    """
    Vectorized fictitious field, shape ``(..., 3)`` in μeV.

    (E_J cos alpha, -E_J sin alpha) reduces to
    ((E1 + E2) cos(pi flux), -(E1 - E2) sin(pi flux)) since E_J is the norm of
    that pair, so the transverse part is evaluated without the arctangent.
    """
    phase = np.pi * np.asarray(flux, dtype=float)
    gate_charge = np.asarray(gate_charge, dtype=float)
    bx = params.energy_scale * np.cos(phase)
    by = -params.asymmetry * np.sin(phase)
    bz = params.ech * (1.0 - 2.0 * gate_charge)
    bx, by, bz = np.broadcast_arrays(bx, by, bz)
    return np.stack([bx, by, bz], axis=-1)


def effective_field(params: DeviceParams, cp: ControlPoint) -> FieldVector:
    return FieldVector.from_array(field_components(params, cp.flux, cp.gate_charge))


def hamiltonian(field: Union[FieldVector, np.ndarray]) -> np.ndarray:
    """
    H = -1/2 B . sigma, in the energy unit of ``field``.
    """
    bx, by, bz = field.as_array() if isinstance(field, FieldVector) else np.asarray(field, dtype=float)
    return -0.5 * (bx * SIGMA_X + by * SIGMA_Y + bz * SIGMA_Z)


def bloch_map(state: SpinState) -> BlochVector:
    """
    n = <psi| sigma |psi>
    """
    a, b = state.amp0, state.amp1
    cross = np.conj(a) * b
    n = np.array([2.0 * cross.real, 2.0 * cross.imag, abs(a) ** 2 - abs(b) ** 2])
    return BlochVector.from_array(n, normalize=True)


def spin_state(theta: float, varphi: float) -> SpinState:
    """
    The spinor [e^{-i varphi/2} cos(theta/2), e^{i varphi/2} sin(theta/2)].
    """
    return SpinState(
        np.exp(-0.5j * varphi) * math.cos(0.5 * theta),
        np.exp(0.5j * varphi) * math.sin(0.5 * theta),
    )


def bloch_to_state(n: BlochVector) -> SpinState:
    """
    Inverse of :func:`bloch_map` up to a global phase.
    """
    theta = math.atan2(math.hypot(n.nx, n.ny), n.nz)
    varphi = math.atan2(n.ny, n.nx)
    return spin_state(theta, varphi)


def aligned_state(field: FieldVector) -> SpinState:
    """
    Eigenstate aligned with the field, the ground state of -1/2 B . sigma.
    """
    if field.magnitude == 0:
        raise ValueError("The aligned eigenstate of a zero field is undefined")
    return bloch_to_state(BlochVector.from_array(field.as_array(), normalize=True))


def ground_state(params: DeviceParams, cp: ControlPoint = ControlPoint(0.0, 0.0)) -> SpinState:
    """
    Ground state of the qubit held at ``cp``; by default the preparation
    point (flux 0, gate charge 0).
    """
    return aligned_state(effective_field(params, cp))


@dataclass(frozen=True)
class CyclicBasis:
    """
    Decomposition of the prepared state onto the cyclic pair
    psi_+(theta_i, varphi_i), psi_-(theta_i, varphi_i).

    ``a_plus`` and ``a_minus`` follow the closed-form amplitudes for a state
    prepared at polar angle ``eta``. For ``varphi_i == 0`` they are the
    projections <psi_pm|psi_prepared>; for ``varphi_i != 0`` they are their
    complex conjugates.
    """
    theta_i: float
    varphi_i: float
    eta: float
    a_plus: complex
    a_minus: complex

    @classmethod
    def from_angles(cls, theta_i: float, varphi_i: float, eta: float) -> "CyclicBasis":
        c_phi, s_phi = math.cos(0.5 * varphi_i), math.sin(0.5 * varphi_i)
        a_plus = (math.cos(0.5 * (eta - theta_i)) * c_phi
                  - 1j * math.cos(0.5 * (eta + theta_i)) * s_phi)
        a_minus = (math.sin(0.5 * (eta - theta_i)) * c_phi
                   + 1j * math.sin(0.5 * (eta + theta_i)) * s_phi)
        return cls(theta_i, varphi_i, eta, a_plus, a_minus)

    @property
    def psi_plus(self) -> np.ndarray:
        return spin_state(self.theta_i, self.varphi_i).as_array()

    @property
    def psi_minus(self) -> np.ndarray:
        half = 0.5 * self.theta_i
        return np.array([
            -np.exp(-0.5j * self.varphi_i) * math.sin(half),
            np.exp(0.5j * self.varphi_i) * math.cos(half),
        ])

    @property
    def axis(self) -> BlochVector:
        return BlochVector.from_angles(self.theta_i, self.varphi_i)

    def initial_state(self) -> SpinState:
        return SpinState.from_array(self.a_plus * self.psi_plus + self.a_minus * self.psi_minus)

    def amplitudes(self) -> Tuple[complex, complex]:
        return self.a_plus, self.a_minus


def cyclic_basis(params: DeviceParams, field_at_0: FieldVector) -> CyclicBasis:
    """
    Cyclic basis for a run that starts from the ground state at
    (flux 0, gate charge 0) and then snaps to ``field_at_0``.

    theta_i is the polar angle of ``field_at_0`` in [0, pi], varphi_i its
    azimuth in (-pi, pi], and tan(eta) = E_J(0) / E_ch.
    """
    if field_at_0.magnitude == 0:
        raise ValueError("Zero field at t = 0, the cyclic axis is undefined")
    theta_i = math.atan2(field_at_0.transverse, field_at_0.bz)
    varphi_i = math.atan2(field_at_0.by, field_at_0.bx)
    eta = math.atan(params.energy_scale / params.ech)
    return CyclicBasis.from_angles(theta_i, varphi_i, eta)
