# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Two capacitively coupled charge qubits, control ``i`` and target ``j``.

With the control frozen in charge state ``l`` the target sees the
conditional field

    [E_J cos alpha, -E_J sin alpha, E_ch (1 - 2 n_xj) + E_ij (n_xi - l)],

so a process II drive on the target picks up a geometric phase that depends
on ``l``. The 4x4 model uses the target's units (energies in its E1 + E2,
time in its tau0) and the charge operator n = diag(0, 1) on each qubit.
"""
import argparse
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..data.schedules import ProcessIIParams, ProcessIISchedule, Schedule
from ..dynamics import IntegratorConfig, Trajectory, evolve_in_field, integrate, schedule_field
from ..phases import aa_phase, pancharatnam_line_integral
from .qubit import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ControlPoint,
    DeviceParams,
    FieldVector,
    SpinState,
    effective_field,
    spin_state,
)

__all__ = [
    'CLOSED_FORM',
    'LINE_INTEGRAL',
    'CouplingParams',
    'TwoQubitTrajectory',
    'conditional_field',
    'conditional_chi0',
    'process_ii_conditional',
    'evolve_conditional',
    'conditional_phase',
    'two_qubit_hamiltonian',
    'full_two_qubit_evolve',
    'branch_operator',
    'two_qubit_operator_from_branches',
]

CLOSED_FORM = 'closed-form'
LINE_INTEGRAL = 'line-integral'

CHARGE = np.diag([0.0, 1.0]).astype(complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class CouplingParams:
    """
    Args:
        e_coupling (float): E_ij = E_ch C_ij / C in μeV, meant to be small
            against the charging energies.
    """
    e_coupling: float

    def __post_init__(self):
        if not math.isfinite(self.e_coupling) or self.e_coupling < 0:
            raise ValueError(f"e_coupling must be a finite non-negative energy, got {self.e_coupling}")

    @staticmethod
    def add_argparse_args(parent_parser):
        parser = argparse.ArgumentParser(parents=[parent_parser], add_help=False)
        parser.add_argument('--e-coupling', default=0.5, type=float,
                            help='capacitive coupling energy E_ij in μeV (default: 0.5)')
        return parser

    @classmethod
    def from_argparse_args(cls, args):
        return cls(e_coupling=args.e_coupling)


@dataclass(frozen=True, eq=False)
class TwoQubitTrajectory:
    """
    Samples of the 4-amplitude state in the basis |00>, |01>, |10>, |11>
    (control first), times in the target's tau0.
    """
    times: np.ndarray
    states: np.ndarray
    norm_drift: float = 0.0

    def __len__(self):
        return len(self.times)

    def branch_states(self, l: int) -> np.ndarray:
        """
        Target amplitudes conditioned on control charge ``l``, normalized
        per sample.
        """
        block = self.states[:, 2 * l:2 * l + 2]
        return block / np.linalg.norm(block, axis=1, keepdims=True)

    def branch_bloch(self, l: int) -> np.ndarray:
        block = self.branch_states(l)
        cross = np.conj(block[:, 0]) * block[:, 1]
        return np.stack([2.0 * cross.real, 2.0 * cross.imag,
                         np.abs(block[:, 0]) ** 2 - np.abs(block[:, 1]) ** 2], axis=-1)


def _check_branch(l: int):
    if l not in (0, 1):
        raise ValueError(f"Control charge state must be 0 or 1, got {l}")


def conditional_field(
    params_j: DeviceParams,
    cp_j: ControlPoint,
    coupling: CouplingParams,
    nx_i: float,
    l: int,
) -> FieldVector:
    _check_branch(l)
    field = effective_field(params_j, cp_j)
    return FieldVector(field.bx, field.by, field.bz + coupling.e_coupling * (nx_i - l))


def conditional_chi0(
    params_j: DeviceParams,
    chi0: float,
    coupling: CouplingParams,
    nx_i: float,
    l: int,
) -> float:
    """
    Polar angle chi0^l the uncoupled process II drive for ``chi0`` would
    have at flux 0 under the conditional field.
    """
    _check_branch(l)
    scale = params_j.energy_scale
    return math.atan2(scale, scale / math.tan(chi0) + coupling.e_coupling * (nx_i - l))


def process_ii_conditional(
    params_j: DeviceParams,
    p: ProcessIIParams,
    coupling: CouplingParams,
    nx_i: float,
    l: int,
) -> ProcessIISchedule:
    """
    Target drive for control branch ``l``: process II at chi0^l with the
    coupling offset compensated in the gate charge, so that the polar angle
    stays at chi0^l for the whole period under the conditional field.
    """
    chi0_l = conditional_chi0(params_j, p.chi0, coupling, nx_i, l)
    return ProcessIISchedule(
        params_j, ProcessIIParams(chi0_l, p.omega), bz_offset=coupling.e_coupling * (nx_i - l))


def evolve_conditional(
    params_j: DeviceParams,
    sched_j: Schedule,
    coupling: CouplingParams,
    nx_i: float,
    l: int,
    psi0: SpinState,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """
    Single-qubit evolution of the target under the conditional field.
    """
    _check_branch(l)
    base = schedule_field(params_j, sched_j)
    offset = coupling.e_coupling * (nx_i - l) / params_j.energy_scale
    knots = sched_j.breakpoints

    def field_fn(t):
        segment = min(int(np.searchsorted(knots, t, side='right')) - 1, len(knots) - 2)
        return base(t, max(segment, 0)) + np.array([0.0, 0.0, offset])

    return evolve_in_field(field_fn, sched_j.tau, psi0, cfg, breakpoints=knots,
                           energy_scale=params_j.energy_scale)


def conditional_phase(
    params_j: DeviceParams,
    p: ProcessIIParams,
    coupling: CouplingParams,
    nx_i: float,
    l: int,
    method: str = CLOSED_FORM,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> float:
    """
    Geometric phase gamma_j^l of the target for control branch ``l``,
    either sign(omega) pi (1 - cos chi0^l) or the line integral over the
    simulated cyclic trajectory.
    """
    chi0_l = conditional_chi0(params_j, p.chi0, coupling, nx_i, l)
    if method == CLOSED_FORM:
        return aa_phase(chi0_l, p.omega)
    if method != LINE_INTEGRAL:
        raise ValueError(f"Unknown method {method!r}, expected {CLOSED_FORM!r} or {LINE_INTEGRAL!r}")
    sched = process_ii_conditional(params_j, p, coupling, nx_i, l)
    traj = evolve_conditional(params_j, sched, coupling, nx_i, l, spin_state(chi0_l, 0.0), cfg)
    return pancharatnam_line_integral(traj)


def two_qubit_hamiltonian(
    params_i: DeviceParams,
    params_j: DeviceParams,
    cp_i: ControlPoint,
    cp_j: ControlPoint,
    coupling: CouplingParams,
    frozen_control: bool = False,
) -> np.ndarray:
    """
    H_i x I + I x H_j - E_ij (n - n_xi) x (n - n_xj) in units of the
    target's E1 + E2. The coupling enters once; its sign reproduces the
    conditional field's offset E_ij (n_xi - l). ``frozen_control`` drops
    the control's transverse field so its charge state is conserved.
    """
    scale = params_j.energy_scale
    b_i = effective_field(params_i, cp_i).as_array() / scale
    b_j = effective_field(params_j, cp_j).as_array() / scale
    if frozen_control:
        b_i[:2] = 0.0
    return _assemble(b_i, b_j, coupling.e_coupling / scale, cp_i.gate_charge, cp_j.gate_charge)


def _assemble(b_i, b_j, e_coupling, nx_i, nx_j) -> np.ndarray:
    h_i = -0.5 * (b_i[0] * SIGMA_X + b_i[1] * SIGMA_Y + b_i[2] * SIGMA_Z)
    h_j = -0.5 * (b_j[0] * SIGMA_X + b_j[1] * SIGMA_Y + b_j[2] * SIGMA_Z)
    h_c = -e_coupling * np.kron(CHARGE - nx_i * IDENTITY, CHARGE - nx_j * IDENTITY)
    return np.kron(h_i, IDENTITY) + np.kron(IDENTITY, h_j) + h_c


def full_two_qubit_evolve(
    params_i: DeviceParams,
    params_j: DeviceParams,
    schedules: Tuple[Schedule, Schedule],
    coupling: CouplingParams,
    psi0: Sequence[complex],
    cfg: IntegratorConfig = IntegratorConfig(),
    frozen_control: bool = False,
) -> TwoQubitTrajectory:
    """
    Integrate the 4x4 model over the target schedule's duration.

    Args:
        schedules: (control schedule, target schedule); the control schedule
            must last at least as long as the target's.
        psi0: four amplitudes, normalized here.
    """
    sched_i, sched_j = schedules
    if sched_i.tau < sched_j.tau:
        raise ValueError(f"Control schedule ({sched_i.tau}) ends before the target's ({sched_j.tau})")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (4,) or np.linalg.norm(psi0) == 0:
        raise ValueError(f"Expected four amplitudes, got shape {psi0.shape}")
    psi0 = psi0 / np.linalg.norm(psi0)

    duration = sched_j.tau
    inner = [t for t in sched_i.breakpoints if 0 < t < duration]
    knots = np.unique(np.concatenate([sched_j.breakpoints, inner]))
    mids = 0.5 * (knots[:-1] + knots[1:])
    seg_i, seg_j = sched_i.segment_index(mids), sched_j.segment_index(mids)
    scale = params_j.energy_scale
    e_coupling = coupling.e_coupling / scale

    def hamiltonian_at(t, segment):
        _, nx_i = sched_i.controls(t, int(seg_i[segment]))
        _, nx_j = sched_j.controls(t, int(seg_j[segment]))
        b_i = sched_i.field(params_i, t, int(seg_i[segment]))[0] / scale
        b_j = sched_j.field(params_j, t, int(seg_j[segment]))[0] / scale
        if frozen_control:
            b_i[:2] = 0.0
        return _assemble(b_i, b_j, e_coupling, nx_i[0], nx_j[0])

    def rhs(t, psi, segment):
        return -1j * (hamiltonian_at(t, segment) @ psi)

    times = np.linspace(0.0, duration, cfg.sample_count)
    if duration == 0:
        return TwoQubitTrajectory(times, np.tile(psi0, (len(times), 1)))
    states, _, drift = integrate(rhs, psi0, knots, times, cfg)
    return TwoQubitTrajectory(times, states, drift)


def branch_operator(
    params_i: DeviceParams,
    params_j: DeviceParams,
    schedules: Tuple[Schedule, Schedule],
    coupling: CouplingParams,
    l: int,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> np.ndarray:
    """
    2x2 target operator of the frozen-control 4x4 model for control
    branch ``l``, read from the evolved |l0> and |l1> columns.
    """
    _check_branch(l)
    columns = []
    for k in range(2):
        psi0 = np.zeros(4, dtype=complex)
        psi0[2 * l + k] = 1.0
        traj = full_two_qubit_evolve(params_i, params_j, schedules, coupling, psi0, cfg, frozen_control=True)
        columns.append(traj.states[-1, 2 * l:2 * l + 2])
    return np.stack(columns, axis=1)


def _cyclic_frame(chi0: float) -> np.ndarray:
    half = 0.5 * chi0
    psi_minus = np.array([-math.sin(half), math.cos(half)], dtype=complex)
    psi_plus = np.array([math.cos(half), math.sin(half)], dtype=complex)
    return np.stack([psi_minus, psi_plus], axis=1)


def two_qubit_operator_from_branches(
    branches: Sequence[np.ndarray],
    chi0s: Sequence[float],
    special_unitary: bool = True,
) -> np.ndarray:
    """
    Block-diagonal 4x4 operator from the per-branch target operators, each
    written in its cyclic basis (psi_-, psi_+) at polar angle ``chi0s[l]``.
    With ``special_unitary`` every block is divided by the square root of
    its determinant, dropping branch-dependent scalar phases.
    """
    if len(branches) != 2 or len(chi0s) != 2:
        raise ValueError("Expected one operator and one polar angle per control branch")
    out = np.zeros((4, 4), dtype=complex)
    for l, (u, chi0) in enumerate(zip(branches, chi0s)):
        frame = _cyclic_frame(chi0)
        block = frame.conj().T @ np.asarray(u, dtype=complex) @ frame
        if special_unitary:
            block = block / np.sqrt(np.linalg.det(block))
        out[2 * l:2 * l + 2, 2 * l:2 * l + 2] = block
    return out

