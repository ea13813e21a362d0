# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Time evolution of the qubit along a schedule: the two-level Schrödinger
equation i dpsi/dt = H psi and the Bloch precession dn/dt = -B x n, both in
internal units (energies in E1 + E2, times in tau0, hbar = 1).
"""
import argparse
import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .data.schedules import Schedule
from .models.qubit import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    BlochVector,
    DeviceParams,
    FieldVector,
    SpinState,
)

__all__ = [
    'IntegrationError',
    'SingularFieldError',
    'IntegratorConfig',
    'Trajectory',
    'AdiabaticityTrace',
    'CyclicityCheck',
    'integrate',
    'evolve_in_field',
    'evolve_state',
    'evolve_bloch',
    'propagate',
    'simulated_operator',
    'adiabaticity_trace',
    'cyclicity_check',
    'schedule_field',
]

logger = logging.getLogger(__name__)

FieldFn = Callable[[float, int], np.ndarray]


class IntegrationError(RuntimeError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (at t = {time:.12g} tau0)")
        self.time = time


class SingularFieldError(ValueError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (at t = {time:.12g} tau0)")
        self.time = time


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Tolerances and sampling of an integration run.

    Args:
        rel_tol (float): relative tolerance of the adaptive stepper.
        abs_tol (float): absolute tolerance of the adaptive stepper.
        max_step (float): largest step in tau0, ``inf`` lets the stepper decide.
        sample_count (int): number of uniform output samples on [0, tau],
            endpoints included. Keep ``sample_count - 1`` a multiple of 4 so
            process I corners land on samples.
    """
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = math.inf
    sample_count: int = 4097

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError(f"Tolerances must be positive, got {self.rel_tol}, {self.abs_tol}")
        if not self.max_step > 0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")
        if int(self.sample_count) != self.sample_count or self.sample_count < 2:
            raise ValueError(f"sample_count must be an integer >= 2, got {self.sample_count}")

    @staticmethod
    def add_argparse_args(parent_parser):
        parser = argparse.ArgumentParser(parents=[parent_parser], add_help=False)
        group = parser.add_argument_group('integrator')
        group.add_argument('--rel-tol', default=1e-9, type=float,
                           help='relative tolerance of the integrator (default: 1e-9)')
        group.add_argument('--abs-tol', default=1e-11, type=float,
                           help='absolute tolerance of the integrator (default: 1e-11)')
        group.add_argument('--max-step', default=math.inf, type=float,
                           help='maximum step in tau0 units')
        group.add_argument('--sample-count', default=4097, type=int,
                           help='number of output samples per run (default: 4097)')
        return parser

    @classmethod
    def from_argparse_args(cls, args):
        return cls(
            rel_tol=args.rel_tol,
            abs_tol=args.abs_tol,
            max_step=args.max_step,
            sample_count=args.sample_count,
        )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Time-sampled record of an evolution.

    ``field`` and ``hamiltonian_expectation`` are in internal units;
    multiply by ``energy_scale`` for μeV. ``states`` is None for Bloch-only
    runs and ``controls`` (flux, gate charge) is None for runs not driven by
    a schedule. ``accumulated_dynamic`` holds -∫<H> dt from t = 0 at each
    sample, integrated by the stepper; it is None for records read back
    from files.
    """
    times: np.ndarray
    bloch: np.ndarray
    field: np.ndarray
    hamiltonian_expectation: np.ndarray
    states: Optional[np.ndarray] = None
    controls: Optional[np.ndarray] = None
    norm_drift: float = 0.0
    energy_scale: float = 1.0
    accumulated_dynamic: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.times)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def has_states(self) -> bool:
        return self.states is not None

    def state(self, index: int) -> SpinState:
        if self.states is None:
            raise ValueError("Bloch-only trajectory carries no spin states")
        return SpinState.from_array(self.states[index])

    def bloch_vector(self, index: int) -> BlochVector:
        return BlochVector.from_array(self.bloch[index], normalize=True)

    def field_vector(self, index: int) -> FieldVector:
        """Field at sample ``index`` in μeV."""
        return FieldVector.from_array(self.field[index] * self.energy_scale)


class AdiabaticityTrace(NamedTuple):
    times: np.ndarray
    nz: np.ndarray
    bhat_z: np.ndarray
    deviation: np.ndarray
    z_deviation: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviation))

    @property
    def max_z_deviation(self) -> float:
        return float(np.max(self.z_deviation))


class CyclicityCheck(NamedTuple):
    is_cyclic: bool
    residual: float


def schedule_field(params: DeviceParams, sched: Schedule) -> FieldFn:
    """
    Field along ``sched`` in internal units, evaluated with the formula of
    the given segment.
    """
    scale = params.energy_scale

    def field_fn(t: float, segment: int) -> np.ndarray:
        return sched.field(params, t, segment)[0] / scale

    return field_fn


def integrate(
    rhs: Callable[[float, np.ndarray, int], np.ndarray],
    y0: np.ndarray,
    knots: Sequence[float],
    sample_times: np.ndarray,
    cfg: IntegratorConfig,
    renormalize: bool = True,
    running_integral: Optional[Callable[[float, np.ndarray, int], float]] = None,
):
    """
    Integrate ``rhs(t, y, segment)`` from ``knots[0]`` to ``knots[-1]``,
    restarting the stepper at every knot. Knots may decrease for backward
    runs; ``sample_times`` must run in the same direction.

    With ``running_integral`` the integral of ``running_integral(t, y, segment)``
    from ``knots[0]`` is carried as one more state component, so the adaptive
    stepper also controls its error. It is appended as the last column of
    ``samples`` and the last entry of ``y_end``, and is left out of the norm.

    Returns:
        samples (ndarray): y at ``sample_times``, shape (len(sample_times), dim).
        y_end (ndarray): y at the final knot.
        drift (float): largest |norm - 1| seen at samples and restarts
            before renormalization.
    """
    y = np.asarray(y0)
    y = y.astype(complex if np.iscomplexobj(y) else float)
    dim = y.size
    if running_integral is not None:
        inner_rhs = rhs

        def rhs(t, v, segment):
            return np.append(inner_rhs(t, v[:dim], segment), running_integral(t, v[:dim], segment))

        y = np.append(y, 0.0)
    sample_times = np.asarray(sample_times, dtype=float)
    samples = np.empty((len(sample_times), y.size), dtype=y.dtype)
    assigned = np.zeros(len(sample_times), dtype=bool)
    drift = 0.0
    num_segments = len(knots) - 1
    backward = knots[-1] < knots[0]

    for k in range(num_segments):
        start, stop = float(knots[k]), float(knots[k + 1])
        segment = num_segments - 1 - k if backward else k
        lo, hi = min(start, stop), max(start, stop)
        mask = (~assigned) & (sample_times >= lo) & (sample_times <= hi)
        seg_times = sample_times[mask]
        if start == stop:
            samples[mask] = y
            assigned |= mask
            continue

        t_eval = seg_times if len(seg_times) and seg_times[-1] == stop else np.append(seg_times, stop)
        sol = solve_ivp(
            lambda t, v: rhs(t, v, segment),
            (start, stop),
            y,
            method='DOP853',
            t_eval=t_eval,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            max_step=cfg.max_step,
        )
        if sol.status != 0:
            failed_at = float(sol.t[-1]) if sol.t.size else start
            raise IntegrationError(sol.message, failed_at)

        values = sol.y.T
        norms = np.linalg.norm(values[:, :dim], axis=1)
        drift = max(drift, float(np.max(np.abs(norms - 1.0))))
        if renormalize:
            values = values.copy()
            values[:, :dim] /= norms[:, None]
        samples[mask] = values[:len(seg_times)]
        assigned |= mask
        y = values[-1]
        logger.debug(f"Segment {segment}: [{start:.6g}, {stop:.6g}] in {sol.nfev} evaluations")

    samples[~assigned] = y
    return samples, y, drift


def _schrodinger_rhs(field_fn: FieldFn):

    def rhs(t, psi, segment):
        bx, by, bz = field_fn(t, segment)
        # -i H psi with H = -1/2 B . sigma
        return 0.5j * ((bx * SIGMA_X + by * SIGMA_Y + bz * SIGMA_Z) @ psi)

    return rhs


def _bloch_rhs(field_fn: FieldFn):

    def rhs(t, n, segment):
        b = field_fn(t, segment)
        return -np.cross(b, n)

    return rhs


def _schrodinger_dynamic_rate(field_fn: FieldFn):

    def rate(t, psi, segment):
        # -<H> = 1/2 B . <sigma>
        bx, by, bz = field_fn(t, segment)
        sigma_b = (bx * SIGMA_X + by * SIGMA_Y + bz * SIGMA_Z) @ psi
        return 0.5 * float(np.vdot(psi, sigma_b).real) / float(np.vdot(psi, psi).real)

    return rate


def _bloch_dynamic_rate(field_fn: FieldFn):

    def rate(t, n, segment):
        return 0.5 * float(np.dot(field_fn(t, segment), n)) / float(np.dot(n, n))

    return rate


def _sample_times(duration: float, cfg: IntegratorConfig) -> np.ndarray:
    return np.linspace(0.0, duration, cfg.sample_count)


def _knots(duration: float, breakpoints: Optional[Sequence[float]]) -> np.ndarray:
    if breakpoints is None:
        return np.array([0.0, duration])
    return np.asarray(breakpoints, dtype=float)


def _sample_fields(field_fn: FieldFn, times: np.ndarray, knots: np.ndarray) -> np.ndarray:
    index = np.clip(np.searchsorted(knots, times, side='right') - 1, 0, len(knots) - 2)
    return np.array([field_fn(t, k) for t, k in zip(times, index)], dtype=float)


def _bloch_of_states(states: np.ndarray) -> np.ndarray:
    a, b = states[:, 0], states[:, 1]
    cross = np.conj(a) * b
    n = np.stack([2.0 * cross.real, 2.0 * cross.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=-1)
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def evolve_in_field(
    field_fn: Callable[[float], np.ndarray],
    duration: float,
    psi0: SpinState,
    cfg: IntegratorConfig = IntegratorConfig(),
    breakpoints: Optional[Sequence[float]] = None,
    energy_scale: float = 1.0,
) -> Trajectory:
    """
    Evolve ``psi0`` under a field given directly as ``field_fn(t)`` in
    internal units. ``breakpoints`` (including 0 and ``duration``) mark
    derivative discontinuities where the stepper restarts.
    """
    return _evolve_state(
        lambda t, segment: np.asarray(field_fn(t), dtype=float),
        duration, psi0, cfg, _knots(duration, breakpoints), energy_scale=energy_scale)


def _evolve_state(field_fn, duration, psi0, cfg, knots, energy_scale=1.0, controls=None):
    if duration < 0:
        raise ValueError(f"Duration must be non-negative, got {duration}")
    times = _sample_times(duration, cfg)
    y0 = psi0.as_array()
    if duration == 0:
        states, drift = np.tile(y0, (len(times), 1)), 0.0
        accumulated = np.zeros(len(times))
    else:
        values, _, drift = integrate(_schrodinger_rhs(field_fn), y0, knots, times, cfg,
                                     running_integral=_schrodinger_dynamic_rate(field_fn))
        states, accumulated = values[:, :2], values[:, 2].real
    field = _sample_fields(field_fn, times, knots)
    bloch = _bloch_of_states(states)
    logger.debug(f"Evolved {len(times)} samples over {duration:.6g} tau0, norm drift {drift:.3g}")
    return Trajectory(
        times=times,
        bloch=bloch,
        field=field,
        hamiltonian_expectation=-0.5 * np.einsum('ij,ij->i', field, bloch),
        states=states,
        controls=controls,
        norm_drift=drift,
        energy_scale=energy_scale,
        accumulated_dynamic=accumulated,
    )


def _controls(sched: Schedule, times: np.ndarray) -> np.ndarray:
    flux, gate_charge = sched.controls(times)
    return np.stack([flux, gate_charge], axis=-1)


def evolve_state(
    params: DeviceParams,
    sched: Schedule,
    psi0: SpinState,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """
    Integrate the Schrödinger equation along ``sched``, restarting at every
    schedule corner.

    Raises:
        IntegrationError: if the stepper fails, with the failing time.
    """
    times = _sample_times(sched.tau, cfg)
    return _evolve_state(
        schedule_field(params, sched),
        sched.tau,
        psi0,
        cfg,
        sched.breakpoints,
        energy_scale=params.energy_scale,
        controls=_controls(sched, times),
    )


def evolve_bloch(
    params: DeviceParams,
    sched: Schedule,
    n0: BlochVector,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """
    Integrate dn/dt = -B x n along ``sched``. The returned trajectory has no
    spin states.
    """
    field_fn = schedule_field(params, sched)
    times = _sample_times(sched.tau, cfg)
    y0 = n0.as_array()
    if sched.tau == 0:
        bloch, drift = np.tile(y0, (len(times), 1)), 0.0
        accumulated = np.zeros(len(times))
    else:
        values, _, drift = integrate(_bloch_rhs(field_fn), y0, sched.breakpoints, times, cfg,
                                     running_integral=_bloch_dynamic_rate(field_fn))
        bloch, accumulated = values[:, :3], values[:, 3]
    field = _sample_fields(field_fn, times, sched.breakpoints)
    return Trajectory(
        times=times,
        bloch=bloch,
        field=field,
        hamiltonian_expectation=-0.5 * np.einsum('ij,ij->i', field, bloch),
        controls=_controls(sched, times),
        norm_drift=drift,
        energy_scale=params.energy_scale,
        accumulated_dynamic=accumulated,
    )


def propagate(
    params: DeviceParams,
    sched: Schedule,
    psi: SpinState,
    cfg: IntegratorConfig = IntegratorConfig(),
    backward: bool = False,
) -> SpinState:
    """
    Final state only. With ``backward`` the state is taken as given at
    t = tau and integrated back to t = 0.
    """
    knots = sched.breakpoints[::-1] if backward else sched.breakpoints
    end_time = np.array([knots[-1]])
    _, y_end, _ = integrate(
        _schrodinger_rhs(schedule_field(params, sched)), psi.as_array(), knots, end_time, cfg)
    return SpinState.from_array(y_end)


def simulated_operator(
    params: DeviceParams,
    sched: Schedule,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> np.ndarray:
    """
    Empirical 2x2 propagator over [0, tau], columns are the evolved charge
    basis states.
    """
    columns = [propagate(params, sched, SpinState(*basis), cfg).as_array()
               for basis in ((1.0, 0.0), (0.0, 1.0))]
    return np.stack(columns, axis=1)


def adiabaticity_trace(traj: Trajectory) -> AdiabaticityTrace:
    """
    Compare n(t) with the field direction B(t)/|B(t)|.

    Raises:
        SingularFieldError: at a sample where the field vanishes.
        ValueError: for an empty trajectory.
    """
    if len(traj) == 0:
        raise ValueError("Cannot trace an empty trajectory")
    magnitude = np.linalg.norm(traj.field, axis=1)
    if np.any(magnitude == 0):
        raise SingularFieldError("Field direction undefined", float(traj.times[np.argmax(magnitude == 0)]))
    bhat = traj.field / magnitude[:, None]
    return AdiabaticityTrace(
        times=traj.times,
        nz=traj.bloch[:, 2],
        bhat_z=bhat[:, 2],
        deviation=np.linalg.norm(traj.bloch - bhat, axis=1),
        z_deviation=np.abs(traj.bloch[:, 2] - bhat[:, 2]),
    )


def cyclicity_check(traj: Trajectory, tol: float = 1e-5) -> CyclicityCheck:
    if traj.duration == 0:
        return CyclicityCheck(True, 0.0)
    residual = float(np.linalg.norm(traj.bloch[-1] - traj.bloch[0]))
    return CyclicityCheck(residual < tol, residual)
