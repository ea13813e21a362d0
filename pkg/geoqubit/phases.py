# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Total, dynamic and geometric phases of sampled evolutions, the solid angle
swept by the field and the closed forms they are checked against.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from .data.schedules import Schedule
from .dynamics import IntegratorConfig, SingularFieldError, Trajectory, cyclicity_check
from .models.qubit import DeviceParams

__all__ = [
    'OVERLAP_MINUS_DYNAMIC',
    'LINE_INTEGRAL',
    'PHASE_METHODS',
    'NonCyclicError',
    'UndefinedPhaseError',
    'SamplingError',
    'PhaseDecomposition',
    'wrap_phase',
    'total_phase',
    'dynamic_phase',
    'geometric_phase_cyclic',
    'pancharatnam_line_integral',
    'unwrapped_azimuth',
    'solid_angle',
    'adiabatic_phase',
    'berry_phases',
    'aa_phase',
    'decompose',
]

logger = logging.getLogger(__name__)

OVERLAP_MINUS_DYNAMIC = 'overlap-minus-dynamic'
LINE_INTEGRAL = 'line-integral'
PHASE_METHODS = (OVERLAP_MINUS_DYNAMIC, LINE_INTEGRAL)

# sin(theta) below this freezes the azimuth
POLE_TOL = 1e-9


class NonCyclicError(ValueError):
    pass


class UndefinedPhaseError(ValueError):
    pass


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseDecomposition:
    """
    Phases of one run in radians. ``total`` and ``geometric`` are wrapped to
    (-pi, pi]; ``winding`` counts the full turns removed from the geometric
    phase and ``dynamic`` is left unwrapped.
    """
    total: float
    dynamic: float
    geometric: float
    method: str
    winding: int = 0

    @property
    def unwrapped_geometric(self) -> float:
        return self.geometric + 2.0 * math.pi * self.winding


def wrap_phase(value: float) -> Tuple[float, int]:
    """
    Split ``value`` into its representative in (-pi, pi] and a winding
    number, value = wrapped + 2 pi winding.
    """
    wrapped = math.pi - math.fmod(math.pi - value, 2.0 * math.pi)
    if wrapped > math.pi:
        wrapped -= 2.0 * math.pi
    elif wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped, int(round((value - wrapped) / (2.0 * math.pi)))


def total_phase(traj: Trajectory) -> float:
    """
    arg <psi(0)|psi(tau)> in (-pi, pi].

    Raises:
        UndefinedPhaseError: if the end points are orthogonal or the
            trajectory carries no spin states.
    """
    if not traj.has_states:
        raise UndefinedPhaseError("The total phase needs spin states, got a Bloch-only trajectory")
    overlap = np.vdot(traj.states[0], traj.states[-1])
    if abs(overlap) < 1e-9:
        raise UndefinedPhaseError(
            f"Initial and final states are orthogonal (|overlap| = {abs(overlap):.3g}), "
            "the Pancharatnam phase is undefined")
    return wrap_phase(float(np.angle(overlap)))[0]


def dynamic_phase(traj: Trajectory) -> float:
    """
    -∫<psi|H|psi> dt over the run. Simulated trajectories carry the integral
    from the stepper, which resolves narrow dips of the field that the
    output grid misses; records without it fall back to composite Simpson
    over the samples.
    """
    if len(traj) < 2 or traj.duration == 0:
        return 0.0
    if traj.accumulated_dynamic is not None:
        return float(traj.accumulated_dynamic[-1] - traj.accumulated_dynamic[0])
    return -float(simpson(traj.hamiltonian_expectation, x=traj.times))


def _raw_geometric(traj: Trajectory, tol: float, require_cyclic: bool) -> float:
    check = cyclicity_check(traj, tol)
    if require_cyclic and not check.is_cyclic:
        raise NonCyclicError(
            f"Trajectory is not cyclic (|n(tau) - n(0)| = {check.residual:.3g} >= {tol:.3g}); "
            "use the line-integral method, which includes the open-path endpoint term")
    return total_phase(traj) - dynamic_phase(traj)


def geometric_phase_cyclic(traj: Trajectory, tol: float = 1e-5) -> float:
    """
    total - dynamic for a cyclic run, wrapped to (-pi, pi]. The winding is
    reported by :func:`decompose`.

    Raises:
        NonCyclicError: if |n(tau) - n(0)| >= tol.
    """
    return wrap_phase(_raw_geometric(traj, tol, require_cyclic=True))[0]


def unwrapped_azimuth(traj: Trajectory) -> np.ndarray:
    """
    Continuous azimuth of the Bloch path. Increments are taken in (-pi, pi]
    and the azimuth is frozen while the path sits on a pole.

    Raises:
        SingularFieldError: if the path passes through the south pole.
        SamplingError: if consecutive samples turn by pi/2 or more.
    """
    n = traj.bloch
    sin_theta = np.hypot(n[:, 0], n[:, 1])
    south = (sin_theta < POLE_TOL) & (n[:, 2] < 0)
    if np.any(south):
        raise SingularFieldError("Bloch path passes through the south pole", float(traj.times[np.argmax(south)]))

    raw = np.arctan2(n[:, 1], n[:, 0])
    azimuth = np.empty_like(raw)
    current = 0.0
    last_raw = None
    for k in range(len(raw)):
        if sin_theta[k] < POLE_TOL:
            # leaving the pole re-attaches to the new azimuth without a step
            last_raw = None
        elif last_raw is None:
            if k == 0:
                current = raw[0]
            last_raw = raw[k]
        else:
            step = wrap_phase(raw[k] - last_raw)[0]
            if abs(step) >= 0.5 * math.pi:
                raise SamplingError(
                    f"Azimuth jumps by {step:.3g} rad at t = {traj.times[k]:.6g}; "
                    "raise sample_count to resolve the path")
            current += step
            last_raw = raw[k]
        azimuth[k] = current
    return azimuth


def pancharatnam_line_integral(traj: Trajectory) -> float:
    """
    Geometric phase of the Bloch path, closed or open:

        gamma = -1/2 ∫ (1 - cos theta) dphi + arg <theta_i, phi_i | theta_f, phi_f>

    The first term is integrated in time as (n x dn/dt)_z / (1 + n_z) with
    dn/dt = -B x n from the stored field. The endpoint term vanishes when the
    path closes.
    """
    if len(traj) < 2 or traj.duration == 0:
        return 0.0
    # checks the south pole and the sampling density
    unwrapped_azimuth(traj)
    n, field = traj.bloch, traj.field
    n_dot = -np.cross(field, n)
    integrand = (n[:, 0] * n_dot[:, 1] - n[:, 1] * n_dot[:, 0]) / (1.0 + n[:, 2])
    line_term = -0.5 * float(simpson(integrand, x=traj.times))

    half_i = 0.5 * math.acos(float(np.clip(n[0, 2], -1.0, 1.0)))
    half_f = 0.5 * math.acos(float(np.clip(n[-1, 2], -1.0, 1.0)))
    # raw endpoint azimuths, the unwrapped one freezes while the path sits on the north pole
    delta = math.atan2(n[-1, 1], n[-1, 0]) - math.atan2(n[0, 1], n[0, 0])
    si, sf = math.sin(half_i), math.sin(half_f)
    endpoint_term = math.atan2(
        math.sin(delta) * si * sf,
        math.cos(half_i) * math.cos(half_f) + si * sf * math.cos(delta),
    )
    return line_term + endpoint_term


def solid_angle(
    params: DeviceParams,
    sched: Schedule,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_span: Optional[Tuple[float, float]] = None,
) -> float:
    """
    Solid angle swept by the field,

        Omega = ∫ (Bx dBy/dt - By dBx/dt) / (|B| (Bz + |B|)) dt,

    with the analytic field rate, Simpson on ``cfg.sample_count`` points per
    smooth segment. ``t_span`` restricts the integral to part of the loop;
    without it the schedule must be closed.

    Raises:
        NonCyclicError: open schedule integrated over its full duration.
        SingularFieldError: the field points to the south pole.
    """
    if t_span is None:
        if not sched.is_closed:
            raise NonCyclicError("The solid angle needs a closed field loop, B(tau) = B(0)")
        t_span = (0.0, sched.tau)
    start, stop = t_span
    if not 0.0 <= start <= stop <= sched.tau:
        raise ValueError(f"t_span {t_span} must lie within [0, {sched.tau}] in increasing order")

    total = 0.0
    knots = sched.breakpoints
    for k in range(sched.num_segments):
        lo, hi = max(start, knots[k]), min(stop, knots[k + 1])
        if hi <= lo:
            continue
        times = np.linspace(lo, hi, cfg.sample_count)
        b = sched.field(params, times, segment=k)
        db = sched.field_rate(params, times, segment=k)
        magnitude = np.linalg.norm(b, axis=1)
        denominator = magnitude * (b[:, 2] + magnitude)
        singular = denominator <= 1e-12 * magnitude ** 2
        if np.any(singular):
            raise SingularFieldError("Field passes through the south pole", float(times[np.argmax(singular)]))
        integrand = (b[:, 0] * db[:, 1] - b[:, 1] * db[:, 0]) / denominator
        total += float(simpson(integrand, x=times))
    return total


def berry_phases(omega_solid: float) -> Tuple[float, float]:
    """
    Berry phases (aligned, anti-aligned) = (-Omega/2, +Omega/2).
    """
    return -0.5 * omega_solid, 0.5 * omega_solid


def adiabatic_phase(
    params: DeviceParams,
    sched: Schedule,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> float:
    """
    Berry phase -Omega/2 of the eigenstate aligned with the field, the
    ground state of -1/2 B . sigma.
    """
    return berry_phases(solid_angle(params, sched, cfg))[0]


def aa_phase(chi0: float, omega: float) -> float:
    """
    Geometric phase per period of the cyclic process II state,
    sign(omega) pi (1 - cos chi0), unwrapped.
    """
    return math.copysign(math.pi * (1.0 - math.cos(chi0)), omega)


def decompose(
    traj: Trajectory,
    method: str = OVERLAP_MINUS_DYNAMIC,
    tol: float = 1e-5,
    allow_noncyclic: bool = False,
) -> PhaseDecomposition:
    """
    Split the phase of a run into dynamic and geometric parts.

    Args:
        traj (Trajectory): the run; the overlap method needs spin states.
        method (str): ``overlap-minus-dynamic`` or ``line-integral``.
        tol (float): cyclicity tolerance on |n(tau) - n(0)|.
        allow_noncyclic (bool): accept open paths. The line-integral method
            then includes its endpoint term; the overlap method returns the
            Pancharatnam total minus the dynamic phase.
    """
    if method not in PHASE_METHODS:
        raise ValueError(f"Unknown phase method {method!r}, expected one of {PHASE_METHODS}")
    dynamic = dynamic_phase(traj)
    if method == OVERLAP_MINUS_DYNAMIC:
        raw = _raw_geometric(traj, tol, require_cyclic=not allow_noncyclic)
        total = total_phase(traj)
    else:
        if not allow_noncyclic:
            check = cyclicity_check(traj, tol)
            if not check.is_cyclic:
                raise NonCyclicError(
                    f"Trajectory is not cyclic (|n(tau) - n(0)| = {check.residual:.3g}); "
                    "pass allow_noncyclic to include the open-path endpoint term")
        raw = pancharatnam_line_integral(traj)
        total = total_phase(traj) if traj.has_states else wrap_phase(dynamic + raw)[0]
    geometric, winding = wrap_phase(raw)
    logger.debug(f"{method}: total {total:.6g}, dynamic {dynamic:.6g}, geometric {geometric:.6g} ({winding})")
    return PhaseDecomposition(total=total, dynamic=dynamic, geometric=geometric, method=method, winding=winding)
