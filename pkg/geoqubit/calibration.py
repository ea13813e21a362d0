# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Drive-frequency calibration for process II. Over one period the cyclic state
collects the dynamic phase

    2 (E1 + E2) K(m) / (|omega| sin chi0) + pi cos chi0 sign(omega),
    m = -4 E1 E2 / (E1 - E2)^2,

and choosing omega = -4 (E1 + E2) K(m) / (pi sin 2 chi0) cancels it.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from scipy.optimize import brentq
from scipy.special import ellipk

from .data.schedules import ProcessIIParams, process_ii
from .dynamics import IntegratorConfig, evolve_bloch
from .models.qubit import BlochVector, DeviceParams
from .phases import aa_phase, dynamic_phase

__all__ = [
    'ANALYTIC',
    'NUMERIC',
    'CalibrationError',
    'CalibrationResult',
    'elliptic_k',
    'gamma_to_chi0',
    'josephson_period_integral',
    'dynamic_phase_closed_form',
    'simulated_dynamic_phase',
    'omega_zero_dynamic',
    'numeric_zero_dynamic',
    'operation_time_table',
]

logger = logging.getLogger(__name__)

ANALYTIC = 'analytic'
NUMERIC = 'numeric'


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationResult:
    """
    A dynamic-phase-free drive. ``omega`` is in 1/tau0 and ``tau`` in tau0;
    ``gamma_target`` is the signed geometric phase collected per period and
    ``residual_dynamic_phase`` what is left of the dynamic phase after
    removing ``winding`` full turns.
    """
    omega: float
    tau: float
    chi0: float
    gamma_target: float
    residual_dynamic_phase: float
    method: str
    winding: int = 0

    def tau_ns(self, params: DeviceParams) -> float:
        return params.to_ns(self.tau)


def elliptic_k(m: float) -> float:
    """
    Complete elliptic integral of the first kind in the parameter convention,
    K(m) = ∫_0^{pi/2} dθ / sqrt(1 - m sin^2 θ). Process II always needs m <= 0.

    Raises:
        ValueError: for m >= 1 or a non-finite m.
    """
    if not m < 1 or math.isnan(m):
        raise ValueError(f"K(m) needs m < 1, got {m}")
    return float(ellipk(m))


def gamma_to_chi0(gamma: float) -> float:
    """
    Invert gamma = pi (1 - cos chi0) on [0, 2 pi].
    """
    if not 0.0 <= gamma <= 2.0 * math.pi:
        raise ValueError(f"Target geometric phase must lie in [0, 2 pi], got {gamma}")
    return math.acos(min(1.0, max(-1.0, 1.0 - gamma / math.pi)))


def josephson_period_integral(params: DeviceParams, omega: float) -> float:
    """
    ∫ E_J dt over one process II period, 4 (E1 + E2) K(m) / |omega|, in
    internal units (E1 + E2 times tau0).
    """
    if omega == 0:
        raise ValueError("omega must be non-zero")
    return 4.0 * elliptic_k(params.elliptic_parameter) / abs(omega)


def dynamic_phase_closed_form(params: DeviceParams, chi0: float, omega: float) -> float:
    """
    Dynamic phase collected by the cyclic process II state over one period.
    """
    return (0.5 * josephson_period_integral(params, omega) / math.sin(chi0)
            + math.pi * math.cos(chi0) * math.copysign(1.0, omega))


def simulated_dynamic_phase(
    params: DeviceParams,
    chi0: float,
    omega: float,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> float:
    """
    Integrate the cyclic state n(chi0, -omega t) over one period and return
    its dynamic phase.
    """
    sched = process_ii(params, ProcessIIParams(chi0, omega))
    traj = evolve_bloch(params, sched, BlochVector.from_angles(chi0, 0.0), cfg)
    return dynamic_phase(traj)


def _check_chi0(params: DeviceParams, chi0: float):
    if not 0.0 < chi0 < math.pi:
        raise CalibrationError(f"chi0 must lie in (0, pi), got {chi0}")
    if abs(math.sin(2.0 * chi0)) < 1e-12:
        raise CalibrationError(f"The calibration is singular at chi0 = {chi0} (sin 2 chi0 = 0)")
    if params.e1 == params.e2:
        raise CalibrationError("The calibration needs an asymmetric SQUID (e1 != e2)")


def omega_zero_dynamic(
    params: DeviceParams,
    chi0: float,
    winding: int = 0,
    sign: Optional[int] = None,
) -> CalibrationResult:
    """
    Closed-form drive frequency for which the dynamic phase per period is
    2 pi ``winding``. ``winding = 0`` gives -4 (E1 + E2) K(m) / (pi sin 2 chi0);
    for ``winding >= 1`` both drive directions work and ``sign`` picks one
    (default: the direction of the ``winding = 0`` solution).

    Raises:
        CalibrationError: at chi0 in {0, pi/2, pi}, for a symmetric SQUID or
            when no drive of the requested sign reaches the winding.
    """
    _check_chi0(params, chi0)
    if winding < 0:
        raise CalibrationError(f"winding must be non-negative, got {winding}")
    cos_chi0 = math.cos(chi0)
    if sign is None:
        sign = -1 if cos_chi0 > 0 else 1
    denominator = math.pi * (2.0 * winding - cos_chi0 * sign)
    if denominator <= 0:
        raise CalibrationError(f"No drive with sign {sign:+d} reaches winding {winding} at chi0 = {chi0}")
    omega = sign * 2.0 * elliptic_k(params.elliptic_parameter) / (math.sin(chi0) * denominator)
    residual = dynamic_phase_closed_form(params, chi0, omega) - 2.0 * math.pi * winding
    result = CalibrationResult(
        omega=omega,
        tau=2.0 * math.pi / abs(omega),
        chi0=chi0,
        gamma_target=aa_phase(chi0, omega),
        residual_dynamic_phase=residual,
        method=ANALYTIC,
        winding=winding,
    )
    logger.info(f"Calibrated chi0 = {chi0:.6g}: omega = {omega:.10g}, tau = {result.tau:.6g} tau0")
    return result


def numeric_zero_dynamic(
    params: DeviceParams,
    chi0: float,
    bracket: Optional[Tuple[float, float]] = None,
    cfg: IntegratorConfig = IntegratorConfig(),
    winding: int = 0,
) -> CalibrationResult:
    """
    Root-find omega on the simulated dynamic phase with Brent's method.

    Args:
        bracket: frequency interval not containing 0. Defaults to a factor 2
            around the closed-form solution.

    Raises:
        CalibrationError: if the dynamic phase does not change sign over the
            bracket or the bracket straddles omega = 0.
    """
    _check_chi0(params, chi0)
    if bracket is None:
        guess = omega_zero_dynamic(params, chi0, winding=winding).omega
        bracket = (0.5 * guess, 2.0 * guess)
    lo, hi = sorted(bracket)
    if lo <= 0 <= hi:
        raise CalibrationError(f"Bracket {bracket} must not contain omega = 0")

    def objective(omega):
        return simulated_dynamic_phase(params, chi0, omega, cfg) - 2.0 * math.pi * winding

    f_lo, f_hi = objective(lo), objective(hi)
    if f_lo * f_hi > 0:
        raise CalibrationError(
            f"Dynamic phase has no sign change over [{lo:.6g}, {hi:.6g}] "
            f"({f_lo:.6g}, {f_hi:.6g}), no root in bracket")
    omega = brentq(objective, lo, hi, xtol=1e-13, rtol=1e-13, maxiter=200)
    result = CalibrationResult(
        omega=omega,
        tau=2.0 * math.pi / abs(omega),
        chi0=chi0,
        gamma_target=aa_phase(chi0, omega),
        residual_dynamic_phase=objective(omega),
        method=NUMERIC,
        winding=winding,
    )
    logger.info(f"Root-found chi0 = {chi0:.6g}: omega = {omega:.10g}, "
                f"residual {result.residual_dynamic_phase:.3g}")
    return result


def operation_time_table(params: DeviceParams, gammas: Iterable[float]) -> List[CalibrationResult]:
    """
    Closed-form calibration for several target geometric phases.
    """
    return [omega_zero_dynamic(params, gamma_to_chi0(gamma)) for gamma in gammas]
