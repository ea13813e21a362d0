# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Control schedules (flux(t), gate_charge(t)) driving the qubit. Times are in
units of tau0.
"""
import io
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..models.qubit import ControlPoint, DeviceParams, field_components, josephson_energy

__all__ = [
    'PROCESS_I',
    'PROCESS_II',
    'TABULATED',
    'TABULATED_HEADER',
    'ScheduleRangeError',
    'ScheduleParseError',
    'TooFewRowsError',
    'NonMonotoneTimeError',
    'NonNumericCellError',
    'ProcessIParams',
    'ProcessIIParams',
    'Schedule',
    'ProcessISchedule',
    'ProcessIISchedule',
    'TabulatedSchedule',
    'process_i',
    'process_ii',
    'parse_tabulated',
    'hold',
]

logger = logging.getLogger(__name__)

PROCESS_I = 'process-i'
PROCESS_II = 'process-ii'
TABULATED = 'tabulated'

TABULATED_HEADER = ('t', 'flux', 'gate_charge')


class ScheduleRangeError(ValueError):
    def __init__(self, time: float, tau: float):
        super().__init__(f"Schedule evaluated at t = {time!r}, outside [0, {tau!r}]")
        self.time = time


class ScheduleParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TooFewRowsError(ScheduleParseError):
    pass


class NonMonotoneTimeError(ScheduleParseError):
    pass


class NonNumericCellError(ScheduleParseError):
    pass


@dataclass(frozen=True)
class ProcessIParams:
    """
    Rectangle loop in (flux, gate charge): flux up to ``phi_m`` at charge
    degeneracy, gate charge down to ``nxm``, flux back, gate charge back.
    """
    phi_m: float
    nxm: float
    tau: float

    def __post_init__(self):
        if not self.tau > 0 or not math.isfinite(self.tau):
            raise ValueError(f"Process I needs a positive duration, got tau = {self.tau}")
        if not (math.isfinite(self.phi_m) and math.isfinite(self.nxm)):
            raise ValueError("Process I corners must be finite")


@dataclass(frozen=True)
class ProcessIIParams:
    """
    Constant-polar-angle rotating drive. ``omega`` is signed, in 1/tau0.
    """
    chi0: float
    omega: float

    def __post_init__(self):
        if not 0.0 < self.chi0 < math.pi:
            raise ValueError(f"chi0 must lie in (0, pi), got {self.chi0}")
        if self.omega == 0 or not math.isfinite(self.omega):
            raise ValueError(f"omega must be finite and non-zero, got {self.omega}")

    @property
    def tau(self) -> float:
        return 2.0 * math.pi / abs(self.omega)


class Schedule:
    """
    A time-parameterized control curve on [0, tau], made of smooth segments
    joined at ``breakpoints``. Subclasses implement ``_controls`` and
    ``_rates`` for an explicit segment index so that evaluations exactly on a
    corner can pick the side they need.
    """
    kind = ''

    def __init__(self, tau: float, breakpoints, is_closed: bool):
        self._tau = float(tau)
        self._breakpoints = np.asarray(breakpoints, dtype=float)
        self._is_closed = bool(is_closed)

    @property
    def tau(self) -> float:
        return self._tau

    @property
    def breakpoints(self) -> np.ndarray:
        """Segment boundaries, including 0 and tau."""
        return self._breakpoints

    @property
    def num_segments(self) -> int:
        return len(self._breakpoints) - 1

    @property
    def is_closed(self) -> bool:
        return self._is_closed

    def _check_range(self, times: np.ndarray) -> np.ndarray:
        eps = 1e-12 * max(self._tau, 1.0)
        bad = (times < -eps) | (times > self._tau + eps)
        if np.any(bad):
            raise ScheduleRangeError(float(times[bad][0]), self._tau)
        return np.clip(times, 0.0, self._tau)

    def segment_index(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        index = np.searchsorted(self._breakpoints, times, side='right') - 1
        return np.clip(index, 0, self.num_segments - 1)

    def controls(self, times, segment: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Flux and gate charge at ``times``. With ``segment`` given, the
        segment's own formula is used (also at its end points).
        """
        times = self._check_range(np.atleast_1d(np.asarray(times, dtype=float)))
        index = self.segment_index(times) if segment is None else np.full(times.shape, segment)
        return self._controls(times, index)

    def rates(self, times, segment: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Time derivatives of flux and gate charge.
        """
        times = self._check_range(np.atleast_1d(np.asarray(times, dtype=float)))
        index = self.segment_index(times) if segment is None else np.full(times.shape, segment)
        return self._rates(times, index)

    def evaluate(self, t: float) -> ControlPoint:
        flux, gate_charge = self.controls(t)
        return ControlPoint(float(flux[0]), float(gate_charge[0]))

    def field(self, params: DeviceParams, times, segment: Optional[int] = None) -> np.ndarray:
        """
        Fictitious field along the schedule in μeV, shape (len(times), 3).
        """
        flux, gate_charge = self.controls(times, segment)
        return field_components(params, flux, gate_charge)

    def field_rate(self, params: DeviceParams, times, segment: Optional[int] = None) -> np.ndarray:
        """
        Analytic time derivative of the field in μeV per tau0.
        """
        flux, _ = self.controls(times, segment)
        flux_rate, gate_rate = self.rates(times, segment)
        phase = np.pi * flux
        dbx = -np.pi * params.energy_scale * np.sin(phase) * flux_rate
        dby = -np.pi * params.asymmetry * np.cos(phase) * flux_rate
        dbz = -2.0 * params.ech * gate_rate
        return np.stack([dbx, dby, dbz], axis=-1)

    def reversed(self) -> "Schedule":
        return _ReversedSchedule(self)

    def to_table(self, sample_count: int = 1001) -> str:
        """
        Sample the schedule into the tabulated text format.
        """
        times = np.linspace(0.0, self._tau, sample_count)
        flux, gate_charge = self.controls(times)
        lines = [','.join(TABULATED_HEADER)]
        lines += [f"{t:.12g},{f:.12g},{n:.12g}" for t, f, n in zip(times, flux, gate_charge)]
        return '\n'.join(lines) + '\n'

    def _controls(self, times: np.ndarray, index: np.ndarray):
        raise NotImplementedError

    def _rates(self, times: np.ndarray, index: np.ndarray):
        raise NotImplementedError

    def __repr__(self):
        return f"{self.__class__.__name__}(kind={self.kind!r}, tau={self._tau!r}, closed={self._is_closed})"


class _ReversedSchedule(Schedule):

    def __init__(self, base: Schedule):
        super().__init__(base.tau, base.tau - base.breakpoints[::-1], base.is_closed)
        self.kind = base.kind
        self.base = base

    def _controls(self, times, index):
        return self.base._controls(self.tau - times, self.num_segments - 1 - index)

    def _rates(self, times, index):
        flux_rate, gate_rate = self.base._rates(self.tau - times, self.num_segments - 1 - index)
        return -flux_rate, -gate_rate


class ProcessISchedule(Schedule):
    kind = PROCESS_I

    def __init__(self, p: ProcessIParams):
        super().__init__(p.tau, np.linspace(0.0, p.tau, 5), is_closed=True)
        self.params = p

    def _controls(self, times, index):
        p = self.params
        s = times / p.tau
        flux = np.select(
            [index == 0, index == 1, index == 2],
            [4.0 * p.phi_m * s, np.full_like(s, p.phi_m), -4.0 * p.phi_m * s + 3.0 * p.phi_m],
            default=0.0,
        )
        gate_charge = np.select(
            [index == 0, index == 1, index == 2],
            [np.full_like(s, 0.5), 0.5 + 4.0 * (p.nxm - 0.5) * (s - 0.25), np.full_like(s, p.nxm)],
            default=p.nxm + 4.0 * (0.5 - p.nxm) * (s - 0.75),
        )
        return flux, gate_charge

    def _rates(self, times, index):
        p = self.params
        flux_rate = np.select([index == 0, index == 2], [4.0 * p.phi_m / p.tau, -4.0 * p.phi_m / p.tau], 0.0)
        gate_rate = np.select(
            [index == 1, index == 3], [4.0 * (p.nxm - 0.5) / p.tau, 4.0 * (0.5 - p.nxm) / p.tau], 0.0)
        return flux_rate * np.ones_like(times), gate_rate * np.ones_like(times)


class ProcessIISchedule(Schedule):
    """
    flux(t) follows tan(pi flux) = (E1 + E2)/(E1 - E2) tan(omega t) on the
    continuous branch, which makes the field azimuth exactly -omega t; the
    gate charge holds the field's polar angle in the frame rotating at omega
    at chi0. A non-zero ``bz_offset`` (μeV) is compensated in the gate
    charge so that the field including the offset keeps that property.
    """
    kind = PROCESS_II

    def __init__(self, device: DeviceParams, p: ProcessIIParams, bz_offset: float = 0.0):
        if device.e1 == device.e2:
            raise ValueError("Process II needs an asymmetric SQUID (e1 != e2)")
        # E_J is smallest at the quarter periods, the stepper restarts there
        super().__init__(p.tau, np.linspace(0.0, p.tau, 5), is_closed=True)
        self.device = device
        self.params = p
        self.bz_offset = float(bz_offset)
        self.ratio = device.energy_scale / device.asymmetry

    def flux(self, times: np.ndarray) -> np.ndarray:
        u = self.params.omega * times
        c = abs(self.ratio)
        sin_u, cos_u = np.sin(u), np.cos(u)
        theta = u + np.arctan2((c - 1.0) * sin_u * cos_u, cos_u ** 2 + c * sin_u ** 2)
        return np.sign(self.ratio) * theta / np.pi

    def flux_rate(self, times: np.ndarray) -> np.ndarray:
        u = self.params.omega * times
        c = self.ratio
        return self.params.omega * c / (np.pi * (np.cos(u) ** 2 + c ** 2 * np.sin(u) ** 2))

    def _controls(self, times, index):
        device, p = self.device, self.params
        flux = self.flux(times)
        e_j = josephson_energy(device, flux)
        # hbar * omega in μeV is omega (1/tau0) times E1 + E2
        hbar_omega = p.omega * device.energy_scale
        gate_charge = 0.5 * (1.0 - (e_j / math.tan(p.chi0) + hbar_omega - self.bz_offset) / device.ech)
        return flux, gate_charge

    def _rates(self, times, index):
        device, p = self.device, self.params
        flux = self.flux(times)
        flux_rate = self.flux_rate(times)
        e_j = josephson_energy(device, flux)
        e_j_rate = -2.0 * np.pi * device.e1 * device.e2 * np.sin(2.0 * np.pi * flux) / e_j * flux_rate
        gate_rate = -0.5 * e_j_rate / (math.tan(p.chi0) * device.ech)
        return flux_rate, gate_rate


class TabulatedSchedule(Schedule):
    """
    Piecewise-linear interpolation between rows of (t, flux, gate_charge).
    """
    kind = TABULATED

    def __init__(self, times, flux, gate_charge, params: Optional[DeviceParams] = None):
        times = np.asarray(times, dtype=float)
        flux = np.asarray(flux, dtype=float)
        gate_charge = np.asarray(gate_charge, dtype=float)
        if len(times) < 2:
            raise TooFewRowsError(f"a tabulated schedule needs at least 2 rows, got {len(times)}")
        steps = np.diff(times)
        if np.any(steps <= 0):
            row = int(np.argmax(steps <= 0)) + 1
            raise NonMonotoneTimeError(f"time column must increase strictly (row {row + 1})")
        offset = times[0]
        times = times - offset
        self._times = times
        self._flux = flux
        self._gate_charge = gate_charge
        self._flux_slope = np.diff(flux) / steps
        self._gate_slope = np.diff(gate_charge) / steps
        super().__init__(times[-1], times, is_closed=self._endpoints_match(params))

    def _endpoints_match(self, params: Optional[DeviceParams]) -> bool:
        if params is not None:
            start = field_components(params, self._flux[0], self._gate_charge[0])
            end = field_components(params, self._flux[-1], self._gate_charge[-1])
            return bool(np.linalg.norm(end - start) <= 1e-9 * max(np.linalg.norm(start), 1e-300))
        # transverse field flips sign per flux quantum, so only even windings close
        winding = (self._flux[-1] - self._flux[0]) / 2.0
        return bool(abs(winding - round(winding)) <= 1e-9
                    and abs(self._gate_charge[-1] - self._gate_charge[0]) <= 1e-9)

    @property
    def rows(self) -> np.ndarray:
        return np.stack([self._times, self._flux, self._gate_charge], axis=-1)

    def _controls(self, times, index):
        dt = times - self._times[index]
        flux = self._flux[index] + self._flux_slope[index] * dt
        gate_charge = self._gate_charge[index] + self._gate_slope[index] * dt
        return flux, gate_charge

    def _rates(self, times, index):
        return self._flux_slope[index], self._gate_slope[index]


def process_i(p: ProcessIParams) -> ProcessISchedule:
    return ProcessISchedule(p)


def process_ii(params: DeviceParams, p: ProcessIIParams) -> ProcessIISchedule:
    return ProcessIISchedule(params, p)


def hold(cp: ControlPoint, tau: float) -> TabulatedSchedule:
    """
    Constant schedule holding ``cp`` for ``tau``.
    """
    return TabulatedSchedule([0.0, tau], [cp.flux, cp.flux], [cp.gate_charge, cp.gate_charge])


def parse_tabulated(text: str, params: Optional[DeviceParams] = None) -> TabulatedSchedule:
    """
    Parse the comma-separated ``t,flux,gate_charge`` format. Lines starting
    with ``#`` and blank lines are skipped; LF and CRLF are accepted. When the
    first time is not zero the schedule is shifted to start at 0.

    Raises:
        TooFewRowsError, NonMonotoneTimeError, NonNumericCellError, or
        ScheduleParseError for a missing header or a wrong cell count.
    """
    rows = []
    line_numbers = []
    header_seen = False
    for line_number, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        cells = [cell.strip() for cell in line.split(',')]
        if not header_seen:
            if tuple(cells) != TABULATED_HEADER:
                raise ScheduleParseError(
                    f"expected header {','.join(TABULATED_HEADER)!r}, got {line!r}", line_number)
            header_seen = True
            continue
        if len(cells) != 3:
            raise ScheduleParseError(f"expected 3 cells, got {len(cells)}", line_number)
        try:
            values = [float(cell) for cell in cells]
        except ValueError:
            bad = next(cell for cell in cells if not _is_number(cell))
            raise NonNumericCellError(f"non-numeric cell {bad!r}", line_number) from None
        if not all(math.isfinite(v) for v in values):
            raise NonNumericCellError("non-finite cell", line_number)
        rows.append(values)
        line_numbers.append(line_number)

    if not header_seen:
        raise ScheduleParseError("missing header line")
    if len(rows) < 2:
        raise TooFewRowsError(f"a tabulated schedule needs at least 2 rows, got {len(rows)}")
    table = np.asarray(rows)
    steps = np.diff(table[:, 0])
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0)) + 1
        raise NonMonotoneTimeError(
            f"time {table[bad, 0]!r} does not increase past {table[bad - 1, 0]!r}", line_numbers[bad])
    if table[0, 0] != 0:
        logger.debug(f"Shifting tabulated schedule by {-table[0, 0]} to start at t = 0")
    return TabulatedSchedule(table[:, 0], table[:, 1], table[:, 2], params=params)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True
