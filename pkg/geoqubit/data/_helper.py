# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
"""
Plain-text formats written by the command line and read back by the tests:
trajectory CSVs, key=value reports and gate tables. Numbers carry 12
significant digits.
"""
import io
import logging
from typing import Any, Dict, Mapping, TextIO

import numpy as np

from ..dynamics import Trajectory

__all__ = [
    'TRAJECTORY_HEADER',
    'TWO_QUBIT_HEADER',
    'format_number',
    'write_trajectory_csv',
    'read_trajectory_csv',
    'write_two_qubit_csv',
    'read_two_qubit_csv',
    'format_report',
    'read_report',
    'format_gate_table',
    'read_gate_table',
]

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = (
    't', 'phi', 'nxe', 'Bx', 'By', 'Bz', 'bhat_z', 'n_x', 'n_y', 'n_z', 're0', 'im0', 're1', 'im1',
)
TWO_QUBIT_HEADER = ('t', 're00', 'im00', 're01', 'im01', 're10', 'im10', 're11', 'im11')


def format_number(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _write_rows(stream: TextIO, header, rows: np.ndarray):
    np.savetxt(stream, rows, fmt='%.12g', delimiter=',', header=','.join(header), comments='')


def _read_rows(text: str, header) -> np.ndarray:
    lines = text.splitlines()
    # header is the first line that is neither blank nor a comment
    start = next((k for k, line in enumerate(lines) if line.strip() and not line.startswith('#')), None)
    if start is None or tuple(cell.strip() for cell in lines[start].split(',')) != tuple(header):
        raise ValueError(f"Expected header {','.join(header)!r}")
    if not any(line.strip() and not line.startswith('#') for line in lines[start + 1:]):
        return np.empty((0, len(header)))
    rows = np.loadtxt(io.StringIO(text), delimiter=',', comments='#', skiprows=start + 1, ndmin=2)
    if rows.shape[1] != len(header):
        raise ValueError(f"Expected {len(header)} columns, got {rows.shape[1]}")
    return rows


def write_trajectory_csv(traj: Trajectory, stream: TextIO) -> None:
    """
    One row per sample; the field is written in μeV, the spin amplitudes as
    nan for Bloch-only runs and the controls as nan when absent.
    """
    count = len(traj)
    field = traj.field * traj.energy_scale
    bhat_z = field[:, 2] / np.linalg.norm(field, axis=1)
    controls = traj.controls if traj.controls is not None else np.full((count, 2), np.nan)
    states = traj.states if traj.states is not None else np.full((count, 2), np.nan + 0j)
    rows = np.column_stack([
        traj.times,
        controls,
        field,
        bhat_z,
        traj.bloch,
        states[:, 0].real, states[:, 0].imag,
        states[:, 1].real, states[:, 1].imag,
    ])
    _write_rows(stream, TRAJECTORY_HEADER, rows)


def read_trajectory_csv(text: str, energy_scale: float = 1.0) -> Trajectory:
    """
    Rebuild a :class:`Trajectory` from :func:`write_trajectory_csv` output.
    ``energy_scale`` (E1 + E2 in μeV) converts the field back to internal
    units.
    """
    rows = _read_rows(text, TRAJECTORY_HEADER)
    field = rows[:, 3:6] / energy_scale
    bloch = rows[:, 7:10]
    amplitudes = rows[:, 10:14]
    states = None
    if not np.all(np.isnan(amplitudes)):
        states = np.stack([amplitudes[:, 0] + 1j * amplitudes[:, 1],
                           amplitudes[:, 2] + 1j * amplitudes[:, 3]], axis=-1)
    controls = None if np.all(np.isnan(rows[:, 1:3])) else rows[:, 1:3]
    return Trajectory(
        times=rows[:, 0],
        bloch=bloch,
        field=field,
        hamiltonian_expectation=-0.5 * np.einsum('ij,ij->i', field, bloch),
        states=states,
        controls=controls,
        energy_scale=energy_scale,
    )


def write_two_qubit_csv(times: np.ndarray, states: np.ndarray, stream: TextIO) -> None:
    parts = [times]
    for k in range(4):
        parts += [states[:, k].real, states[:, k].imag]
    _write_rows(stream, TWO_QUBIT_HEADER, np.column_stack(parts))


def read_two_qubit_csv(text: str):
    """
    Returns:
        times (ndarray), states (ndarray of shape (N, 4), complex)
    """
    rows = _read_rows(text, TWO_QUBIT_HEADER)
    states = rows[:, 1::2] + 1j * rows[:, 2::2]
    return rows[:, 0], states


def format_report(values: Mapping[str, Any]) -> str:
    return ''.join(f"{key}={format_number(value)}\n" for key, value in values.items())


def read_report(text: str) -> Dict[str, Any]:
    """
    Parse key=value lines; numeric values become int or float.
    """
    report = {}
    for line in io.StringIO(text):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise ValueError(f"Malformed report line {line!r}")
        report[key.strip()] = _parse_value(value.strip())
    return report


def _parse_value(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    if value in ('true', 'false'):
        return value == 'true'
    return value


def format_gate_table(u: np.ndarray) -> str:
    """
    Row-major table of 2N columns alternating real and imaginary parts.
    """
    u = np.asarray(u, dtype=complex)
    lines = []
    for row in u:
        cells = []
        for entry in row:
            cells += [f"{entry.real:.12g}", f"{entry.imag:.12g}"]
        lines.append(' '.join(cells))
    return '\n'.join(lines) + '\n'


def read_gate_table(text: str) -> np.ndarray:
    rows = [[float(cell) for cell in line.split()] for line in io.StringIO(text)
            if line.strip() and not line.startswith('#')]
    table = np.asarray(rows, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 * table.shape[0]:
        raise ValueError(f"A gate table needs N rows of 2N columns, got shape {table.shape}")
    return table[:, 0::2] + 1j * table[:, 1::2]
