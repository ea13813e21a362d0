# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
import math

import numpy as np
import pytest

from geoqubit.data import (
    NonMonotoneTimeError,
    NonNumericCellError,
    ProcessIIParams,
    ProcessIParams,
    ScheduleParseError,
    ScheduleRangeError,
    TooFewRowsError,
    hold,
    parse_tabulated,
    process_i,
    process_ii,
)
from geoqubit.models import ControlPoint, DeviceParams, josephson_energy

from .common_utils import DEVICE, set_rng_seed

# junction energies swapped, E1 > E2
SWAPPED = DeviceParams(6.25, 1.5625, 39.0625)


def _finite_difference(fn, times, h=1e-6):
    return (fn(times + h) - fn(times - h)) / (2.0 * h)


class TestProcessI:
    def test_corners(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 100.0))
        expected = {0.0: (0.0, 0.5), 25.0: (0.25, 0.5), 50.0: (0.25, 0.2), 75.0: (0.0, 0.2), 100.0: (0.0, 0.5)}
        for t, (flux, gate_charge) in expected.items():
            cp = sched.evaluate(t)
            assert cp.flux == pytest.approx(flux, abs=1e-12)
            assert cp.gate_charge == pytest.approx(gate_charge, abs=1e-12)
        assert sched.is_closed
        assert sched.num_segments == 4
        np.testing.assert_allclose(sched.breakpoints, [0.0, 25.0, 50.0, 75.0, 100.0])

    def test_interior(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 8.0))
        cp = sched.evaluate(5.0)
        assert cp.flux == pytest.approx(0.125)
        assert cp.gate_charge == pytest.approx(0.2)

    def test_rates(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 100.0))
        flux_rate, gate_rate = sched.rates([10.0, 30.0, 60.0, 90.0])
        np.testing.assert_allclose(flux_rate, [0.01, 0.0, -0.01, 0.0])
        np.testing.assert_allclose(gate_rate, [0.0, -0.012, 0.0, 0.012])

    def test_segment_formula_at_corner(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 100.0))
        flux_rate, _ = sched.rates(25.0, segment=0)
        assert flux_rate[0] == pytest.approx(0.01)
        flux_rate, _ = sched.rates(25.0, segment=1)
        assert flux_rate[0] == 0.0

    def test_out_of_range(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 10.0))
        with pytest.raises(ScheduleRangeError):
            sched.evaluate(10.5)
        with pytest.raises(ScheduleRangeError):
            sched.controls([-1.0, 1.0])

    def test_invalid_duration(self):
        with pytest.raises(ValueError):
            ProcessIParams(0.25, 0.2, 0.0)

    def test_reversed(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 100.0))
        back = sched.reversed()
        times = np.linspace(0.0, 100.0, 41)
        for forward, backward in zip(sched.controls(100.0 - times), back.controls(times)):
            np.testing.assert_allclose(backward, forward, atol=1e-12)
        np.testing.assert_allclose(back.rates([10.0])[0], [0.0])
        np.testing.assert_allclose(back.rates([90.0])[0], [-0.01])


class TestProcessII:
    @pytest.mark.parametrize('device', [DEVICE, SWAPPED])
    @pytest.mark.parametrize('chi0, omega', [(2.0 * math.pi / 3.0, 1.7601), (math.pi / 3.0, -0.8), (0.4, 3.0)])
    def test_field_angles(self, device, chi0, omega):
        sched = process_ii(device, ProcessIIParams(chi0, omega))
        set_rng_seed(6)
        times = np.random.uniform(0.0, sched.tau, 1000)
        b = sched.field(device, times)
        azimuth = np.arctan2(b[:, 1], b[:, 0])
        np.testing.assert_allclose(np.cos(azimuth + omega * times), 1.0, atol=1e-10)
        # polar angle in the frame rotating with the drive
        bz_rotating = b[:, 2] - omega * device.energy_scale
        polar = np.arctan2(np.hypot(b[:, 0], b[:, 1]), bz_rotating)
        np.testing.assert_allclose(polar, chi0, atol=1e-12)

    def test_period_and_closure(self):
        p = ProcessIIParams(2.0 * math.pi / 3.0, 1.7601)
        sched = process_ii(DEVICE, p)
        assert sched.tau == pytest.approx(2.0 * math.pi / 1.7601)
        assert sched.is_closed
        np.testing.assert_allclose(sched.field(DEVICE, sched.tau), sched.field(DEVICE, 0.0), atol=1e-10)
        assert sched.evaluate(0.0).flux == 0.0

    @pytest.mark.parametrize('device', [DEVICE, SWAPPED])
    def test_knots_at_josephson_minima(self, device):
        sched = process_ii(device, ProcessIIParams(1.0, -0.9))
        np.testing.assert_allclose(sched.breakpoints, np.linspace(0.0, sched.tau, 5))
        flux, _ = sched.controls(sched.breakpoints[[1, 3]])
        np.testing.assert_allclose(josephson_energy(device, flux), abs(device.e1 - device.e2), rtol=1e-12)

    def test_flux_is_continuous(self):
        sched = process_ii(DEVICE, ProcessIIParams(1.0, 2.0))
        times = np.linspace(0.0, sched.tau, 20001)
        flux, _ = sched.controls(times)
        assert np.max(np.abs(np.diff(flux))) < 1e-3
        assert abs(flux[-1] - flux[0]) == pytest.approx(2.0)

    @pytest.mark.parametrize('device', [DEVICE, SWAPPED])
    def test_rates_match_finite_differences(self, device):
        sched = process_ii(device, ProcessIIParams(2.0, -1.3))
        times = np.linspace(0.1, sched.tau - 0.1, 37)
        flux_rate, gate_rate = sched.rates(times)
        np.testing.assert_allclose(flux_rate, _finite_difference(lambda t: sched.controls(t)[0], times),
                                   rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(gate_rate, _finite_difference(lambda t: sched.controls(t)[1], times),
                                   rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(sched.field_rate(device, times),
                                   _finite_difference(lambda t: sched.field(device, t), times),
                                   rtol=1e-6, atol=1e-6)

    def test_josephson_energy_along_drive(self):
        sched = process_ii(DEVICE, ProcessIIParams(2.0, 1.0))
        times = np.linspace(0.0, sched.tau, 101)
        b = sched.field(DEVICE, times)
        flux, _ = sched.controls(times)
        np.testing.assert_allclose(np.hypot(b[:, 0], b[:, 1]), josephson_energy(DEVICE, flux), rtol=1e-12)

    @pytest.mark.parametrize('chi0, omega', [(0.0, 1.0), (math.pi, 1.0), (1.0, 0.0)])
    def test_invalid_params(self, chi0, omega):
        with pytest.raises(ValueError):
            ProcessIIParams(chi0, omega)

    def test_symmetric_squid_rejected(self):
        with pytest.warns(UserWarning):
            symmetric = DeviceParams(2.0, 2.0, 10.0)
        with pytest.raises(ValueError):
            process_ii(symmetric, ProcessIIParams(1.0, 1.0))


class TestTabulated:
    def test_matches_process_i(self):
        sched = process_i(ProcessIParams(0.25, 0.2, 100.0))
        table = parse_tabulated(sched.to_table(1001))
        assert table.is_closed
        set_rng_seed(7)
        times = np.random.uniform(0.0, 100.0, 500)
        for expected, got in zip(sched.controls(times), table.controls(times)):
            np.testing.assert_allclose(got, expected, atol=1e-4)

    def test_comments_and_crlf(self):
        text = "# a comment\r\nt,flux,gate_charge\r\n\r\n0,0,0.5\r\n# inside\r\n2,0.5,0.5\r\n"
        sched = parse_tabulated(text)
        assert sched.tau == 2.0
        assert sched.evaluate(1.0).flux == pytest.approx(0.25)

    def test_shifted_start(self):
        sched = parse_tabulated("t,flux,gate_charge\n5,0,0.5\n7,0.5,0.5\n")
        assert sched.tau == 2.0
        np.testing.assert_allclose(sched.rows[:, 0], [0.0, 2.0])

    def test_closure_rule(self):
        assert parse_tabulated("t,flux,gate_charge\n0,0,0.3\n1,2,0.3\n").is_closed
        assert not parse_tabulated("t,flux,gate_charge\n0,0,0.3\n1,1,0.3\n").is_closed
        assert not parse_tabulated("t,flux,gate_charge\n0,0,0.3\n1,1,0.3\n", params=DEVICE).is_closed
        assert parse_tabulated("t,flux,gate_charge\n0,0,0.3\n1,0.2,0.4\n2,0,0.3\n", params=DEVICE).is_closed

    def test_missing_header(self):
        with pytest.raises(ScheduleParseError, match='header'):
            parse_tabulated("0,0,0.5\n1,0,0.5\n")

    def test_too_few_rows(self):
        with pytest.raises(TooFewRowsError):
            parse_tabulated("t,flux,gate_charge\n0,0,0.5\n")

    def test_non_monotone(self):
        with pytest.raises(NonMonotoneTimeError) as excinfo:
            parse_tabulated("t,flux,gate_charge\n0,0,0.5\n1,0,0.5\n1,0.1,0.5\n")
        assert excinfo.value.line == 4

    def test_non_numeric(self):
        with pytest.raises(NonNumericCellError) as excinfo:
            parse_tabulated("t,flux,gate_charge\n0,0,0.5\n1,abc,0.5\n")
        assert excinfo.value.line == 3
        with pytest.raises(NonNumericCellError):
            parse_tabulated("t,flux,gate_charge\n0,0,0.5\n1,nan,0.5\n")

    def test_wrong_cell_count(self):
        with pytest.raises(ScheduleParseError):
            parse_tabulated("t,flux,gate_charge\n0,0\n1,0,0.5\n")

    def test_hold(self):
        sched = hold(ControlPoint(0.1, 0.3), 4.0)
        assert sched.is_closed
        flux, gate_charge = sched.controls([0.0, 2.0, 4.0])
        np.testing.assert_allclose(flux, 0.1)
        np.testing.assert_allclose(gate_charge, 0.3)
        np.testing.assert_allclose(sched.field_rate(DEVICE, [1.0]), 0.0)
