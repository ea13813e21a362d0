# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
import math

import numpy as np
import pytest

from geoqubit.calibration import omega_zero_dynamic
from geoqubit.data import ProcessIIParams, process_ii
from geoqubit.dynamics import simulated_operator
from geoqubit.models import (
    CNOT,
    CyclicBasis,
    DeviceParams,
    conditional_gate,
    cyclic_gate,
    fidelity,
    is_unitary,
    measure_p1,
    measure_p1_closed,
    off_diagonal_mass,
    u1_sq,
    u2_sq,
    xor_compose,
)
from geoqubit.phases import aa_phase

from .common_utils import DEVICE, TIGHT, set_rng_seed


class TestSingleQubitGates:
    def test_u1_special_angles(self):
        np.testing.assert_allclose(u1_sq(0.0), np.eye(2), atol=1e-15)
        np.testing.assert_allclose(u1_sq(0.5 * math.pi), [[0, 1j], [1j, 0]], atol=1e-15)
        out = u1_sq(0.25 * math.pi) @ np.array([1.0, 0.0])
        np.testing.assert_allclose(np.abs(out), [math.sqrt(0.5)] * 2)

    def test_u2_special_angles(self):
        np.testing.assert_allclose(u2_sq(0.5 * math.pi), np.diag([1, -1]), atol=1e-15)
        np.testing.assert_allclose(u2_sq(math.pi), np.eye(2), atol=1e-15)

    def test_cyclic_gate_reductions(self):
        set_rng_seed(10)
        for gamma in np.random.uniform(-math.pi, math.pi, 10):
            np.testing.assert_allclose(cyclic_gate(gamma, 0.5 * math.pi, 0.0), u1_sq(gamma), atol=1e-15)
            np.testing.assert_allclose(np.exp(-1j * gamma) * cyclic_gate(gamma, 0.0, 0.0), u2_sq(gamma),
                                       atol=1e-15)

    def test_cyclic_gate_spectrum(self):
        set_rng_seed(11)
        for gamma, theta_i, varphi_i in np.random.uniform(0.0, math.pi, size=(20, 3)):
            u = cyclic_gate(gamma, theta_i, varphi_i - 0.5 * math.pi)
            basis = CyclicBasis.from_angles(theta_i, varphi_i - 0.5 * math.pi, 0.0)
            np.testing.assert_allclose(u @ basis.psi_plus, np.exp(1j * gamma) * basis.psi_plus, atol=1e-12)
            np.testing.assert_allclose(u @ basis.psi_minus, np.exp(-1j * gamma) * basis.psi_minus, atol=1e-12)

    def test_full_turn(self):
        np.testing.assert_allclose(cyclic_gate(math.pi, 1.0, 0.3), -np.eye(2), atol=1e-15)

    def test_all_unitary(self):
        set_rng_seed(12)
        for gamma, theta_i, varphi_i in np.random.uniform(-math.pi, math.pi, size=(20, 3)):
            assert is_unitary(u1_sq(gamma))
            assert is_unitary(u2_sq(gamma))
            assert is_unitary(cyclic_gate(gamma, theta_i, varphi_i))
            assert is_unitary(conditional_gate(gamma, theta_i))


class TestTwoQubitGates:
    def test_conditional_gate(self):
        np.testing.assert_allclose(conditional_gate(0.0, 1.5 * math.pi), np.diag([1, 1, 1j, -1j]), atol=1e-15)
        gamma = 0.7
        single = np.diag([np.exp(-1j * gamma), np.exp(1j * gamma)])
        np.testing.assert_allclose(conditional_gate(gamma, gamma), np.kron(np.eye(2), single), atol=1e-15)

    def test_xor(self):
        u = xor_compose()
        assert is_unitary(u)
        np.testing.assert_allclose(u[:2, :2], np.eye(2), atol=1e-12)
        np.testing.assert_allclose(u[2:, 2:], [[0, 1], [-1, 0]], atol=1e-12)
        np.testing.assert_allclose(u[:2, 2:], 0.0, atol=1e-12)
        np.testing.assert_allclose(np.abs(u), np.abs(CNOT), atol=1e-12)

    def test_off_diagonal_mass(self):
        assert off_diagonal_mass(conditional_gate(0.3, 1.1)) == 0.0
        assert off_diagonal_mass(CNOT) == pytest.approx(math.sqrt(2.0))


class TestReadout:
    def test_closed_form_agrees(self):
        set_rng_seed(13)
        for eta, theta_i, gamma in np.random.uniform(0.0, math.pi, size=(1000, 3)):
            basis = CyclicBasis.from_angles(theta_i, 0.0, eta)
            assert measure_p1(basis, gamma) == pytest.approx(measure_p1_closed(eta, theta_i, gamma), abs=1e-12)

    def test_special_cases(self):
        set_rng_seed(14)
        for theta_i, eta in np.random.uniform(0.0, math.pi, size=(20, 2)):
            assert measure_p1_closed(eta, theta_i, 0.0) == pytest.approx(0.5 * (1.0 - math.cos(eta)))
            assert measure_p1_closed(theta_i, theta_i, 0.4) == pytest.approx(0.5 * (1.0 - math.cos(theta_i)))
            assert measure_p1_closed(eta, 0.0, 0.4) == pytest.approx(0.5 * (1.0 - math.cos(eta)))

    def test_probability_matches_evolved_state(self):
        # the read-out formula is |<1| U(gamma) |psi_prepared>|^2
        set_rng_seed(15)
        for eta, theta_i, gamma in np.random.uniform(0.0, math.pi, size=(20, 3)):
            basis = CyclicBasis.from_angles(theta_i, 0.0, eta)
            psi = cyclic_gate(gamma, theta_i, 0.0) @ basis.initial_state().as_array()
            assert abs(psi[1]) ** 2 == pytest.approx(measure_p1(basis, gamma), abs=1e-12)


class TestFidelity:
    def test_cases(self):
        assert fidelity(np.eye(2), np.eye(2)) == pytest.approx(1.0)
        assert fidelity(np.eye(2), 1j * np.eye(2)) == pytest.approx(1.0)
        sigma_x = np.array([[0, 1], [1, 0]])
        assert fidelity(np.eye(2), sigma_x) == pytest.approx(0.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(np.eye(2), np.eye(4))


class TestSimulatedGate:
    @pytest.mark.parametrize('device', [DEVICE, DeviceParams(DEVICE.e2, DEVICE.e1, DEVICE.ech)])
    @pytest.mark.parametrize('chi0', [2.0 * math.pi / 3.0, math.acos(0.75)])
    def test_process_ii_realizes_cyclic_gate(self, device, chi0):
        omega = omega_zero_dynamic(device, chi0).omega
        sched = process_ii(device, ProcessIIParams(chi0, omega))
        u = simulated_operator(device, sched, TIGHT)
        target = cyclic_gate(aa_phase(chi0, omega), chi0, 0.0)
        assert fidelity(u, target) > 1.0 - 1e-5
        np.testing.assert_allclose(u, target, atol=1e-6)
