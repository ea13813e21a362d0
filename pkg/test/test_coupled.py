# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
import math

import numpy as np
import pytest

from geoqubit.calibration import dynamic_phase_closed_form, omega_zero_dynamic
from geoqubit.data import ProcessIIParams, ProcessIParams, hold, process_i, process_ii
from geoqubit.dynamics import evolve_state
from geoqubit.models import (
    ControlPoint,
    CouplingParams,
    SpinState,
    branch_operator,
    conditional_chi0,
    conditional_field,
    conditional_gate,
    conditional_phase,
    effective_field,
    evolve_conditional,
    fidelity,
    full_two_qubit_evolve,
    off_diagonal_mass,
    process_ii_conditional,
    spin_state,
    two_qubit_hamiltonian,
    two_qubit_operator_from_branches,
)
from geoqubit.models.coupled import CLOSED_FORM, LINE_INTEGRAL
from geoqubit.phases import aa_phase

from .common_utils import DEVICE, TIGHT, phase_distance, set_rng_seed

CHI0 = 2.0 * math.pi / 3.0
NX_CONTROL = 0.2
COUPLING = CouplingParams(0.5)


def _drive():
    return ProcessIIParams(CHI0, omega_zero_dynamic(DEVICE, CHI0).omega)


class TestConditionalField:
    def test_negative_coupling_rejected(self):
        with pytest.raises(ValueError):
            CouplingParams(-0.1)

    def test_offset(self):
        cp = ControlPoint(0.1, 0.3)
        plain = effective_field(DEVICE, cp)
        field0 = conditional_field(DEVICE, cp, COUPLING, NX_CONTROL, 0)
        field1 = conditional_field(DEVICE, cp, COUPLING, NX_CONTROL, 1)
        assert (field0.bx, field0.by) == (plain.bx, plain.by)
        assert field0.bz - field1.bz == pytest.approx(0.5)
        assert field0.bz == pytest.approx(plain.bz + 0.5 * NX_CONTROL)
        assert conditional_field(DEVICE, cp, COUPLING, 1.0, 1) == plain

    def test_uncoupled(self):
        cp = ControlPoint(0.4, 0.7)
        for l in (0, 1):
            assert conditional_field(DEVICE, cp, CouplingParams(0.0), NX_CONTROL, l) == effective_field(DEVICE, cp)
            assert conditional_chi0(DEVICE, CHI0, CouplingParams(0.0), NX_CONTROL, l) == pytest.approx(CHI0)

    def test_invalid_branch(self):
        with pytest.raises(ValueError):
            conditional_field(DEVICE, ControlPoint(0.0, 0.0), COUPLING, NX_CONTROL, 2)

    def test_conditional_schedule_holds_polar_angle(self):
        p = _drive()
        for l in (0, 1):
            chi0_l = conditional_chi0(DEVICE, CHI0, COUPLING, NX_CONTROL, l)
            sched = process_ii_conditional(DEVICE, p, COUPLING, NX_CONTROL, l)
            times = np.linspace(0.0, sched.tau, 257)
            b = sched.field(DEVICE, times)
            b[:, 2] += COUPLING.e_coupling * (NX_CONTROL - l)
            polar = np.arctan2(np.hypot(b[:, 0], b[:, 1]), b[:, 2] - p.omega * DEVICE.energy_scale)
            np.testing.assert_allclose(polar, chi0_l, atol=1e-12)
            assert sched.tau == pytest.approx(p.tau)


class TestConditionalPhase:
    def test_uncoupled_phases_equal(self):
        p = _drive()
        phases = [conditional_phase(DEVICE, p, CouplingParams(0.0), NX_CONTROL, l) for l in (0, 1)]
        assert phases[0] == pytest.approx(phases[1])
        assert phases[0] == pytest.approx(aa_phase(CHI0, p.omega))

    def test_coupling_splits_phases(self):
        p = _drive()
        gamma0 = conditional_phase(DEVICE, p, COUPLING, NX_CONTROL, 0)
        gamma1 = conditional_phase(DEVICE, p, COUPLING, NX_CONTROL, 1)
        assert abs(gamma0 - gamma1) > 1e-3

    @pytest.mark.parametrize('l', [0, 1])
    def test_line_integral_matches_closed_form(self, l):
        p = _drive()
        closed = conditional_phase(DEVICE, p, COUPLING, NX_CONTROL, l, method=CLOSED_FORM)
        simulated = conditional_phase(DEVICE, p, COUPLING, NX_CONTROL, l, method=LINE_INTEGRAL, cfg=TIGHT)
        assert phase_distance(simulated, closed) < 1e-5

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            conditional_phase(DEVICE, _drive(), COUPLING, NX_CONTROL, 0, method='guess')


class TestTwoQubitModel:
    def test_hermitian(self):
        set_rng_seed(16)
        for flux_i, nx_i, flux_j, nx_j in np.random.uniform(-1.0, 1.0, size=(20, 4)):
            h = two_qubit_hamiltonian(DEVICE, DEVICE, ControlPoint(flux_i, nx_i), ControlPoint(flux_j, nx_j),
                                      COUPLING)
            assert h.shape == (4, 4)
            np.testing.assert_allclose(h, h.conj().T, atol=1e-14)

    def test_frozen_control_is_block_diagonal(self):
        h = two_qubit_hamiltonian(DEVICE, DEVICE, ControlPoint(0.3, NX_CONTROL), ControlPoint(0.1, 0.4),
                                  COUPLING, frozen_control=True)
        np.testing.assert_allclose(h[:2, 2:], 0.0, atol=1e-15)

    def test_uncoupled_evolution_factorizes(self):
        target = process_ii(DEVICE, _drive())
        control = process_i(ProcessIParams(0.25, 0.2, target.tau))
        psi_i, psi_j = SpinState(0.8, 0.6j), spin_state(CHI0, 0.0)
        traj = full_two_qubit_evolve(DEVICE, DEVICE, (control, target), CouplingParams(0.0),
                                     np.kron(psi_i.as_array(), psi_j.as_array()), TIGHT)
        single_i = evolve_state(DEVICE, control, psi_i, TIGHT).states[-1]
        single_j = evolve_state(DEVICE, target, psi_j, TIGHT).states[-1]
        overlap = np.vdot(np.kron(single_i, single_j), traj.states[-1])
        assert abs(overlap) == pytest.approx(1.0, abs=1e-8)
        assert traj.norm_drift < 1e-8

    def test_short_control_schedule_rejected(self):
        target = process_ii(DEVICE, _drive())
        control = hold(ControlPoint(0.0, NX_CONTROL), 0.5 * target.tau)
        with pytest.raises(ValueError):
            full_two_qubit_evolve(DEVICE, DEVICE, (control, target), COUPLING, [1, 0, 0, 0], TIGHT)

    @pytest.mark.parametrize('l', [0, 1])
    def test_frozen_control_reduces_to_conditional_field(self, l):
        p = _drive()
        sched = process_ii_conditional(DEVICE, p, COUPLING, NX_CONTROL, l)
        control = hold(ControlPoint(0.0, NX_CONTROL), sched.tau)
        psi_j = spin_state(conditional_chi0(DEVICE, CHI0, COUPLING, NX_CONTROL, l), 0.0)
        psi0 = np.kron(np.eye(2)[l], psi_j.as_array())
        full = full_two_qubit_evolve(DEVICE, DEVICE, (control, sched), COUPLING, psi0, TIGHT, frozen_control=True)
        single = evolve_conditional(DEVICE, sched, COUPLING, NX_CONTROL, l, psi_j, TIGHT)
        assert np.max(np.linalg.norm(full.branch_bloch(l) - single.bloch, axis=1)) < 1e-8
        np.testing.assert_allclose(np.abs(full.states[:, 2 * (1 - l):2 * (1 - l) + 2]), 0.0, atol=1e-14)

    def test_literal_mode_conserves_norm(self):
        p = _drive()
        sched = process_ii_conditional(DEVICE, p, COUPLING, NX_CONTROL, 1)
        control = hold(ControlPoint(0.1, NX_CONTROL), sched.tau)
        traj = full_two_qubit_evolve(DEVICE, DEVICE, (control, sched), COUPLING, [0.6, 0, 0.8, 0], TIGHT)
        np.testing.assert_allclose(np.linalg.norm(traj.states, axis=1), 1.0, atol=1e-12)
        assert len(traj) == TIGHT.sample_count


class TestConditionalGate:
    def test_block_diagonal_gate(self):
        p = _drive()
        control = hold(ControlPoint(0.0, NX_CONTROL), p.tau)
        branches, chi0s, expected = [], [], []
        for l in (0, 1):
            sched = process_ii_conditional(DEVICE, p, COUPLING, NX_CONTROL, l)
            chi0_l = conditional_chi0(DEVICE, CHI0, COUPLING, NX_CONTROL, l)
            branches.append(branch_operator(DEVICE, DEVICE, (control, sched), COUPLING, l, TIGHT))
            chi0s.append(chi0_l)
            expected.append(aa_phase(chi0_l, p.omega) + dynamic_phase_closed_form(DEVICE, chi0_l, p.omega))
        u = two_qubit_operator_from_branches(branches, chi0s)
        assert off_diagonal_mass(u) < 1e-4
        target = conditional_gate(*expected)
        for l in (0, 1):
            block = slice(2 * l, 2 * l + 2)
            assert fidelity(u[block, block], target[block, block]) > 1.0 - 1e-6

    def test_input_validation(self):
        with pytest.raises(ValueError):
            two_qubit_operator_from_branches([np.eye(2)], [1.0])
