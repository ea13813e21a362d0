# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
from .qubit import (
    HBAR,
    DeviceParams,
    ControlPoint,
    FieldVector,
    SpinState,
    BlochVector,
    CyclicBasis,
    josephson_energy,
    mixing_angle,
    field_components,
    effective_field,
    hamiltonian,
    bloch_map,
    bloch_to_state,
    spin_state,
    aligned_state,
    ground_state,
    cyclic_basis,
)
from .gates import (
    CNOT,
    is_unitary,
    u1_sq,
    u2_sq,
    cyclic_gate,
    conditional_gate,
    xor_compose,
    measure_p1,
    measure_p1_closed,
    fidelity,
    off_diagonal_mass,
)
from .coupled import (
    CouplingParams,
    TwoQubitTrajectory,
    conditional_field,
    conditional_chi0,
    process_ii_conditional,
    evolve_conditional,
    conditional_phase,
    two_qubit_hamiltonian,
    full_two_qubit_evolve,
    branch_operator,
    two_qubit_operator_from_branches,
)


def reference_device(**kwargs) -> DeviceParams:
    """
    Device with E2 = 4 E1 = 6.25 μeV and E_ch = 5 (E1 + E2), tau0 ≈ 84.25 ps.
    Keyword arguments override single energies.
    """
    energies = dict(e1=1.5625, e2=6.25, ech=39.0625)
    energies.update(kwargs)
    return DeviceParams(**energies)
