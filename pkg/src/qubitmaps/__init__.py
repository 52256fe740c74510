"""Qubit dynamical maps under U(1)-symmetric (excitation-conserving) dynamics."""

__version__ = "0.1.0"

from .affine import (
    AffineMap,
    FixedPoint,
    FixedPointFamilyError,
    MapClassification,
    apply,
    choi_matrix,
    classify,
    compose,
    extract_map,
    fixed_points,
    is_cptp,
    is_gibbs_preserving,
    is_phase_covariant,
    is_unital,
    iterate,
    pc_cp_inequalities,
)
from .constructions import (
    GpSolution,
    ThreeQubitParams,
    TwoQubitParams,
    phi_appD_general,
    phi_correlated,
    phi_E_general,
    phi_env_coherent,
    phi_gp_3qubit,
    phi_gp_finetuned,
    phi_pc,
    solve_gp_constraints,
)
from .core import (
    TOL,
    bloch_to_density,
    build_two_qubit_state,
    density_to_bloch,
    expm_hermitian,
    gibbs_bloch,
    kron,
    partial_trace,
)
from .pauli import PauliDecomposition, PauliString, charge, conjugate_decompose, decompose
from .thermo import coherence_trajectory, convergence_steps, delta_D, l1_coherence, relative_entropy
from .u1 import (
    U1Unitary,
    build_general_u1_2q,
    build_xx_hamiltonian_2q,
    build_xx_hamiltonian_3q,
    generator,
    is_u1_symmetric,
    random_u1_unitary,
)
