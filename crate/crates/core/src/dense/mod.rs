//! Exact dense simulation, used both as the sampling backend for small
//! registers and as the ground-truth oracle for the stabilizer path.

mod block;
mod choi;
mod matrix;
mod state;

pub use block::{
    block_encoding_dilation, block_encoding_dilation_with, delta_for, perturbation_direction,
    prepare_pseudo_choi, BlockEncoding, Perturbation, PerturbationKind, PreparationOutcome,
    Preparer,
};
pub use choi::{
    decoding_operator, hermitian_pair, maximally_entangled_state, normalization_operator,
    pauli_flavor_normalization, pauli_flavor_operator, pseudo_choi_exact,
    pseudo_choi_exact_with_limit, pseudo_choi_from_block, system_control_state, ChoiKind,
    ChoiLayout, PseudoChoiState,
};
pub use matrix::{
    dense_expectation, density_matrix, expectation_density, expectation_state, hamiltonian_matrix,
    hamiltonian_matrix_with_limit, hermitian_eigenvalues, hermitian_function, identity, kron,
    max_abs_diff, partial_trace, pauli_matrix, spectral_norm_hermitian, trace, CMatrix, DenseLimit,
    Quantum,
};
pub(crate) use state::sample_index;
pub use state::{apply_gate_sequence, measure_all, StateVector};
