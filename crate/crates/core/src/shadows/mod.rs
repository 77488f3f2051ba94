//! Classical shadows of pseudo-Choi states and expectation estimates for the
//! decoding operators.
//!
//! The Clifford flavor rotates the whole register by a uniform Clifford; the
//! Pauli flavor rotates each measured qubit independently. Per-snapshot traces
//! are evaluated in closed form and combined by median of means.

mod clifford;
mod local;
mod mom;
mod source;

pub use clifford::{
    clifford_snapshot_values, collect_clifford_shadow, combine_clifford_values,
    estimate_clifford_expectation, estimate_clifford_expectations, CliffordShadow,
    CliffordSnapshot, DecodingOperatorClifford, DecodingTarget,
};
pub use local::{
    choi_register, collect_pauli_shadow, estimate_pauli_expectation, estimate_pauli_expectations,
    local_clifford_table, pauli_snapshot_values, DecodingOperatorPauli, LocalClifford, LocalTarget,
    PauliShadow, PauliSnapshot, LOCAL_CLIFFORD_COUNT,
};
pub use mom::{default_group_count, median_of_means};
pub use source::StateSource;
