//! Hamiltonian learning from pseudo-Choi states.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`]: Pauli strings, k-local term enumeration and model generation.
//! * [`dense`]: exact statevector/matrix simulation used as ground truth.
//! * [`stabilizer`]: Clifford tableaux, uniform sampling, gate synthesis and
//!   phase-exact stabilizer inner products.
//! * [`shadows`]: Clifford and Pauli classical shadows and the snapshot trace
//!   formulas for the decoding operators.
//! * [`learner`]: coefficient recovery and sample/query budget calculators.
//! * [`robustness`]: under-specified models and noisy resource states.

pub mod bits;
pub mod circuit;
pub mod dense;
pub mod error;
pub mod learner;
pub mod pauli;
pub mod rng;
pub mod robustness;
pub mod shadows;
pub mod stabilizer;

pub use bits::BitString;
pub use error::{Error, Result};
pub use num_complex::Complex64;
