use std::borrow::Cow;

use crate::dense::{density_matrix, CMatrix, PseudoChoiState, StateVector};
use crate::error::Result;
use crate::rng::SimRng;

/// Repeatable preparation of one quantum state. Mixed states are drawn as a
/// pure member of an ensemble on each call.
pub trait StateSource: Sync {
    fn num_qubits(&self) -> usize;

    fn draw<'a>(&'a self, rng: &mut SimRng) -> Result<Cow<'a, StateVector>>;

    /// Exact density operator of the ensemble.
    fn density(&self) -> Result<CMatrix>;
}

impl StateSource for StateVector {
    fn num_qubits(&self) -> usize {
        StateVector::num_qubits(self)
    }

    fn draw<'a>(&'a self, _: &mut SimRng) -> Result<Cow<'a, StateVector>> {
        Ok(Cow::Borrowed(self))
    }

    fn density(&self) -> Result<CMatrix> {
        Ok(density_matrix(self))
    }
}

impl StateSource for PseudoChoiState {
    fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    fn draw<'a>(&'a self, _: &mut SimRng) -> Result<Cow<'a, StateVector>> {
        Ok(Cow::Borrowed(&self.state))
    }

    fn density(&self) -> Result<CMatrix> {
        Ok(density_matrix(&self.state))
    }
}

impl<S: StateSource + ?Sized> StateSource for &S {
    fn num_qubits(&self) -> usize {
        (**self).num_qubits()
    }

    fn draw<'a>(&'a self, rng: &mut SimRng) -> Result<Cow<'a, StateVector>> {
        (**self).draw(rng)
    }

    fn density(&self) -> Result<CMatrix> {
        (**self).density()
    }
}
