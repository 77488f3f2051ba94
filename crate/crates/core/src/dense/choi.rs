use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{
    density_matrix, hamiltonian_matrix_with_limit, partial_trace, pauli_matrix, CMatrix, DenseLimit,
};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::pauli::{HamiltonianModel, PauliString};

/// `d^{-1/2} Σ_i |i⟩_S |i⟩_A` on `2n` qubits.
pub fn maximally_entangled_state(n: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "need at least one system qubit".into(),
        ));
    }
    let d = 1usize << n;
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amps[i * d + i] = amp;
    }
    StateVector::from_amplitudes(amps)
}

/// Register layout of a `2n+1` qubit resource state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiLayout {
    pub n: usize,
}

impl ChoiLayout {
    pub fn num_qubits(self) -> usize {
        2 * self.n + 1
    }

    pub fn system(self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn ancilla(self) -> std::ops::Range<usize> {
        self.n..2 * self.n
    }

    pub fn control(self) -> usize {
        2 * self.n
    }

    pub fn index(self, s: usize, a: usize, c: usize) -> usize {
        (s << (self.n + 1)) | (a << 1) | c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChoiKind {
    Exact,
    /// Prepared from a block-encoding with normalisation `delta`.
    BlockEncoded {
        delta: f64,
    },
}

#[derive(Debug, Clone)]
pub struct PseudoChoiState {
    pub layout: ChoiLayout,
    pub state: StateVector,
    /// `α` for exact states, `γ` for block-encoded ones.
    pub norm_const: f64,
    pub kind: ChoiKind,
}

impl PseudoChoiState {
    pub fn num_system_qubits(&self) -> usize {
        self.layout.n
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_const * self.norm_const
    }

    /// The value `Tr(ρ O_l)` is divided by to get a coefficient: `α²` or `γ²/Δ`.
    pub fn coefficient_scale(&self) -> f64 {
        match self.kind {
            ChoiKind::Exact => self.norm_sq(),
            ChoiKind::BlockEncoded { delta } => self.norm_sq() / delta,
        }
    }
}

/// `((B ⊗ I)|Φ⟩|0⟩_C + |Φ⟩|1⟩_C) / norm` for an arbitrary `d × d` block `B`.
/// Returns the normalised state and the norm.
pub fn pseudo_choi_from_block(block: &CMatrix) -> Result<(StateVector, f64)> {
    let d = block.nrows();
    if d != block.ncols() || !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "block of shape {:?} is not a qubit operator",
            block.shape()
        )));
    }
    let layout = ChoiLayout {
        n: d.trailing_zeros() as usize,
    };
    let inv = 1.0 / (d as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * d * d];
    for s in 0..d {
        for a in 0..d {
            amps[layout.index(s, a, 0)] = block[(s, a)] * inv;
        }
        amps[layout.index(s, s, 1)] += inv;
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok((StateVector::normalized(amps)?, norm))
}

pub fn pseudo_choi_exact(model: &HamiltonianModel) -> Result<PseudoChoiState> {
    pseudo_choi_exact_with_limit(model, DenseLimit::default())
}

pub fn pseudo_choi_exact_with_limit(
    model: &HamiltonianModel,
    limit: DenseLimit,
) -> Result<PseudoChoiState> {
    let h = hamiltonian_matrix_with_limit(model, limit)?;
    let (state, alpha) = pseudo_choi_from_block(&h)?;
    Ok(PseudoChoiState {
        layout: ChoiLayout {
            n: model.num_qubits(),
        },
        state,
        norm_const: alpha,
        kind: ChoiKind::Exact,
    })
}

/// `(h ⊗ I)|Φ⟩|0⟩_C` and `|Φ⟩|1⟩_C` as dense vectors.
fn decoding_vectors(
    term: &PauliString,
) -> (nalgebra::DVector<Complex64>, nalgebra::DVector<Complex64>) {
    let n = term.num_qubits();
    let layout = ChoiLayout { n };
    let d = 1usize << n;
    let p = pauli_matrix(term);
    let inv = 1.0 / (d as f64).sqrt();
    let mut x = nalgebra::DVector::from_element(2 * d * d, Complex64::new(0.0, 0.0));
    let mut y = x.clone();
    for s in 0..d {
        for a in 0..d {
            x[layout.index(s, a, 0)] = p[(s, a)] * inv;
        }
        y[layout.index(s, s, 1)] = Complex64::new(inv, 0.0);
    }
    (x, y)
}

/// `(H_l ⊗ I)|Φ⟩⟨Φ| ⊗ |0⟩⟨1|_C` on `2n+1` qubits.
pub fn decoding_operator(term: &PauliString) -> CMatrix {
    let (x, y) = decoding_vectors(term);
    &x * y.adjoint()
}

/// `|Φ⟩⟨Φ| ⊗ |1⟩⟨1|_C` on `2n+1` qubits.
pub fn normalization_operator(n: usize) -> CMatrix {
    let (_, y) = decoding_vectors(&PauliString::identity(n));
    &y * y.adjoint()
}

/// `(O + O†, iO − iO†)`.
pub fn hermitian_pair(op: &CMatrix) -> (CMatrix, CMatrix) {
    let adj = op.adjoint();
    let i = Complex64::i();
    (op + &adj, op * i - adj * i)
}

/// `(H_l ⊗ X_C) / 2` on the `n+1` qubits `S ⊗ C`.
pub fn pauli_flavor_operator(term: &PauliString) -> CMatrix {
    let x: PauliString = "X".parse().expect("literal");
    pauli_matrix(&term.tensor(&x)) * Complex64::new(0.5, 0.0)
}

/// `I_S ⊗ |1⟩⟨1|_C` on `n+1` qubits.
pub fn pauli_flavor_normalization(n: usize) -> CMatrix {
    let d = 1usize << (n + 1);
    CMatrix::from_fn(d, d, |r, c| {
        if r == c && r & 1 == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Reduced state of the `S ⊗ C` registers.
pub fn system_control_state(choi: &PseudoChoiState) -> Result<CMatrix> {
    let layout = choi.layout;
    let keep: Vec<usize> = layout
        .system()
        .chain(std::iter::once(layout.control()))
        .collect();
    partial_trace(&density_matrix(&choi.state), layout.num_qubits(), &keep)
}
