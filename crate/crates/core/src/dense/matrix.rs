use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{pauli_masks, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{HamiltonianModel, PauliString};

pub type CMatrix = DMatrix<Complex64>;

/// Largest system-register size the dense oracle will build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseLimit(pub usize);

impl Default for DenseLimit {
    fn default() -> Self {
        DenseLimit(8)
    }
}

impl DenseLimit {
    pub fn check(self, system_qubits: usize) -> Result<()> {
        if system_qubits > self.0 {
            return Err(Error::DenseLimit {
                qubits: system_qubits,
                limit: self.0,
            });
        }
        Ok(())
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let n = p.num_qubits();
    let d = 1usize << n;
    let (xm, zm) = pauli_masks(p, n);
    let pre = p.phase().to_complex() * Complex64::i().powu(p.y_count());
    let mut m = CMatrix::from_element(d, d, zero());
    for j in 0..d {
        let sign = if (j & zm).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        m[(j ^ xm, j)] = pre * sign;
    }
    m
}

pub fn hamiltonian_matrix(model: &HamiltonianModel) -> Result<CMatrix> {
    hamiltonian_matrix_with_limit(model, DenseLimit::default())
}

pub fn hamiltonian_matrix_with_limit(
    model: &HamiltonianModel,
    limit: DenseLimit,
) -> Result<CMatrix> {
    limit.check(model.num_qubits())?;
    let d = model.dim();
    let mut h = CMatrix::from_element(d, d, zero());
    for (term, &c) in model.terms().iter().zip(model.coeffs()) {
        let (xm, zm) = pauli_masks(term, model.num_qubits());
        let pre = Complex64::i().powu(term.y_count()) * c;
        for j in 0..d {
            let sign = if (j & zm).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            h[(j ^ xm, j)] += pre * sign;
        }
    }
    Ok(h)
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn spectral_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0, |a, v| a.max(v.abs()))
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = SymmetricEigen::new(m.clone());
    let d = m.nrows();
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        eig.eigenvalues.iter().map(|&v| Complex64::new(f(v), 0.0)),
    ));
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m, v| m.max(v.norm()))
}

pub fn density_matrix(state: &StateVector) -> CMatrix {
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    &v * v.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation_state(state: &StateVector, op: &CMatrix) -> Result<Complex64> {
    if op.nrows() != state.dim() || op.ncols() != state.dim() {
        return Err(Error::InvalidArgument(format!(
            "operator is {}x{} but the state has dimension {}",
            op.nrows(),
            op.ncols(),
            state.dim()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    Ok((v.adjoint() * op * &v)[(0, 0)])
}

/// `Tr(ρ O)`.
pub fn expectation_density(rho: &CMatrix, op: &CMatrix) -> Result<Complex64> {
    if rho.shape() != op.shape() || rho.nrows() != rho.ncols() {
        return Err(Error::InvalidArgument(format!(
            "density {:?} and operator {:?} shapes differ",
            rho.shape(),
            op.shape()
        )));
    }
    let d = rho.nrows();
    Ok((0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| rho[(i, j)] * op[(j, i)])
        .sum())
}

/// Either a pure state or a density matrix.
pub enum Quantum<'a> {
    Pure(&'a StateVector),
    Mixed(&'a CMatrix),
}

pub fn dense_expectation(target: Quantum<'_>, op: &CMatrix) -> Result<Complex64> {
    match target {
        Quantum::Pure(s) => expectation_state(s, op),
        Quantum::Mixed(rho) => expectation_density(rho, op),
    }
}

/// Trace out every qubit not listed in `keep`. Kept qubits stay in their
/// original relative order.
pub fn partial_trace(rho: &CMatrix, num_qubits: usize, keep: &[usize]) -> Result<CMatrix> {
    if rho.nrows() != 1 << num_qubits || keep.iter().any(|&q| q >= num_qubits) {
        return Err(Error::InvalidArgument(
            "partial trace register mismatch".into(),
        ));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !keep.contains(q)).collect();
    let compose = |kept: usize, tr: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in keep.iter().enumerate() {
            if (kept >> (keep.len() - 1 - pos)) & 1 == 1 {
                idx |= 1 << (num_qubits - 1 - q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if (tr >> (traced.len() - 1 - pos)) & 1 == 1 {
                idx |= 1 << (num_qubits - 1 - q);
            }
        }
        idx
    };
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let mut out = CMatrix::from_element(dk, dk, zero());
    for r in 0..dk {
        for c in 0..dk {
            out[(r, c)] = (0..dt).map(|t| rho[(compose(r, t), compose(c, t))]).sum();
        }
    }
    Ok(out)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}
