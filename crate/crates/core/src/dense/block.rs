use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::choi::{ChoiKind, ChoiLayout, PseudoChoiState};
use super::matrix::{
    hamiltonian_matrix_with_limit, hermitian_function, pauli_matrix, spectral_norm_hermitian,
    trace, CMatrix, DenseLimit,
};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::pauli::HamiltonianModel;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Random traceless Hermitian direction.
    #[default]
    Random,
    /// Random direction with zero overlap with every model term.
    OrthogonalToModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub seed: u64,
}

/// Seeded traceless Hermitian matrix with spectral norm 1.
pub fn perturbation_direction(model: &HamiltonianModel, p: Perturbation) -> Result<CMatrix> {
    let d = model.dim();
    let mut r = rng::substream(p.seed, rng::domain::PERTURBATION, 0);
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    });
    let mut e = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let shift = trace(&e) / d as f64;
    for i in 0..d {
        e[(i, i)] -= shift;
    }
    if p.kind == PerturbationKind::OrthogonalToModel {
        for term in model.terms() {
            let pm = pauli_matrix(term);
            let overlap = trace(&(&e * &pm)) / d as f64;
            e -= pm * overlap;
        }
    }
    let norm = spectral_norm_hermitian(&e);
    if norm < 1e-12 {
        return Err(Error::InvalidArgument(
            "no perturbation direction is left after projection".into(),
        ));
    }
    Ok(e / Complex64::new(norm, 0.0))
}

/// Exact unitary dilation of `A = 2H̃t/π` on one block qubit `B` (leading) and the system.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub n: usize,
    pub t: f64,
    pub eps_b: f64,
    /// `π / (2t)`.
    pub delta: f64,
    /// `[[A, √(I−A²)], [√(I−A²), −A]]`, index `b·d + s`.
    pub unitary: CMatrix,
    /// Top-left block `A`.
    pub block: CMatrix,
    /// Realised Hamiltonian `H̃ = Δ·A`.
    pub htilde: CMatrix,
}

impl BlockEncoding {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `d^{-1} Tr(H̃ H_m)` for every model term.
    pub fn realized_coeffs(&self, model: &HamiltonianModel) -> Vec<f64> {
        let d = self.dim() as f64;
        model
            .terms()
            .iter()
            .map(|t| trace(&(&self.htilde * pauli_matrix(t))).re / d)
            .collect()
    }

    /// `γ² = 1 + d^{-1} Tr(A†A)`.
    pub fn gamma_sq(&self) -> f64 {
        1.0 + trace(&(self.block.adjoint() * &self.block)).re / self.dim() as f64
    }

    pub fn success_probability(&self) -> f64 {
        self.gamma_sq() / 2.0
    }
}

pub fn delta_for(t: f64) -> f64 {
    PI / (2.0 * t)
}

pub fn block_encoding_dilation(
    model: &HamiltonianModel,
    t: f64,
    eps_b: f64,
) -> Result<BlockEncoding> {
    block_encoding_dilation_with(
        model,
        t,
        eps_b,
        Perturbation::default(),
        DenseLimit::default(),
    )
}

pub fn block_encoding_dilation_with(
    model: &HamiltonianModel,
    t: f64,
    eps_b: f64,
    perturbation: Perturbation,
    limit: DenseLimit,
) -> Result<BlockEncoding> {
    let h = hamiltonian_matrix_with_limit(model, limit)?;
    let norm = spectral_norm_hermitian(&h);
    if !(t > 0.0 && t.is_finite()) || t * norm > 0.5 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "evolution time {t} must lie in (0, 1/(2‖H‖)] with ‖H‖ = {norm}"
        )));
    }
    if !(0.0..=0.5).contains(&eps_b) {
        return Err(Error::Precondition(format!(
            "block-encoding error {eps_b} must lie in [0, 1/2]"
        )));
    }
    let htilde = if eps_b > 0.0 {
        h + perturbation_direction(model, perturbation)? * Complex64::new(eps_b / t, 0.0)
    } else {
        h
    };
    let delta = delta_for(t);
    let block = &htilde / Complex64::new(delta, 0.0);
    if spectral_norm_hermitian(&block) >= 1.0 {
        return Err(Error::Precondition(
            "block has norm at least one after perturbation".into(),
        ));
    }
    let comp = hermitian_function(&block, |v| (1.0 - v * v).max(0.0).sqrt());
    let d = model.dim();
    let mut unitary = CMatrix::zeros(2 * d, 2 * d);
    unitary.view_mut((0, 0), (d, d)).copy_from(&block);
    unitary.view_mut((0, d), (d, d)).copy_from(&comp);
    unitary.view_mut((d, 0), (d, d)).copy_from(&comp);
    unitary.view_mut((d, d), (d, d)).copy_from(&(-&block));
    Ok(BlockEncoding {
        n: model.num_qubits(),
        t,
        eps_b,
        delta,
        unitary,
        block,
        htilde,
    })
}

/// Result of one run of the preparation circuit.
#[derive(Debug, Clone)]
pub struct PreparationOutcome {
    pub success: bool,
    pub state: Option<PseudoChoiState>,
}

/// Dense simulation of the preparation circuit. The post-measurement state on
/// success is deterministic, so it is computed once and attempts reduce to
/// Bernoulli draws.
#[derive(Debug, Clone)]
pub struct Preparer {
    success_state: PseudoChoiState,
    success_probability: f64,
}

impl Preparer {
    /// `H` on `C`, `U` on `(B, S)` controlled on `C = 0`, then `B` is measured.
    pub fn new(be: &BlockEncoding) -> Result<Self> {
        let d = be.dim();
        let layout = ChoiLayout { n: be.n };
        let phi = 1.0 / (d as f64).sqrt();
        let zero = Complex64::new(0.0, 0.0);
        // Branches with B = 0 and B = 1 after the controlled unitary.
        let mut b0 = vec![zero; 2 * d * d];
        let mut b1 = vec![zero; 2 * d * d];
        for s in 0..d {
            for a in 0..d {
                // |Φ⟩ has support on s' = a only.
                b0[layout.index(s, a, 0)] = be.unitary[(s, a)] * phi * FRAC_1_SQRT_2;
                b1[layout.index(s, a, 0)] = be.unitary[(d + s, a)] * phi * FRAC_1_SQRT_2;
            }
            b0[layout.index(s, s, 1)] = Complex64::new(phi * FRAC_1_SQRT_2, 0.0);
        }
        let p0: f64 = b0.iter().map(|a| a.norm_sqr()).sum();
        let p1: f64 = b1.iter().map(|a| a.norm_sqr()).sum();
        if ((p0 + p1) - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!(
                "preparation branches carry total weight {}",
                p0 + p1
            )));
        }
        let state = StateVector::normalized(b0)?;
        Ok(Self {
            success_state: PseudoChoiState {
                layout,
                state,
                norm_const: (2.0 * p0).sqrt(),
                kind: ChoiKind::BlockEncoded { delta: be.delta },
            },
            success_probability: p0,
        })
    }

    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    pub fn success_state(&self) -> &PseudoChoiState {
        &self.success_state
    }

    pub fn attempt<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.random::<f64>() < self.success_probability
    }
}

pub fn prepare_pseudo_choi(be: &BlockEncoding, seed: u64) -> Result<PreparationOutcome> {
    let prep = Preparer::new(be)?;
    let success = prep.attempt(&mut rng::substream(seed, rng::domain::PREPARATION, 0));
    Ok(PreparationOutcome {
        success,
        state: success.then(|| prep.success_state.clone()),
    })
}
