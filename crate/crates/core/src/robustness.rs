//! Learning when the model misses a term, and learning from noisy copies of
//! the pseudo-Choi state.

use std::borrow::Cow;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{
    block_encoding_dilation_with, hermitian_eigenvalues, trace, BlockEncoding, CMatrix, DenseLimit,
    Perturbation, Preparer, StateVector,
};
use crate::error::{Error, Result};
use crate::learner::{learn_from_preparations, LearnOptions, LearningReport, OperatorEstimates};
use crate::pauli::{hs_inner, HamiltonianModel, PauliString, Phase};
use crate::rng::{self, domain, SimRng};
use crate::shadows::StateSource;

/// A known model plus a hidden Pauli term `χE` orthogonal to every known term.
#[derive(Debug, Clone)]
pub struct UnderspecifiedInstance {
    known: HamiltonianModel,
    hidden: PauliString,
    chi: f64,
}

impl UnderspecifiedInstance {
    pub fn new(known: HamiltonianModel, hidden: PauliString, chi: f64) -> Result<Self> {
        if hidden.num_qubits() != known.num_qubits() {
            return Err(Error::QubitMismatch {
                expected: known.num_qubits(),
                found: hidden.num_qubits(),
            });
        }
        if hidden.phase() != Phase::ONE || hidden.is_identity() {
            return Err(Error::InvalidModel(format!(
                "hidden term {hidden} must be a non-identity Pauli with phase +1"
            )));
        }
        for term in known.terms() {
            if hs_inner(&hidden, term)? != 0.0 {
                return Err(Error::InvalidModel(format!(
                    "hidden term {hidden} overlaps the known term {term}"
                )));
            }
        }
        if !chi.is_finite() {
            return Err(Error::InvalidModel("χ must be finite".into()));
        }
        Ok(Self { known, hidden, chi })
    }

    pub fn known(&self) -> &HamiltonianModel {
        &self.known
    }

    pub fn hidden(&self) -> &PauliString {
        &self.hidden
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// `Σ c_j H_j + χE`.
    pub fn full_model(&self) -> Result<HamiltonianModel> {
        self.known.with_extra_term(self.hidden.clone(), self.chi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub chi_sq_hat: f64,
    pub chi_hat: f64,
    /// `χ̂²` came out negative and was clamped to zero.
    pub clamped: bool,
}

/// `χ̂² = (γ̂² − 1)Δ² − ‖ĉ‖²` and `χ̂ = √max(χ̂², 0)`.
pub fn estimate_chi(gamma_sq_hat: f64, delta: f64, c_hat: &[f64]) -> Result<ChiEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Δ = {delta} must be positive"
        )));
    }
    let chi_sq_hat =
        (gamma_sq_hat - 1.0) * delta * delta - c_hat.iter().map(|c| c * c).sum::<f64>();
    Ok(ChiEstimate {
        chi_sq_hat,
        chi_hat: chi_sq_hat.max(0.0).sqrt(),
        clamped: chi_sq_hat < 0.0,
    })
}

/// Standard error of `χ̂²` by linearising it around the per-snapshot means.
fn chi_sq_standard_error(est: &OperatorEstimates, delta: f64) -> Option<f64> {
    let samples = est.samples.as_ref()?;
    let (norm_samples, term_samples) = samples.split_last()?;
    let count = norm_samples.len();
    if count < 2 {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let a = mean(norm_samples);
    let b: Vec<f64> = term_samples.iter().map(|v| mean(v)).collect();
    let d2 = delta * delta;
    let grad_a = -d2 / (a * a) + 2.0 * d2 * b.iter().map(|x| x * x).sum::<f64>() / a.powi(3);
    let grad_b: Vec<f64> = b.iter().map(|x| -2.0 * d2 * x / (a * a)).collect();
    let influence: Vec<f64> = (0..count)
        .map(|i| {
            grad_a * norm_samples[i]
                + grad_b
                    .iter()
                    .zip(term_samples)
                    .map(|(g, v)| g * v[i])
                    .sum::<f64>()
        })
        .collect();
    let m = mean(&influence);
    let var = influence.iter().map(|u| (u - m).powi(2)).sum::<f64>() / (count - 1) as f64;
    Some((var / count as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnderspecifiedConfig {
    pub t: f64,
    pub eps_b: f64,
    pub perturbation: Perturbation,
    pub options: LearnOptions,
    /// Failure probability used for the preparation attempt cap.
    pub failure_probability: f64,
    /// Target shadow error `ε_s`, checked against `ε_s γ² ≤ 1` when given.
    pub eps_s: Option<f64>,
    pub limit: DenseLimit,
    /// Weight of maximally mixed noise on each prepared state.
    pub omega: f64,
}

/// Learn the known terms from a block-encoding of the full Hamiltonian and
/// read the hidden weight off the leftover normalisation.
pub fn run_underspecified(
    inst: &UnderspecifiedInstance,
    cfg: &UnderspecifiedConfig,
    seed: u64,
) -> Result<LearningReport> {
    let full = inst.full_model()?;
    let be = block_encoding_dilation_with(&full, cfg.t, cfg.eps_b, cfg.perturbation, cfg.limit)?;
    if let Some(eps_s) = cfg.eps_s {
        let gamma_sq = be.gamma_sq();
        if eps_s * gamma_sq > 1.0 {
            return Err(Error::Precondition(format!(
                "ε_s γ² = {} exceeds 1",
                eps_s * gamma_sq
            )));
        }
    }
    let prep = Preparer::new(&be)?;
    let opts = LearnOptions {
        seed,
        ..cfg.options
    };
    let source = mix_noise(
        prep.success_state(),
        cfg.omega,
        PerpState::MaximallyMixed,
        seed,
    )?;
    let (mut report, est) = learn_from_preparations(
        &be,
        &prep,
        be.delta,
        &source,
        inst.known.terms(),
        &opts,
        cfg.failure_probability,
    )?;
    let chi = estimate_chi(report.norm_estimate, be.delta, &report.coeff_estimates)?;
    report.residual_chi = Some(chi.chi_hat);
    report.chi_sq_hat = Some(chi.chi_sq_hat);
    report.chi_flagged = Some(chi.clamped);
    report.chi_sq_std = chi_sq_standard_error(&est, be.delta);
    if cfg.omega > 0.0 {
        report.omega = Some(cfg.omega);
    }
    Ok(report)
}

/// The state mixed in with probability `ω`.
#[derive(Debug, Clone)]
pub enum PerpState {
    MaximallyMixed,
    /// Any density operator on the full register.
    Density(CMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerpKind {
    #[default]
    MaximallyMixed,
}

impl From<PerpKind> for PerpState {
    fn from(kind: PerpKind) -> Self {
        match kind {
            PerpKind::MaximallyMixed => PerpState::MaximallyMixed,
        }
    }
}

/// Eigen-decomposition of a supplied density operator for sampling.
#[derive(Debug, Clone)]
struct Ensemble {
    weights: Vec<f64>,
    states: Vec<StateVector>,
}

impl Ensemble {
    fn new(rho: &CMatrix) -> Result<Self> {
        let eig = nalgebra::SymmetricEigen::new(rho.clone());
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for (i, &w) in eig.eigenvalues.iter().enumerate() {
            if w < -1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "density operator has eigenvalue {w}"
                )));
            }
            if w > 1e-12 {
                weights.push(w);
                states.push(StateVector::normalized(
                    eig.eigenvectors.column(i).iter().copied().collect(),
                )?);
            }
        }
        Ok(Self { weights, states })
    }
}

/// `(1 − ω)ρ + ωρ⊥`, drawn by emitting `ρ⊥` with probability `ω`.
#[derive(Debug, Clone)]
pub struct NoisySource<S> {
    base: S,
    omega: f64,
    perp: PerpState,
    ensemble: Option<Ensemble>,
    seed: u64,
}

impl<S> NoisySource<S> {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn perp(&self) -> &PerpState {
        &self.perp
    }

    pub fn base(&self) -> &S {
        &self.base
    }
}

pub fn mix_noise<S: StateSource>(
    base: S,
    omega: f64,
    perp: PerpState,
    seed: u64,
) -> Result<NoisySource<S>> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::InvalidArgument(format!(
            "ω = {omega} must lie in [0, 1]"
        )));
    }
    let ensemble = match &perp {
        PerpState::MaximallyMixed => None,
        PerpState::Density(rho) => {
            let d = 1usize << base.num_qubits();
            if rho.shape() != (d, d) {
                return Err(Error::InvalidArgument(format!(
                    "ρ⊥ has shape {:?}, expected {d}x{d}",
                    rho.shape()
                )));
            }
            if (trace(rho) - Complex64::new(1.0, 0.0)).norm() > 1e-9
                || crate::dense::max_abs_diff(rho, &rho.adjoint()) > 1e-9
            {
                return Err(Error::InvalidArgument(
                    "ρ⊥ must be Hermitian with unit trace".into(),
                ));
            }
            if hermitian_eigenvalues(rho).iter().any(|&w| w < -1e-9) {
                return Err(Error::InvalidArgument(
                    "ρ⊥ must be positive semidefinite".into(),
                ));
            }
            Some(Ensemble::new(rho)?)
        }
    };
    Ok(NoisySource {
        base,
        omega,
        perp,
        ensemble,
        seed,
    })
}

impl<S: StateSource> StateSource for NoisySource<S> {
    fn num_qubits(&self) -> usize {
        self.base.num_qubits()
    }

    fn draw<'a>(&'a self, r: &mut SimRng) -> Result<Cow<'a, StateVector>> {
        let mut own = rng::substream(self.seed, domain::NOISE, r.random());
        if own.random::<f64>() >= self.omega {
            return self.base.draw(r);
        }
        let n = self.num_qubits();
        Ok(match &self.ensemble {
            None => Cow::Owned(StateVector::basis(n, own.random_range(0..1usize << n))),
            Some(e) => {
                let i = crate::dense::sample_index(e.weights.iter().copied(), &mut own);
                Cow::Borrowed(&e.states[i])
            }
        })
    }

    fn density(&self) -> Result<CMatrix> {
        let base = self.base.density()?;
        let d = base.nrows();
        let perp = match &self.perp {
            PerpState::MaximallyMixed => CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0),
            PerpState::Density(rho) => rho.clone(),
        };
        Ok(base * Complex64::new(1.0 - self.omega, 0.0) + perp * Complex64::new(self.omega, 0.0))
    }
}

/// `2γ²Δ(ε_s + 2ω)`.
pub fn noise_bias_bound(gamma_sq: f64, delta: f64, eps_s: f64, omega: f64) -> f64 {
    2.0 * gamma_sq * delta * (eps_s + 2.0 * omega)
}

/// Largest `ω` the coefficient budget absorbs: `ε_c / (√M γ² √(c̃_max² + Δ²))`.
pub fn noise_tolerance(eps_c: f64, terms: usize, gamma_sq: f64, coeff_max: f64, delta: f64) -> f64 {
    eps_c / ((terms as f64).sqrt() * gamma_sq * (coeff_max * coeff_max + delta * delta).sqrt())
}

/// The unitary-path learner fed with `(1 − ω)|ψ⟩⟨ψ| + ωρ⊥` in place of each
/// successfully prepared state.
pub fn run_noisy(
    be: &BlockEncoding,
    terms: &[PauliString],
    omega: f64,
    perp: PerpState,
    opts: &LearnOptions,
    failure_probability: f64,
) -> Result<LearningReport> {
    let prep = Preparer::new(be)?;
    let source = mix_noise(prep.success_state(), omega, perp, opts.seed)?;
    let (mut report, _) = learn_from_preparations(
        be,
        &prep,
        be.delta,
        &source,
        terms,
        opts,
        failure_probability,
    )?;
    report.omega = Some(omega);
    Ok(report)
}
