//! Coefficient recovery from pseudo-Choi states and the sample and query
//! budget formulas.

mod budget;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use budget::{
    chernoff_attempts, epsilon_s_for, shadow_sample_count, shadow_sample_count_real,
    unitary_query_budget, BudgetSpec, UnitaryBudget,
};

use crate::dense::{expectation_density, partial_trace, BlockEncoding, CMatrix, Preparer};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::rng::{self, domain};
use crate::shadows::{
    choi_register, clifford_snapshot_values, collect_clifford_shadow, collect_pauli_shadow,
    combine_clifford_values, median_of_means, pauli_snapshot_values, DecodingOperatorClifford,
    DecodingOperatorPauli, StateSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    #[default]
    Clifford,
    Pauli,
}

/// How expectation values of the decoding operators are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Estimator {
    /// Exact traces against the dense density operator.
    DenseLimit,
    /// Median of means over `groups` groups of `samples` snapshots.
    Shadows { samples: usize, groups: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnOptions {
    pub flavor: Flavor,
    pub estimator: Estimator,
    pub seed: u64,
    /// Normalisation estimates at or below this value abort the run.
    pub norm_floor: f64,
}

impl LearnOptions {
    pub fn new(flavor: Flavor, estimator: Estimator, seed: u64) -> Self {
        Self {
            flavor,
            estimator,
            seed,
            norm_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest `|Im⟨O_l⟩|` over the terms (Clifford flavor).
    pub imaginary_leakage: f64,
    pub group_count: Option<usize>,
    /// Estimates of `Tr(ρ O_l)` for each term.
    pub term_expectations: Vec<f64>,
    /// Estimate of `Tr(ρ O_α)`.
    pub normalization_expectation: f64,
    /// Coefficients before the final rescaling by `Δ` (unitary path).
    pub stage_estimates: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningReport {
    pub flavor: Flavor,
    pub terms: Vec<String>,
    pub coeff_estimates: Vec<f64>,
    /// `α̂²` or `γ̂²`.
    pub norm_estimate: f64,
    pub delta: Option<f64>,
    pub residual_chi: Option<f64>,
    pub l2_error: Option<f64>,
    pub linf_error: Option<f64>,
    pub samples_used: Option<usize>,
    pub queries_used: Option<u64>,
    pub seed: u64,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_sq_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_sq_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_flagged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl LearningReport {
    /// Fill `l2_error` and `linf_error` against known coefficients.
    pub fn with_truth(mut self, truth: &[f64]) -> Result<Self> {
        if truth.len() != self.coeff_estimates.len() {
            return Err(Error::InvalidArgument(format!(
                "{} true coefficients for {} estimates",
                truth.len(),
                self.coeff_estimates.len()
            )));
        }
        let diffs = self
            .coeff_estimates
            .iter()
            .zip(truth)
            .map(|(a, b)| (a - b).abs());
        self.l2_error = Some(diffs.clone().map(|d| d * d).sum::<f64>().sqrt());
        self.linf_error = Some(diffs.fold(0.0, f64::max));
        Ok(self)
    }

    pub fn coeff_l2_norm(&self) -> f64 {
        self.coeff_estimates
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }
}

/// Estimates of every decoding operator, terms first and the normalisation
/// operator last. `samples` holds the real per-snapshot values when shadows
/// were used.
#[derive(Debug, Clone)]
pub(crate) struct OperatorEstimates {
    pub values: Vec<Complex64>,
    pub samples: Option<Vec<Vec<f64>>>,
    pub groups: Option<usize>,
    pub snapshots: Option<usize>,
}

fn check_terms(source_qubits: usize, terms: &[PauliString]) -> Result<usize> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidModel("no terms to learn".into()))?;
    let n = first.num_qubits();
    if source_qubits != 2 * n + 1 {
        return Err(Error::QubitMismatch {
            expected: 2 * n + 1,
            found: source_qubits,
        });
    }
    for t in terms {
        if t.num_qubits() != n {
            return Err(Error::QubitMismatch {
                expected: n,
                found: t.num_qubits(),
            });
        }
        if t.is_identity() {
            return Err(Error::InvalidModel(
                "the identity is not a learnable term".into(),
            ));
        }
    }
    Ok(n)
}

fn check_groups(estimator: Estimator) -> Result<()> {
    if let Estimator::Shadows { samples, groups } = estimator {
        if samples == 0 || groups == 0 || groups > samples {
            return Err(Error::InvalidArgument(format!(
                "{samples} snapshots cannot fill {groups} median-of-means groups"
            )));
        }
    }
    Ok(())
}

pub(crate) fn estimate_operators<S: StateSource>(
    source: &S,
    terms: &[PauliString],
    flavor: Flavor,
    estimator: Estimator,
    seed: u64,
) -> Result<OperatorEstimates> {
    let n = check_terms(source.num_qubits(), terms)?;
    check_groups(estimator)?;
    match (flavor, estimator) {
        (Flavor::Clifford, Estimator::DenseLimit) => {
            let rho = source.density()?;
            let mut ops: Vec<CMatrix> = terms
                .iter()
                .map(|t| Ok(DecodingOperatorClifford::term(t)?.dense()))
                .collect::<Result<_>>()?;
            ops.push(DecodingOperatorClifford::normalization(n)?.dense());
            let values = ops
                .iter()
                .map(|o| expectation_density(&rho, o))
                .collect::<Result<_>>()?;
            Ok(OperatorEstimates {
                values,
                samples: None,
                groups: None,
                snapshots: None,
            })
        }
        (Flavor::Pauli, Estimator::DenseLimit) => {
            let reduced =
                partial_trace(&source.density()?, source.num_qubits(), &choi_register(n))?;
            let mut ops: Vec<CMatrix> = terms
                .iter()
                .map(|t| Ok(DecodingOperatorPauli::term(t)?.dense()))
                .collect::<Result<_>>()?;
            ops.push(DecodingOperatorPauli::normalization(n)?.dense());
            let values = ops
                .iter()
                .map(|o| expectation_density(&reduced, o))
                .collect::<Result<_>>()?;
            Ok(OperatorEstimates {
                values,
                samples: None,
                groups: None,
                snapshots: None,
            })
        }
        (Flavor::Clifford, Estimator::Shadows { samples, groups }) => {
            let mut ops: Vec<_> = terms
                .iter()
                .map(DecodingOperatorClifford::term)
                .collect::<Result<_>>()?;
            ops.push(DecodingOperatorClifford::normalization(n)?);
            let shadow = collect_clifford_shadow(source, samples, seed)?;
            let per_op = clifford_snapshot_values(&shadow, &ops)?;
            let values = per_op
                .iter()
                .map(|v| combine_clifford_values(v, groups))
                .collect::<Result<_>>()?;
            let real = per_op
                .iter()
                .map(|v| v.iter().map(|x| x.re).collect())
                .collect();
            Ok(OperatorEstimates {
                values,
                samples: Some(real),
                groups: Some(groups),
                snapshots: Some(samples),
            })
        }
        (Flavor::Pauli, Estimator::Shadows { samples, groups }) => {
            let mut ops: Vec<_> = terms
                .iter()
                .map(DecodingOperatorPauli::term)
                .collect::<Result<_>>()?;
            ops.push(DecodingOperatorPauli::normalization(n)?);
            let shadow = collect_pauli_shadow(source, &choi_register(n), samples, seed)?;
            let per_op = pauli_snapshot_values(&shadow, &ops)?;
            let values = per_op
                .iter()
                .map(|v| Ok(Complex64::new(median_of_means(v, groups)?, 0.0)))
                .collect::<Result<_>>()?;
            Ok(OperatorEstimates {
                values,
                samples: Some(per_op),
                groups: Some(groups),
                snapshots: Some(samples),
            })
        }
    }
}

/// Divide the term estimates by the normalisation estimate.
fn report_from(
    est: &OperatorEstimates,
    terms: &[PauliString],
    opts: &LearnOptions,
) -> Result<LearningReport> {
    let (norm, term_values) = est
        .values
        .split_last()
        .expect("the normalisation operator is always present");
    let norm = norm.re;
    if !(norm > opts.norm_floor) {
        return Err(Error::NonPositiveNormalization {
            estimate: norm,
            floor: opts.norm_floor,
        });
    }
    Ok(LearningReport {
        flavor: opts.flavor,
        terms: terms.iter().map(PauliString::label).collect(),
        coeff_estimates: term_values.iter().map(|v| v.re / norm).collect(),
        norm_estimate: 1.0 / norm,
        delta: None,
        residual_chi: None,
        l2_error: None,
        linf_error: None,
        samples_used: est.snapshots,
        queries_used: None,
        seed: opts.seed,
        diagnostics: Diagnostics {
            imaginary_leakage: term_values.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
            group_count: est.groups,
            term_expectations: term_values.iter().map(|v| v.re).collect(),
            normalization_expectation: norm,
            stage_estimates: None,
        },
        chi_sq_hat: None,
        chi_sq_std: None,
        chi_flagged: None,
        omega: None,
    })
}

/// Recover coefficients from copies of an exact pseudo-Choi state.
pub fn find_coeff<S: StateSource>(
    source: &S,
    terms: &[PauliString],
    opts: &LearnOptions,
) -> Result<LearningReport> {
    let est = estimate_operators(source, terms, opts.flavor, opts.estimator, opts.seed)?;
    report_from(&est, terms, opts)
}

pub fn find_coeff_clifford<S: StateSource>(
    source: &S,
    terms: &[PauliString],
    estimator: Estimator,
    seed: u64,
) -> Result<LearningReport> {
    find_coeff(
        source,
        terms,
        &LearnOptions::new(Flavor::Clifford, estimator, seed),
    )
}

pub fn find_coeff_pauli<S: StateSource>(
    source: &S,
    terms: &[PauliString],
    estimator: Estimator,
    seed: u64,
) -> Result<LearningReport> {
    find_coeff(
        source,
        terms,
        &LearnOptions::new(Flavor::Pauli, estimator, seed),
    )
}

/// Successful preparations drawn so far and the attempts they took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreparationTally {
    pub successes: u64,
    pub attempts: u64,
}

/// Run the preparation circuit until `required` successes, giving up after
/// `cap` attempts.
pub fn run_preparations(
    prep: &Preparer,
    required: u64,
    cap: u64,
    seed: u64,
) -> Result<PreparationTally> {
    let mut r = rng::substream(seed, domain::PREPARATION, 0);
    let mut tally = PreparationTally {
        successes: 0,
        attempts: 0,
    };
    while tally.successes < required {
        if tally.attempts >= cap {
            return Err(Error::AttemptCapExceeded {
                cap,
                successes: tally.successes,
                required,
            });
        }
        tally.attempts += 1;
        if prep.attempt(&mut r) {
            tally.successes += 1;
        }
    }
    Ok(tally)
}

/// Attempt cap for `required` successes: four times the Chernoff count at the
/// worst case `γ² = 1` and the given failure probability.
pub fn attempt_cap(required: u64, delta: f64) -> u64 {
    (4.0 * chernoff_attempts(required, 1.0, delta)).ceil() as u64
}

/// Learn from a block-encoding: prepare pseudo-Choi states until enough
/// succeed, learn from the successes and rescale by `Δ`. In the dense limit no
/// preparations are simulated.
pub fn find_coeff_unitary(
    be: &BlockEncoding,
    delta: f64,
    terms: &[PauliString],
    opts: &LearnOptions,
    failure_probability: f64,
) -> Result<LearningReport> {
    let prep = Preparer::new(be)?;
    Ok(learn_from_preparations(
        be,
        &prep,
        delta,
        prep.success_state(),
        terms,
        opts,
        failure_probability,
    )?
    .0)
}

/// The unitary path with `source` standing in for the state left behind by a
/// successful preparation.
pub(crate) fn learn_from_preparations<S: StateSource>(
    be: &BlockEncoding,
    prep: &Preparer,
    delta: f64,
    source: &S,
    terms: &[PauliString],
    opts: &LearnOptions,
    failure_probability: f64,
) -> Result<(LearningReport, OperatorEstimates)> {
    if (delta - be.delta).abs() > 1e-12 * be.delta.max(1.0) {
        return Err(Error::Precondition(format!(
            "Δ = {delta} does not match π/(2t) = {}",
            be.delta
        )));
    }
    let queries = match opts.estimator {
        Estimator::DenseLimit => None,
        Estimator::Shadows { samples, .. } => {
            let required = samples as u64;
            let cap = attempt_cap(required, failure_probability);
            Some(run_preparations(prep, required, cap, opts.seed)?.attempts)
        }
    };
    let est = estimate_operators(source, terms, opts.flavor, opts.estimator, opts.seed)?;
    let mut report = report_from(&est, terms, opts)?;
    let stage = std::mem::take(&mut report.coeff_estimates);
    report.coeff_estimates = stage.iter().map(|c| delta * c).collect();
    report.diagnostics.stage_estimates = Some(stage);
    report.delta = Some(delta);
    report.queries_used = queries;
    Ok((report, est))
}
