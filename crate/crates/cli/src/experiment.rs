use choi_core::dense::{
    block_encoding_dilation_with, pseudo_choi_exact_with_limit, DenseLimit, Perturbation,
};
use choi_core::learner::{
    find_coeff, find_coeff_unitary, shadow_sample_count, unitary_query_budget, BudgetSpec,
    Estimator, Flavor, LearnOptions, LearningReport,
};
use choi_core::pauli::{parse_pauli, HamiltonianModel};
use choi_core::rng::{derive_seed, domain};
use choi_core::robustness::{
    run_noisy, run_underspecified, PerpState, UnderspecifiedConfig, UnderspecifiedInstance,
};
use choi_core::shadows::default_group_count;
use serde::Serialize;

use crate::config::{EstimatorKind, ExperimentConfig, Mode, RobustnessConfig};
use crate::error::CliError;

/// Budget figures resolved for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedBudget {
    pub epsilon: f64,
    pub delta: f64,
    /// Snapshot count given by the formulas, before any override.
    pub formula_samples: u64,
    pub samples: Option<usize>,
    pub groups: Option<usize>,
    pub norm_sq_bound: f64,
    pub coeff_max: f64,
    pub t: Option<f64>,
    pub norm_bound: Option<f64>,
    pub eps_b: Option<f64>,
    /// Attempts budgeted for `samples` successful preparations.
    pub formula_attempts: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub mode: Mode,
    pub num_qubits: usize,
    pub budget: ResolvedBudget,
    pub report: LearningReport,
}

fn locality(model: &HamiltonianModel) -> usize {
    model
        .terms()
        .iter()
        .map(|t| t.weight())
        .max()
        .unwrap_or(1)
        .max(1)
}

fn observables(flavor: Flavor, terms: usize) -> usize {
    match flavor {
        Flavor::Clifford => 2 * terms + 1,
        Flavor::Pauli => terms + 1,
    }
}

fn estimator_for(
    cfg: &ExperimentConfig,
    formula_samples: u64,
    observable_count: usize,
    delta: f64,
) -> Result<(Estimator, Option<usize>, Option<usize>), CliError> {
    match cfg.estimator {
        EstimatorKind::DenseLimit => Ok((Estimator::DenseLimit, None, None)),
        EstimatorKind::Shadows => {
            let samples = cfg.budget.samples.unwrap_or(formula_samples as usize);
            let groups = match cfg.budget.groups {
                Some(g) => g,
                None => default_group_count(observable_count, delta)?,
            }
            .min(samples);
            Ok((
                Estimator::Shadows { samples, groups },
                Some(samples),
                Some(groups),
            ))
        }
    }
}

/// Run one non-sweep experiment. `seed` drives every random choice except
/// the model generator, which has its own seed.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutcome, CliError> {
    let model = cfg.model.resolve()?;
    match cfg.mode {
        Mode::Exact => run_exact(cfg, &model, seed),
        Mode::Unitary | Mode::Robustness => run_block_encoded(cfg, &model, seed),
        Mode::Sweep => Err(CliError::Config(
            "use the sweep runner for sweep mode".into(),
        )),
    }
}

fn run_exact(
    cfg: &ExperimentConfig,
    model: &HamiltonianModel,
    seed: u64,
) -> Result<RunOutcome, CliError> {
    let b = &cfg.budget;
    let choi = pseudo_choi_exact_with_limit(model, DenseLimit(cfg.dense_limit))?;
    let m = model.num_terms();
    let spec = BudgetSpec {
        locality: locality(model),
        constant: b.constant,
        ..BudgetSpec::new(
            m,
            b.epsilon,
            b.delta,
            b.norm_sq.unwrap_or(choi.norm_sq()),
            b.coeff_max.unwrap_or(model.max_abs_coeff()),
        )
    };
    let formula = shadow_sample_count(&spec, cfg.flavor)? as u64;
    let (estimator, samples, groups) =
        estimator_for(cfg, formula, observables(cfg.flavor, m), b.delta)?;
    let opts = LearnOptions::new(cfg.flavor, estimator, seed);
    let report = find_coeff(&choi, model.terms(), &opts)?.with_truth(model.coeffs())?;
    Ok(RunOutcome {
        mode: Mode::Exact,
        num_qubits: model.num_qubits(),
        budget: ResolvedBudget {
            epsilon: b.epsilon,
            delta: b.delta,
            formula_samples: formula,
            samples,
            groups,
            norm_sq_bound: spec.norm_sq,
            coeff_max: spec.coeff_max,
            t: None,
            norm_bound: None,
            eps_b: None,
            formula_attempts: None,
        },
        report,
    })
}

/// The model actually implemented by the block-encoding, with the hidden
/// term added in robustness mode.
fn full_model(
    model: &HamiltonianModel,
    r: Option<&RobustnessConfig>,
) -> Result<HamiltonianModel, CliError> {
    match r.and_then(|r| r.hidden.as_ref().map(|h| (h, r.chi))) {
        Some((hidden, chi)) => {
            let term = parse_pauli(hidden, model.num_qubits())?;
            Ok(model.with_extra_term(term, chi)?)
        }
        None => Ok(model.clone()),
    }
}

fn run_block_encoded(
    cfg: &ExperimentConfig,
    model: &HamiltonianModel,
    seed: u64,
) -> Result<RunOutcome, CliError> {
    let b = &cfg.budget;
    let robust = if cfg.mode == Mode::Robustness {
        cfg.robustness.as_ref()
    } else {
        None
    };
    let full = full_model(model, robust)?;
    let l1 = full.l1_norm();
    let norm_bound = b.norm_bound.unwrap_or(if l1 > 0.0 { l1 } else { 1.0 });
    let t = b.t.unwrap_or(0.5 / norm_bound);
    if t * norm_bound > 0.5 * (1.0 + 1e-12) {
        return Err(choi_core::Error::Precondition(format!(
            "t = {t} exceeds 1/(2·{norm_bound}) for the configured norm bound"
        ))
        .into());
    }
    let limit = DenseLimit(cfg.dense_limit);
    let perturbation = Perturbation {
        kind: b.perturbation,
        seed: derive_seed(seed, domain::PERTURBATION, 0),
    };
    let be = block_encoding_dilation_with(&full, t, b.eps_b, perturbation, limit)?;
    let m = model.num_terms();
    let spec = BudgetSpec {
        t: Some(t),
        hamiltonian_norm_bound: Some(norm_bound),
        locality: locality(model),
        constant: b.constant,
        ..BudgetSpec::new(
            m,
            b.epsilon,
            b.delta,
            b.norm_sq.unwrap_or(be.gamma_sq()),
            b.coeff_max.unwrap_or(model.max_abs_coeff()),
        )
    };
    let ub = unitary_query_budget(&spec)?;
    let (estimator, samples, groups) =
        estimator_for(cfg, ub.n_s, observables(cfg.flavor, m), ub.delta_s)?;
    let opts = LearnOptions::new(cfg.flavor, estimator, seed);
    if let Some(eps_s) = robust.and_then(|r| r.eps_s) {
        if eps_s * be.gamma_sq() > 1.0 {
            return Err(CliError::Config(format!(
                "ε_s γ² = {} exceeds 1",
                eps_s * be.gamma_sq()
            )));
        }
    }
    let report = match robust {
        Some(
            r @ RobustnessConfig {
                hidden: Some(hidden),
                ..
            },
        ) => {
            let hidden = parse_pauli(hidden, model.num_qubits())?;
            let inst = UnderspecifiedInstance::new(model.clone(), hidden, r.chi)?;
            let ucfg = UnderspecifiedConfig {
                t,
                eps_b: b.eps_b,
                perturbation,
                options: opts,
                failure_probability: ub.delta_ns,
                eps_s: r.eps_s,
                limit,
                omega: r.omega,
            };
            run_underspecified(&inst, &ucfg, seed)?
        }
        Some(r) => run_noisy(
            &be,
            model.terms(),
            r.omega,
            PerpState::MaximallyMixed,
            &opts,
            ub.delta_ns,
        )?,
        None => find_coeff_unitary(&be, be.delta, model.terms(), &opts, ub.delta_ns)?,
    };
    let report = report.with_truth(model.coeffs())?;
    let formula_attempts = samples.map(|s| {
        choi_core::learner::chernoff_attempts(s as u64, spec.norm_sq, ub.delta_ns).ceil() as u64
    });
    Ok(RunOutcome {
        mode: cfg.mode,
        num_qubits: model.num_qubits(),
        budget: ResolvedBudget {
            epsilon: b.epsilon,
            delta: b.delta,
            formula_samples: ub.n_s,
            samples,
            groups,
            norm_sq_bound: spec.norm_sq,
            coeff_max: spec.coeff_max,
            t: Some(t),
            norm_bound: Some(norm_bound),
            eps_b: Some(b.eps_b),
            formula_attempts,
        },
        report,
    })
}
