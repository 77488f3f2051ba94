use choi_core::dense::PerturbationKind;
use choi_core::learner::Flavor;
use choi_core::pauli::{HamiltonianModel, ModelSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Unitary,
    Robustness,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    #[default]
    Shadows,
    DenseLimit,
}

/// Where the Hamiltonian comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSource {
    Inline(HamiltonianModel),
    Generate(GeneratorParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub bound: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_overlaps: Option<usize>,
}

impl ModelSource {
    pub fn resolve(&self) -> Result<HamiltonianModel, CliError> {
        match self {
            ModelSource::Inline(m) => Ok(m.clone()),
            ModelSource::Generate(g) => {
                let spec = ModelSpec {
                    n: g.n,
                    k: g.k,
                    m: g.m,
                    coeff_bound: g.bound,
                    max_overlaps: g.max_overlaps,
                };
                spec.generate(g.seed)
                    .map_err(|e| CliError::Config(format!("model generator: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Multiplier on the sample and query formulas.
    #[serde(default = "default_constant")]
    pub constant: f64,
    /// Explicit snapshot count, bypassing the formulas.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Explicit median-of-means group count.
    #[serde(default)]
    pub groups: Option<usize>,
    #[serde(default)]
    pub t: Option<f64>,
    /// Upper bound on the operator norm of `H`; defaults to the 1-norm of the coefficients.
    #[serde(default)]
    pub norm_bound: Option<f64>,
    #[serde(default)]
    pub eps_b: f64,
    #[serde(default)]
    pub perturbation: PerturbationKind,
    /// Override for the `α²`/`γ²` bound used in the formulas.
    #[serde(default)]
    pub norm_sq: Option<f64>,
    #[serde(default)]
    pub coeff_max: Option<f64>,
}

fn default_epsilon() -> f64 {
    0.2
}

fn default_delta() -> f64 {
    0.1
}

fn default_constant() -> f64 {
    1.0
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            delta: default_delta(),
            constant: default_constant(),
            samples: None,
            groups: None,
            t: None,
            norm_bound: None,
            eps_b: 0.0,
            perturbation: PerturbationKind::default(),
            norm_sq: None,
            coeff_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessConfig {
    /// Term present in the true Hamiltonian but missing from the model.
    #[serde(default)]
    pub hidden: Option<String>,
    #[serde(default)]
    pub chi: f64,
    /// Weight of maximally mixed noise on each prepared state.
    #[serde(default)]
    pub omega: f64,
    /// Target shadow error, checked against `ε_s γ² ≤ 1`.
    #[serde(default)]
    pub eps_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Mode run at every grid point.
    pub base: Mode,
    #[serde(default)]
    pub samples: Vec<usize>,
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub omega: Vec<f64>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

fn default_repeats() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub model: ModelSource,
    #[serde(default)]
    pub flavor: Flavor,
    #[serde(default)]
    pub estimator: EstimatorKind,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default)]
    pub robustness: Option<RobustnessConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dense_limit")]
    pub dense_limit: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_dense_limit() -> usize {
    8
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let b = &self.budget;
        if !(b.epsilon > 0.0 && b.epsilon < 1.0) {
            return bad(format!("budget.epsilon = {} must lie in (0, 1)", b.epsilon));
        }
        if !(b.delta > 0.0 && b.delta < 1.0) {
            return bad(format!("budget.delta = {} must lie in (0, 1)", b.delta));
        }
        if !(b.constant > 0.0 && b.constant.is_finite()) {
            return bad(format!("budget.constant = {} must be positive", b.constant));
        }
        if b.samples == Some(0) {
            return bad("budget.samples must be positive".into());
        }
        if b.groups == Some(0) {
            return bad("budget.groups must be positive".into());
        }
        if let Some(t) = b.t {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("budget.t = {t} must be positive"));
            }
        }
        if let Some(bound) = b.norm_bound {
            if !(bound > 0.0 && bound.is_finite()) {
                return bad(format!("budget.norm_bound = {bound} must be positive"));
            }
        }
        if !(0.0..=0.5).contains(&b.eps_b) {
            return bad(format!("budget.eps_b = {} must lie in [0, 1/2]", b.eps_b));
        }
        if self.dense_limit == 0 {
            return bad("dense_limit must be positive".into());
        }
        if let Some(r) = &self.robustness {
            if !(0.0..=1.0).contains(&r.omega) {
                return bad(format!("robustness.omega = {} must lie in [0, 1]", r.omega));
            }
            if !r.chi.is_finite() {
                return bad("robustness.chi must be finite".into());
            }
        }
        if self.mode == Mode::Robustness {
            self.check_robustness_section(self.robustness.as_ref())?;
        }
        match (&self.mode, &self.sweep) {
            (Mode::Sweep, None) => bad("sweep mode needs a sweep section".into()),
            (Mode::Sweep, Some(s)) => {
                if s.base == Mode::Sweep {
                    return bad("sweep.base cannot itself be sweep".into());
                }
                if s.samples.is_empty()
                    && s.t.is_empty()
                    && s.epsilon.is_empty()
                    && s.omega.is_empty()
                {
                    return bad("sweep mode needs at least one non-empty axis".into());
                }
                if s.repeats == 0 {
                    return bad("sweep.repeats must be positive".into());
                }
                if s.samples.contains(&0) {
                    return bad("sweep.samples entries must be positive".into());
                }
                if s.t.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                    return bad("sweep.t entries must be positive".into());
                }
                if s.epsilon.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                    return bad("sweep.epsilon entries must lie in (0, 1)".into());
                }
                if s.omega.iter().any(|w| !(0.0..=1.0).contains(w)) {
                    return bad("sweep.omega entries must lie in [0, 1]".into());
                }
                if !s.t.is_empty() && s.base == Mode::Exact {
                    return bad("a t axis needs base unitary or robustness".into());
                }
                if !s.omega.is_empty() && s.base != Mode::Robustness {
                    return bad("an omega axis needs base robustness".into());
                }
                if s.base == Mode::Robustness && self.robustness.is_none() && s.omega.is_empty() {
                    return bad(
                        "robustness base needs a robustness section or an omega axis".into(),
                    );
                }
                Ok(())
            }
            (_, Some(_)) => bad("a sweep section is only allowed in sweep mode".into()),
            (_, None) => Ok(()),
        }
    }

    fn check_robustness_section(&self, r: Option<&RobustnessConfig>) -> Result<(), CliError> {
        match r {
            None => Err(CliError::Config(
                "robustness mode needs a robustness section".into(),
            )),
            Some(r) if r.hidden.is_none() && r.omega == 0.0 => Err(CliError::Config(
                "robustness mode needs a hidden term or a positive omega".into(),
            )),
            Some(_) => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
