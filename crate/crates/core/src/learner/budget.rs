use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Flavor;
use crate::error::{Error, Result};

/// Inputs to the sample and query budget formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    /// Number of terms `M`.
    pub terms: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Upper bound on `α²` (exact states) or `γ²` (block-encoded states).
    pub norm_sq: f64,
    /// Upper bound on `max |c_l|`.
    pub coeff_max: f64,
    /// Evolution time, used by the unitary budget only.
    #[serde(default)]
    pub t: Option<f64>,
    /// Upper bound on `‖H‖`, used to check `t`.
    #[serde(default)]
    pub hamiltonian_norm_bound: Option<f64>,
    /// Locality `k`, used by the Pauli flavor only.
    #[serde(default = "default_locality")]
    pub locality: usize,
    /// Multiplier for the formulas whose constant is left open.
    #[serde(default = "default_constant")]
    pub constant: f64,
}

fn default_locality() -> usize {
    1
}

fn default_constant() -> f64 {
    1.0
}

impl BudgetSpec {
    pub fn new(terms: usize, epsilon: f64, delta: f64, norm_sq: f64, coeff_max: f64) -> Self {
        Self {
            terms,
            epsilon,
            delta,
            norm_sq,
            coeff_max,
            t: None,
            hamiltonian_norm_bound: None,
            locality: default_locality(),
            constant: default_constant(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("budget: {what}")));
        if self.terms == 0 {
            return bad("needs at least one term");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.norm_sq >= 1.0 && self.norm_sq.is_finite()) {
            return bad("the squared normalisation is at least 1");
        }
        if !(self.coeff_max >= 0.0 && self.coeff_max.is_finite()) {
            return bad("coeff_max must be finite and non-negative");
        }
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return bad("constant must be positive");
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return bad("t must be positive");
            }
        }
        Ok(())
    }

    fn log_term(&self, delta: f64) -> f64 {
        (self.terms as f64 / delta).ln()
    }
}

/// Unrounded number of snapshots, so scaling laws can be checked exactly.
pub fn shadow_sample_count_real(spec: &BudgetSpec, flavor: Flavor) -> Result<f64> {
    spec.validate()?;
    let m = spec.terms as f64;
    let base = spec.constant
        * spec.norm_sq.powi(2)
        * (spec.coeff_max + 1.0)
        * m
        * spec.log_term(spec.delta)
        / spec.epsilon.powi(2);
    Ok(match flavor {
        Flavor::Clifford => base,
        Flavor::Pauli => base * 3f64.powi(spec.locality as i32),
    })
}

/// `N = const · α⁴ (c_max + 1) M ln(M/δ) / ε²`, times `3^k` for the Pauli flavor.
pub fn shadow_sample_count(spec: &BudgetSpec, flavor: Flavor) -> Result<usize> {
    Ok(shadow_sample_count_real(spec, flavor)?.ceil().max(1.0) as usize)
}

/// `ε / (α² √(c_max² + 1) √M)`.
pub fn epsilon_s_for(epsilon: f64, terms: usize, alpha: f64, coeff_max: f64) -> f64 {
    epsilon / (alpha * alpha * (coeff_max * coeff_max + 1.0).sqrt() * (terms as f64).sqrt())
}

/// Preparation attempts that yield `successes` successes with probability at
/// least `1 − δ` when each succeeds with probability `γ²/2`.
pub fn chernoff_attempts(successes: u64, gamma_sq: f64, delta: f64) -> f64 {
    4.0 * (1.0 / delta).ln() / gamma_sq + 4.0 * successes as f64 / gamma_sq
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitaryBudget {
    pub eps_c: f64,
    pub eps_b: f64,
    pub delta_s: f64,
    pub delta_ns: f64,
    /// `Δ = π/(2t)`.
    pub delta_norm: f64,
    pub n_s: u64,
    pub n_tilde: u64,
}

/// Error split and query counts for learning from a block-encoding.
pub fn unitary_query_budget(spec: &BudgetSpec) -> Result<UnitaryBudget> {
    spec.validate()?;
    let t = spec
        .t
        .ok_or_else(|| Error::InvalidArgument("the unitary budget needs t".into()))?;
    if let Some(bound) = spec.hamiltonian_norm_bound {
        if t * bound > 0.5 * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "t = {t} exceeds 1/(2·{bound})"
            )));
        }
    }
    let m = spec.terms as f64;
    let eps_c = spec.epsilon / 2.0;
    let eps_b = spec.epsilon * t / (2.0 * m);
    let delta_s = spec.delta / 2.0;
    let delta_ns = spec.delta / 2.0;
    let delta_norm = PI / (2.0 * t);
    let n_s = (spec.constant
        * m
        * spec.norm_sq.powi(2)
        * (spec.coeff_max.powi(2) + delta_norm.powi(2))
        * spec.log_term(delta_s)
        / eps_c.powi(2))
    .ceil()
    .max(1.0) as u64;
    let n_tilde = chernoff_attempts(n_s, spec.norm_sq, delta_ns).ceil() as u64;
    Ok(UnitaryBudget {
        eps_c,
        eps_b,
        delta_s,
        delta_ns,
        delta_norm,
        n_s,
        n_tilde,
    })
}
