//! Browser bindings for a few learner operations. Every export takes and
//! returns plain numbers or JSON strings.

use choi_core::dense::pseudo_choi_exact;
use choi_core::learner::{
    find_coeff, shadow_sample_count, unitary_query_budget, BudgetSpec, Estimator, Flavor,
    LearnOptions,
};
use choi_core::pauli::HamiltonianModel;
use choi_core::shadows::default_group_count;
use wasm_bindgen::prelude::*;

/// Largest system size the demo will simulate.
pub const MAX_QUBITS: usize = 3;

fn flavor(pauli: bool) -> Flavor {
    if pauli {
        Flavor::Pauli
    } else {
        Flavor::Clifford
    }
}

pub fn sample_count_for(
    terms: usize,
    epsilon: f64,
    delta: f64,
    norm_sq: f64,
    coeff_max: f64,
    pauli: bool,
    locality: usize,
) -> Result<u64, String> {
    let spec = BudgetSpec {
        locality,
        ..BudgetSpec::new(terms, epsilon, delta, norm_sq, coeff_max)
    };
    shadow_sample_count(&spec, flavor(pauli))
        .map(|n| n as u64)
        .map_err(|e| e.to_string())
}

pub fn query_budget_json(
    terms: usize,
    epsilon: f64,
    delta: f64,
    gamma_sq: f64,
    coeff_max: f64,
    t: f64,
) -> Result<String, String> {
    let spec = BudgetSpec {
        t: Some(t),
        ..BudgetSpec::new(terms, epsilon, delta, gamma_sq, coeff_max)
    };
    let budget = unitary_query_budget(&spec).map_err(|e| e.to_string())?;
    serde_json::to_string(&budget).map_err(|e| e.to_string())
}

/// Learn the coefficients of `model_json` (`{"n", "terms", "coeffs"}`) from
/// `samples` simulated snapshots, or exactly when `samples` is zero.
pub fn learn_json(
    model_json: &str,
    pauli: bool,
    samples: usize,
    seed: u32,
) -> Result<String, String> {
    let model: HamiltonianModel = serde_json::from_str(model_json).map_err(|e| e.to_string())?;
    if model.num_qubits() > MAX_QUBITS {
        return Err(format!("the demo handles at most {MAX_QUBITS} qubits"));
    }
    let choi = pseudo_choi_exact(&model).map_err(|e| e.to_string())?;
    let estimator = if samples == 0 {
        Estimator::DenseLimit
    } else {
        let observables = match flavor(pauli) {
            Flavor::Clifford => 2 * model.num_terms() + 1,
            Flavor::Pauli => model.num_terms() + 1,
        };
        let groups = default_group_count(observables, 0.1)
            .map_err(|e| e.to_string())?
            .min(samples);
        Estimator::Shadows { samples, groups }
    };
    let opts = LearnOptions::new(flavor(pauli), estimator, seed as u64);
    let report = find_coeff(&choi, model.terms(), &opts)
        .and_then(|r| r.with_truth(model.coeffs()))
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = sampleCount)]
pub fn sample_count(
    terms: usize,
    epsilon: f64,
    delta: f64,
    norm_sq: f64,
    coeff_max: f64,
    pauli: bool,
    locality: usize,
) -> Result<f64, JsError> {
    sample_count_for(terms, epsilon, delta, norm_sq, coeff_max, pauli, locality)
        .map(|n| n as f64)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = queryBudget)]
pub fn query_budget(
    terms: usize,
    epsilon: f64,
    delta: f64,
    gamma_sq: f64,
    coeff_max: f64,
    t: f64,
) -> Result<String, JsError> {
    query_budget_json(terms, epsilon, delta, gamma_sq, coeff_max, t).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn learn(model_json: &str, pauli: bool, samples: usize, seed: u32) -> Result<String, JsError> {
    learn_json(model_json, pauli, samples, seed).map_err(|e| JsError::new(&e))
}
