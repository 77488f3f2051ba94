//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use choi_core::circuit::Gate;
use choi_core::dense::{
    apply_gate_sequence, block_encoding_dilation, block_encoding_dilation_with, decoding_operator,
    density_matrix, hamiltonian_matrix, hermitian_pair, normalization_operator, pseudo_choi_exact,
    spectral_norm_hermitian, trace, CMatrix, DenseLimit, Perturbation, PerturbationKind, Preparer,
    StateVector,
};
use choi_core::learner::{
    chernoff_attempts, epsilon_s_for, find_coeff_clifford, find_coeff_pauli, find_coeff_unitary,
    shadow_sample_count, shadow_sample_count_real, unitary_query_budget, BudgetSpec, Estimator,
    Flavor, LearnOptions,
};
use choi_core::pauli::{klocal_count, random_model, HamiltonianModel};
use choi_core::rng::{from_seed, substream};
use choi_core::robustness::{
    noise_bias_bound, noise_tolerance, run_noisy, run_underspecified, PerpState,
    UnderspecifiedConfig, UnderspecifiedInstance,
};
use choi_core::shadows::{
    clifford_snapshot_values, collect_clifford_shadow, default_group_count, CliffordShadow,
    CliffordSnapshot, DecodingOperatorClifford, DecodingOperatorPauli, DecodingTarget,
    PauliSnapshot,
};
use choi_core::stabilizer::{random_clifford, stab_inner, CliffordTableau, StabilizerState};
use choi_core::{BitString, Complex64};
use choi_learn::{run_sweep, ExperimentConfig};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn random_gates<R: Rng>(n: usize, len: usize, r: &mut R) -> Vec<Gate> {
    (0..len)
        .map(|_| match r.random_range(0..3) {
            0 => Gate::H(r.random_range(0..n)),
            1 => Gate::S(r.random_range(0..n)),
            _ if n > 1 => {
                let c = r.random_range(0..n);
                let t = (c + r.random_range(1..n)) % n;
                Gate::Cx(c, t)
            }
            _ => Gate::H(0),
        })
        .collect()
}

fn random_bits<R: Rng>(n: usize, r: &mut R) -> BitString {
    BitString::from_bits((0..n).map(|_| r.random()).collect())
}

fn random_pure_state<R: Rng>(n: usize, r: &mut R) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

fn exact_recovery() -> Outcome {
    let mut r = from_seed(101);
    let mut worst: f64 = 0.0;
    for trial in 0..50u64 {
        let n = 1 + trial as usize % 4;
        let k = n.min(2);
        let available = klocal_count(n, k).min(15) as usize;
        let m = r.random_range(1..=available);
        let model = random_model(n, k, m, 1.0, trial).map_err(|e| e.to_string())?;
        let choi = pseudo_choi_exact(&model).map_err(|e| e.to_string())?;
        for report in [
            find_coeff_clifford(&choi, model.terms(), Estimator::DenseLimit, trial),
            find_coeff_pauli(&choi, model.terms(), Estimator::DenseLimit, trial),
        ] {
            let report = report.map_err(|e| e.to_string())?;
            worst = worst.max(linf(&report.coeff_estimates, model.coeffs()));
        }
    }
    check(
        worst <= 1e-9,
        format!("max |ĉ−c| = {worst:.2e} over 50 models, both flavors"),
    )
}

fn snapshot_formulas() -> Outcome {
    let mut r = from_seed(202);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=2 {
        let model = random_model(
            n,
            n.min(2),
            3.min(klocal_count(n, n.min(2)) as usize),
            1.0,
            40 + n as u64,
        )
        .unwrap();
        let mut ops: Vec<_> = model
            .terms()
            .iter()
            .map(|t| DecodingOperatorClifford::term(t).unwrap())
            .collect();
        ops.push(DecodingOperatorClifford::normalization(n).unwrap());
        let eta = 2 * n + 1;
        let snapshots: Vec<CliffordSnapshot> = (0..100)
            .map(|_| CliffordSnapshot {
                unitary: random_clifford(eta, &mut r),
                outcome: random_bits(eta, &mut r),
            })
            .collect();
        let shadow = CliffordShadow::new(eta, None, snapshots).unwrap();
        let values = clifford_snapshot_values(&shadow, &ops).unwrap();
        for (i, snap) in shadow.snapshots().iter().enumerate() {
            let rho_hat = snap.reconstruct_dense().unwrap();
            for (op, vals) in ops.iter().zip(&values) {
                let v = vals[i];
                let err = match op.target() {
                    DecodingTarget::Term(_) => {
                        let (plus, minus) = hermitian_pair(&op.dense());
                        let ep = (trace(&(&rho_hat * &plus)).re - 2.0 * v.re).abs();
                        let em = (trace(&(&rho_hat * &minus)).re + 2.0 * v.im).abs();
                        ep.max(em)
                    }
                    DecodingTarget::Normalization => (trace(&(&rho_hat * op.dense())) - v).norm(),
                };
                worst = worst.max(err);
            }
            count += 1;
        }
    }
    for n in 1..=4 {
        let model = random_model(n, n.min(2), 3, 1.0, 50 + n as u64).unwrap();
        let mut ops: Vec<_> = model
            .terms()
            .iter()
            .map(|t| DecodingOperatorPauli::term(t).unwrap())
            .collect();
        ops.push(DecodingOperatorPauli::normalization(n).unwrap());
        let dense: Vec<CMatrix> = ops.iter().map(|o| o.dense()).collect();
        for _ in 0..50 {
            let snap = PauliSnapshot {
                labels: (0..=n).map(|_| r.random_range(0..24u8)).collect(),
                outcome: random_bits(n + 1, &mut r),
            };
            let rho_hat = snap.reconstruct_dense().unwrap();
            for (op, d) in ops.iter().zip(&dense) {
                let expected = trace(&(&rho_hat * d));
                worst = worst
                    .max((op.snapshot_value(&snap) - expected.re).abs())
                    .max(expected.im.abs());
            }
            count += 1;
        }
    }
    check(
        worst <= 1e-10,
        format!("max deviation {worst:.2e} over {count} snapshots"),
    )
}

fn enumerate_cliffords(n: usize) -> HashSet<CliffordTableau> {
    let mut gens: Vec<Gate> = (0..n).flat_map(|q| [Gate::H(q), Gate::S(q)]).collect();
    for c in 0..n {
        for t in 0..n {
            if c != t {
                gens.push(Gate::Cx(c, t));
            }
        }
    }
    let start = CliffordTableau::identity(n);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for &g in &gens {
            let mut next = t.clone();
            next.apply_gate(g);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Chi-square p-value for uniform sampling over `group`, or `None` if a
/// sample falls outside it.
fn uniformity_p(n: usize, samples: u64, seed: u64) -> Option<(usize, f64)> {
    let group = enumerate_cliffords(n);
    let mut r = from_seed(seed);
    let mut counts: HashMap<CliffordTableau, u64> = HashMap::new();
    for _ in 0..samples {
        let t = random_clifford(n, &mut r);
        if !group.contains(&t) {
            return None;
        }
        *counts.entry(t).or_default() += 1;
    }
    let classes = group.len();
    let expected = samples as f64 / classes as f64;
    let stat = (classes - counts.len()) as f64 * expected
        + counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum::<f64>();
    Some((
        classes,
        1.0 - ChiSquared::new((classes - 1) as f64).unwrap().cdf(stat),
    ))
}

fn stabilizer_engine() -> Outcome {
    let mut r = from_seed(303);
    let mut worst: f64 = 0.0;
    let mut nonzero = 0;
    for trial in 0..500 {
        let n = 1 + trial % 6;
        let g1 = random_gates(n, 6 * n + r.random_range(0..10), &mut r);
        let b1 = random_bits(n, &mut r);
        let a = StabilizerState::basis(&b1).apply_gates(&g1).unwrap();
        let da = apply_gate_sequence(&StateVector::basis(n, b1.to_index()), &g1).unwrap();
        let (b, db) = if trial % 2 == 0 {
            let extra = random_gates(n, r.random_range(0..3), &mut r);
            (
                a.apply_gates(&extra).unwrap(),
                apply_gate_sequence(&da, &extra).unwrap(),
            )
        } else {
            let g2 = random_gates(n, 6 * n + r.random_range(0..10), &mut r);
            let b2 = random_bits(n, &mut r);
            (
                StabilizerState::basis(&b2).apply_gates(&g2).unwrap(),
                apply_gate_sequence(&StateVector::basis(n, b2.to_index()), &g2).unwrap(),
            )
        };
        let dense = da.inner(&db).unwrap();
        if dense.norm() > 1e-6 {
            nonzero += 1;
        }
        worst = worst.max((stab_inner(&a, &b).unwrap() - dense).norm());
    }
    let one = uniformity_p(1, 100_000, 7);
    let two = uniformity_p(2, 11_520 * 20, 8);
    let detail = format!(
        "inner max error {worst:.2e} ({nonzero}/500 nonzero); uniformity η=1 {one:?}, η=2 {two:?} (classes, p)"
    );
    let uniform =
        |x: Option<(usize, f64)>, classes| matches!(x, Some((c, p)) if c == classes && p > 0.01);
    check(
        worst <= 1e-10 && uniform(one, 24) && uniform(two, 11_520),
        detail,
    )
}

fn channel_inversion() -> Outcome {
    let mut r = from_seed(404);
    let psi = random_pure_state(2, &mut r);
    let rho = density_matrix(&psi);
    let repeats = 10u64;
    let sizes = [100usize, 1000, 10_000];
    let mut logs = Vec::new();
    let mut errors = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let mut total = 0.0;
        for rep in 0..repeats {
            let shadow = collect_clifford_shadow(&psi, n, 1000 * i as u64 + rep).unwrap();
            let mut mean = CMatrix::zeros(4, 4);
            for s in shadow.snapshots() {
                mean += s.reconstruct_dense().unwrap();
            }
            mean /= Complex64::new(n as f64, 0.0);
            total += (&mean - &rho)
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt();
        }
        let err = total / repeats as f64;
        errors.push(err);
        logs.push(err.ln());
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let s = slope(&xs, &logs);
    check(
        (s + 0.5).abs() <= 0.15,
        format!("slope {s:.3} (errors {errors:.4?})"),
    )
}

fn soundness_model() -> HamiltonianModel {
    random_model(2, 2, 6, 1.0, 2024).unwrap()
}

fn end_to_end() -> Outcome {
    let model = soundness_model();
    let choi = pseudo_choi_exact(&model).unwrap();
    let (eps, delta) = (0.2, 0.1);
    let spec = BudgetSpec::new(6, eps, delta, choi.norm_sq(), model.max_abs_coeff());
    let n = shadow_sample_count(&spec, Flavor::Clifford).unwrap();
    let groups = default_group_count(2 * 6 + 1, delta).unwrap();
    let trials = 50u64;
    let mut good = 0;
    let mut errors = Vec::new();
    for seed in 0..trials {
        let report = find_coeff_clifford(
            &choi,
            model.terms(),
            Estimator::Shadows { samples: n, groups },
            seed,
        )
        .map_err(|e| e.to_string())?;
        let err = l2(&report.coeff_estimates, model.coeffs());
        errors.push(err);
        if err <= eps {
            good += 1;
        }
    }
    check(
        good * 10 >= trials * 9,
        format!(
            "{good}/{trials} within ε = {eps} at N = {n}, K = {groups}; median error {:.4}",
            median(errors)
        ),
    )
}

fn unitary_path() -> Outcome {
    let model = soundness_model();
    let h_norm = spectral_norm_hermitian(&hamiltonian_matrix(&model).unwrap());
    let t = 0.5 / h_norm;
    let be = block_encoding_dilation(&model, t, 0.0).unwrap();
    let gamma_sq = be.gamma_sq();

    let prep = Preparer::new(&be).unwrap();
    let attempts = 10_000u64;
    let mut rng = substream(606, 3, 0);
    let successes = (0..attempts).filter(|_| prep.attempt(&mut rng)).count() as f64;
    let p = gamma_sq / 2.0;
    let sigma = (p * (1.0 - p) / attempts as f64).sqrt();
    let rate = successes / attempts as f64;
    let rate_ok = (rate - p).abs() <= 4.0 * sigma;

    let (eps, delta) = (0.2, 0.1);
    let spec = BudgetSpec {
        t: Some(t),
        hamiltonian_norm_bound: Some(h_norm),
        ..BudgetSpec::new(6, eps, delta, gamma_sq, model.max_abs_coeff())
    };
    let budget = unitary_query_budget(&spec).unwrap();
    let samples = budget.n_s as usize;
    let groups = default_group_count(2 * 6 + 1, budget.delta_s).unwrap();
    let trials = 20u64;
    let mut good = 0;
    let mut errors = Vec::new();
    for seed in 0..trials {
        let opts = LearnOptions::new(
            Flavor::Clifford,
            Estimator::Shadows { samples, groups },
            seed,
        );
        let report = find_coeff_unitary(&be, be.delta, model.terms(), &opts, budget.delta_ns)
            .map_err(|e| e.to_string())?;
        let err = l2(&report.coeff_estimates, model.coeffs());
        errors.push(err);
        if err <= eps {
            good += 1;
        }
    }
    let recovery_ok = good * 10 >= trials * 9;

    let mut bound_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for (i, eps_b) in [0.01, 0.05, 0.1].into_iter().enumerate() {
        for kind in [
            PerturbationKind::Random,
            PerturbationKind::OrthogonalToModel,
        ] {
            let p = Perturbation {
                kind,
                seed: i as u64,
            };
            let be =
                block_encoding_dilation_with(&model, t, eps_b, p, DenseLimit::default()).unwrap();
            let realized = be.realized_coeffs(&model);
            let opts = LearnOptions::new(Flavor::Clifford, Estimator::DenseLimit, 0);
            let report = find_coeff_unitary(&be, be.delta, model.terms(), &opts, 0.05).unwrap();
            let bound = (model.num_terms() as f64).sqrt() * eps_b / t;
            let dev = l2(&realized, model.coeffs());
            bound_ok &= dev <= bound && linf(&report.coeff_estimates, &realized) <= 1e-9;
            worst_ratio = worst_ratio.max(dev / bound);
        }
    }
    check(
        rate_ok && recovery_ok && bound_ok,
        format!(
            "success rate {rate:.4} vs γ²/2 = {p:.4} (4σ = {:.4}); {good}/{trials} within ε at N_s = {samples}, median error {:.4}; worst ‖c̃−c‖/(√M ε_b/t) = {worst_ratio:.3}",
            4.0 * sigma,
            median(errors)
        ),
    )
}

fn sweep_medians(
    cfg: &str,
    axis: impl Fn(&choi_learn::SweepRow) -> f64,
) -> Result<Vec<(f64, f64)>, String> {
    let cfg = ExperimentConfig::from_json(cfg).map_err(|e| e.to_string())?;
    let rows = run_sweep(&cfg, None).map_err(|e| e.to_string())?;
    if let Some(bad) = rows.iter().find(|r| r.error.is_some()) {
        return Err(format!("sweep point failed: {:?}", bad.error));
    }
    let mut by_point: Vec<(f64, Vec<f64>)> = Vec::new();
    for row in &rows {
        if by_point.len() <= row.point {
            by_point.push((axis(row), Vec::new()));
        }
        by_point[row.point].1.push(row.l2_error.unwrap());
    }
    Ok(by_point.into_iter().map(|(x, e)| (x, median(e))).collect())
}

fn scaling_laws() -> Outcome {
    let n_axis = sweep_medians(
        r#"{
          "mode": "sweep",
          "model": { "inline": { "n": 2, "terms": ["XI", "ZZ", "IY"], "coeffs": [0.3, -0.2, 0.1] } },
          "budget": { "groups": 1 },
          "sweep": { "base": "exact", "samples": [100, 400, 1600, 6400], "repeats": 40 },
          "seed": 707
        }"#,
        |r| r.axes.samples.unwrap() as f64,
    )?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = n_axis.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let n_slope = slope(&xs, &ys);

    let terms = r#"{ "n": 2, "terms": ["XI", "ZZ", "IY"], "coeffs": [0.3, -0.2, 0.1] }"#;
    let t_max = 0.5 / 0.6;
    let t_cfg = format!(
        r#"{{
          "mode": "sweep",
          "model": {{ "inline": {terms} }},
          "budget": {{ "groups": 1, "samples": 2000 }},
          "sweep": {{ "base": "unitary", "t": [{t_max}, {}, {}], "repeats": 40 }},
          "seed": 708
        }}"#,
        t_max / 2.0,
        t_max / 4.0
    );
    let t_axis = sweep_medians(&t_cfg, |r| r.axes.t.unwrap())?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = t_axis.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let t_slope = slope(&xs, &ys);
    check(
        (n_slope + 0.5).abs() <= 0.15 && (t_slope + 1.0).abs() <= 0.25,
        format!("error ~ N^{n_slope:.3} (medians {n_axis:.4?}); error ~ t^{t_slope:.3} (medians {t_axis:.4?})"),
    )
}

fn robustness() -> Outcome {
    let known = HamiltonianModel::from_labels(2, &[("XI", 0.1), ("ZZ", -0.1)]).unwrap();
    let chi = 0.5;
    let inst = UnderspecifiedInstance::new(known.clone(), "YY".parse().unwrap(), chi).unwrap();
    let t = 0.5 / (known.l1_norm() + chi);
    let base = UnderspecifiedConfig {
        t,
        eps_b: 0.0,
        perturbation: Perturbation::default(),
        options: LearnOptions::new(Flavor::Clifford, Estimator::DenseLimit, 0),
        failure_probability: 0.05,
        eps_s: None,
        limit: DenseLimit::default(),
        omega: 0.0,
    };
    let dense = run_underspecified(&inst, &base, 0).map_err(|e| e.to_string())?;
    let coeff_dev = linf(&dense.coeff_estimates, known.coeffs());
    let chi_dev = (dense.residual_chi.unwrap() - chi).abs();
    let dense_ok = coeff_dev <= 1e-8 && chi_dev <= 1e-8;

    let sampled = UnderspecifiedConfig {
        options: LearnOptions::new(
            Flavor::Clifford,
            Estimator::Shadows {
                samples: 20_000,
                groups: 1,
            },
            0,
        ),
        ..base
    };
    let trials = 50u64;
    let mut detected = 0;
    let mut stds = Vec::new();
    for seed in 0..trials {
        let r = run_underspecified(&inst, &sampled, seed).map_err(|e| e.to_string())?;
        stds.push(r.chi_sq_std.unwrap_or(f64::INFINITY));
        if r.chi_flagged == Some(false) && r.residual_chi.unwrap_or(0.0) > 0.0 {
            detected += 1;
        }
    }
    let std = median(stds);
    let separated = chi * chi >= 4.0 * std;
    let detect_ok = detected * 10 >= trials * 9;

    let be = block_encoding_dilation(&known, t, 0.0).unwrap();
    let gamma_sq = be.gamma_sq();
    let tolerance = noise_tolerance(
        0.1,
        known.num_terms(),
        gamma_sq,
        known.max_abs_coeff(),
        be.delta,
    );
    let mut bias_ok = true;
    let mut worst_ratio: f64 = 0.0;
    let register = 2 * known.num_qubits() + 1;
    let flipped = known
        .with_coeffs(known.coeffs().iter().map(|c| -4.0 * c).collect())
        .unwrap();
    let adversarial = density_matrix(&pseudo_choi_exact(&flipped).unwrap().state);
    for omega in [tolerance, 0.05, 0.2] {
        let perps = [
            PerpState::MaximallyMixed,
            PerpState::Density(density_matrix(&StateVector::basis(register, 5))),
            PerpState::Density(adversarial.clone()),
        ];
        for perp in perps {
            let opts = LearnOptions::new(Flavor::Clifford, Estimator::DenseLimit, 0);
            let r = run_noisy(&be, known.terms(), omega, perp, &opts, 0.05)
                .map_err(|e| e.to_string())?;
            let bound = noise_bias_bound(gamma_sq, be.delta, 0.0, omega);
            let bias = linf(&r.coeff_estimates, known.coeffs());
            bias_ok &= bias <= bound;
            worst_ratio = worst_ratio.max(bias / bound);
        }
    }
    check(
        dense_ok && separated && detect_ok && bias_ok,
        format!(
            "dense |ĉ−c| = {coeff_dev:.1e}, |χ̂−χ| = {chi_dev:.1e}; χ² = {:.3} vs 4·std(χ̂²) = {:.3}, detected {detected}/{trials}; worst bias/bound = {worst_ratio:.3}",
            chi * chi,
            4.0 * std
        ),
    )
}

fn operator_traces() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=3 {
        let model = random_model(
            n,
            n.min(2),
            klocal_count(n, n.min(2)).min(6) as usize,
            1.0,
            900 + n as u64,
        )
        .unwrap();
        for t in model.terms() {
            let (plus, minus) = hermitian_pair(&decoding_operator(t));
            worst = worst.max((trace(&(&plus * &plus)) - Complex64::new(2.0, 0.0)).norm());
            worst = worst.max((trace(&(&minus * &minus)) - Complex64::new(2.0, 0.0)).norm());
            count += 1;
        }
        let oa = normalization_operator(n);
        worst = worst.max((trace(&(&oa * &oa)) - Complex64::new(1.0, 0.0)).norm());
    }
    check(
        worst <= 1e-12,
        format!("{count} terms, max deviation {worst:.1e}"),
    )
}

fn budget_calculators() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let spec = BudgetSpec::new(6, 0.2, 0.1, 2.0, 1.0);
    let hand = (4.0 * 2.0 * 6.0 * 60f64.ln() / 0.04).ceil() as usize;
    let n = shadow_sample_count(&spec, Flavor::Clifford).unwrap();
    ok &= n == hand && hand == 4914;
    notes.push(format!(
        "N = {n} (ceil of {:.2})",
        4.0 * 2.0 * 6.0 * 60f64.ln() / 0.04
    ));

    let base = shadow_sample_count_real(&spec, Flavor::Clifford).unwrap();
    let half = shadow_sample_count_real(
        &BudgetSpec {
            epsilon: 0.1,
            ..spec
        },
        Flavor::Clifford,
    )
    .unwrap();
    ok &= (half / base - 4.0).abs() < 1e-12;
    let k2 = BudgetSpec {
        locality: 2,
        ..spec
    };
    let ratio = shadow_sample_count_real(&k2, Flavor::Pauli).unwrap()
        / shadow_sample_count_real(&k2, Flavor::Clifford).unwrap();
    ok &= (ratio - 9.0).abs() < 1e-12;

    ok &= epsilon_s_for(0.1, 1, 1.0, 0.0) == 0.1;
    let es = epsilon_s_for(0.2, 4, 2f64.sqrt(), 1.0);
    ok &= (es - 0.2 / (2.0 * 2f64.sqrt() * 2.0)).abs() < 1e-15 && (es - 0.03536).abs() < 1e-5;
    ok &= (es / epsilon_s_for(0.2, 16, 2f64.sqrt(), 1.0) - 2.0).abs() < 1e-12;
    notes.push(format!("ε_s = {es:.5}"));

    let ub = unitary_query_budget(&BudgetSpec {
        t: Some(1.0),
        ..BudgetSpec::new(2, 0.2, 0.1, 1.5, 0.1)
    })
    .unwrap();
    ok &= (ub.eps_c - 0.1).abs() < 1e-15 && (ub.eps_b - 0.05).abs() < 1e-15;
    ok &= ub.n_tilde
        == (4.0 * (1.0 / ub.delta_ns).ln() / 1.5 + 4.0 * ub.n_s as f64 / 1.5).ceil() as u64;
    let chernoff = chernoff_attempts(1000, 1.5, 0.05);
    ok &= chernoff.ceil() as u64 == 2675;
    notes.push(format!(
        "ε_c = {}, ε_b = {}, Ñ(1000) = {}",
        ub.eps_c,
        ub.eps_b,
        chernoff.ceil()
    ));

    let mut r = from_seed(1010);
    let mut monotone = true;
    for _ in 0..2000 {
        let s = BudgetSpec::new(
            r.random_range(1..50),
            r.random_range(0.01..0.9),
            r.random_range(0.01..0.9),
            r.random_range(1.0..3.0),
            r.random_range(0.0..2.0),
        );
        let n0 = shadow_sample_count(&s, Flavor::Clifford).unwrap();
        let looser_eps = BudgetSpec {
            epsilon: (s.epsilon * r.random_range(1.0..1.1)).min(0.99),
            ..s
        };
        let looser_delta = BudgetSpec {
            delta: (s.delta * r.random_range(1.0..1.1)).min(0.99),
            ..s
        };
        monotone &= shadow_sample_count(&looser_eps, Flavor::Clifford).unwrap() <= n0;
        monotone &= shadow_sample_count(&looser_delta, Flavor::Clifford).unwrap() <= n0;
        let ns = r.random_range(1..100_000u64);
        let g = r.random_range(1.0..2.0);
        let d = r.random_range(0.001..0.5);
        monotone &=
            chernoff_attempts(ns + r.random_range(1..1000), g, d) >= chernoff_attempts(ns, g, d);
    }
    ok &= monotone;
    notes.push(format!("monotone over 2000 random grids: {monotone}"));
    check(ok, notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact recovery in the dense limit", 60, exact_recovery),
        ("snapshot trace formulas", 120, snapshot_formulas),
        (
            "stabilizer inner products and Clifford uniformity",
            300,
            stabilizer_engine,
        ),
        ("shadow channel inversion rate", 120, channel_inversion),
        ("end-to-end sampling soundness", 600, end_to_end),
        ("unitary path", 600, unitary_path),
        ("scaling laws", 900, scaling_laws),
        ("robustness", 600, robustness),
        ("decoding operator traces", 10, operator_traces),
        ("budget calculators", 10, budget_calculators),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit}s limit")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2}: {status} {name}: {detail} [{:.1}s]",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
