//! Stabilizer formalism: Clifford tableaux, uniform sampling, gate synthesis
//! and stabilizer states with exact global phase.

pub mod io;
mod row;
mod sample;
mod state;
mod tableau;

pub use sample::{random_clifford, sample_uniform_clifford};
pub use state::{
    pauli_times_entangled, pauli_times_entangled_with_control, snapshot_state,
    snapshot_state_up_to_phase, stab_inner, stab_inner_exact, ExactAmplitude, StabilizerState,
};
pub use tableau::{tableau_to_gates, CliffordTableau};

#[cfg(test)]
mod tests {
    use std::collections::{HashMap, HashSet, VecDeque};

    use num_complex::Complex64 as C;
    use proptest::prelude::*;
    use rand::Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    use super::*;
    use crate::bits::BitString;
    use crate::circuit::Gate;
    use crate::dense::{apply_gate_sequence, pauli_matrix, CMatrix, StateVector};
    use crate::pauli::{enumerate_klocal, PauliString};
    use crate::rng::from_seed;

    fn random_gates<R: Rng>(n: usize, len: usize, r: &mut R) -> Vec<Gate> {
        (0..len)
            .map(|_| match r.random_range(0..3) {
                0 => Gate::H(r.random_range(0..n)),
                1 => Gate::S(r.random_range(0..n)),
                _ if n > 1 => {
                    let c = r.random_range(0..n);
                    Gate::Cx(c, (c + r.random_range(1..n)) % n)
                }
                _ => Gate::H(0),
            })
            .collect()
    }

    fn random_outcome<R: Rng>(n: usize, r: &mut R) -> BitString {
        BitString::from_bits((0..n).map(|_| r.random()).collect())
    }

    fn dense_unitary(n: usize, gates: &[Gate]) -> CMatrix {
        let d = 1 << n;
        let mut u = CMatrix::zeros(d, d);
        for c in 0..d {
            let col = apply_gate_sequence(&StateVector::basis(n, c), gates).unwrap();
            for (r, a) in col.amplitudes().iter().enumerate() {
                u[(r, c)] = *a;
            }
        }
        u
    }

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .all(|(x, y)| (x - y).norm() < tol)
    }

    /// Tableau images checked against explicit `U P U†` matrices.
    fn assert_tableau_matches_gates(tab: &CliffordTableau, gates: &[Gate]) {
        let n = tab.num_qubits();
        let u = dense_unitary(n, gates);
        for j in 0..n {
            for (p, image) in [
                (
                    PauliString::single(n, j, crate::pauli::Letter::X),
                    tab.destabilizer(j),
                ),
                (
                    PauliString::single(n, j, crate::pauli::Letter::Z),
                    tab.stabilizer(j),
                ),
            ] {
                let lhs = &u * pauli_matrix(&p) * u.adjoint();
                let rhs = pauli_matrix(&image);
                assert!(
                    crate::dense::max_abs_diff(&lhs, &rhs) < 1e-10,
                    "image of {p} differs"
                );
            }
        }
    }

    #[test]
    fn from_gates_matches_dense_conjugation() {
        let mut r = from_seed(1);
        for n in 1..=4 {
            let gates = random_gates(n, 30, &mut r);
            let tab = CliffordTableau::from_gates(n, &gates).unwrap();
            assert_tableau_matches_gates(&tab, &gates);
            tab.check_symplectic().unwrap();
        }
    }

    #[test]
    fn synthesis_examples() {
        assert!(tableau_to_gates(&CliffordTableau::identity(3))
            .unwrap()
            .is_empty());
        let h = CliffordTableau::from_gates(1, &[Gate::H(0)]).unwrap();
        let gates = tableau_to_gates(&h).unwrap();
        assert_eq!(CliffordTableau::from_gates(1, &gates).unwrap(), h);
        assert_tableau_matches_gates(&h, &gates);
        for seed in 0..20 {
            let tab = sample_uniform_clifford(3, seed);
            let gates = tableau_to_gates(&tab).unwrap();
            assert_tableau_matches_gates(&tab, &gates);
            assert!(gates.iter().all(|g| g.max_qubit() < 3));
        }
        let mut bad = CliffordTableau::identity(2).symplectic_matrix();
        bad[0] = false;
        assert!(CliffordTableau::from_symplectic(2, &bad, &[false; 4]).is_err());
    }

    #[test]
    fn conjugate_matches_rows() {
        let mut r = from_seed(4);
        let gates = random_gates(3, 25, &mut r);
        let tab = CliffordTableau::from_gates(3, &gates).unwrap();
        let u = dense_unitary(3, &gates);
        for p in enumerate_klocal(3, 3).unwrap() {
            let img = tab.conjugate(&p).unwrap();
            let lhs = &u * pauli_matrix(&p) * u.adjoint();
            assert!(crate::dense::max_abs_diff(&lhs, &pauli_matrix(&img)) < 1e-10);
        }
    }

    #[test]
    fn sampling_is_seeded_and_symplectic() {
        assert_eq!(sample_uniform_clifford(4, 9), sample_uniform_clifford(4, 9));
        assert_ne!(
            sample_uniform_clifford(4, 9),
            sample_uniform_clifford(4, 10)
        );
        let mut r = from_seed(2);
        for n in 1..=12 {
            random_clifford(n, &mut r).check_symplectic().unwrap();
        }
    }

    /// Every Clifford modulo phase reachable from the identity by `{H, S, CX}`.
    fn enumerate_group(n: usize) -> HashSet<CliffordTableau> {
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

    fn chi_square_p(counts: &HashMap<CliffordTableau, u64>, classes: usize, samples: u64) -> f64 {
        let expected = samples as f64 / classes as f64;
        let mut stat = (classes - counts.len()) as f64 * expected;
        stat += counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum::<f64>();
        1.0 - ChiSquared::new((classes - 1) as f64).unwrap().cdf(stat)
    }

    #[test]
    fn single_qubit_sampling_is_uniform() {
        let group = enumerate_group(1);
        assert_eq!(group.len(), 24);
        let samples = 100_000u64;
        let mut r = from_seed(11);
        let mut counts: HashMap<CliffordTableau, u64> = HashMap::new();
        for _ in 0..samples {
            let t = random_clifford(1, &mut r);
            assert!(group.contains(&t));
            *counts.entry(t).or_default() += 1;
        }
        let expected = samples as f64 / 24.0;
        let sigma = (samples as f64 * (1.0 / 24.0) * (23.0 / 24.0)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - expected).abs() < 4.0 * sigma);
        }
        assert!(chi_square_p(&counts, 24, samples) > 0.01);
    }

    #[test]
    fn two_qubit_group_has_expected_order() {
        assert_eq!(enumerate_group(2).len(), 11520);
    }

    #[test]
    fn basis_and_hadamard_snapshots() {
        let id = CliffordTableau::identity(2);
        let s = snapshot_state(&id, &"01".parse().unwrap()).unwrap();
        assert_eq!(s.to_dense(), StateVector::basis(2, 1));
        let h = CliffordTableau::from_gates(1, &[Gate::H(0)]).unwrap();
        let plus = snapshot_state(&h, &"0".parse().unwrap())
            .unwrap()
            .to_dense();
        let a = plus.amplitudes();
        assert!((a[0] - C::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((a[1] - C::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(snapshot_state(&h, &"01".parse().unwrap()).is_err());
    }

    #[test]
    fn snapshots_match_dense_reconstruction() {
        let mut r = from_seed(21);
        for trial in 0..60 {
            let n = 1 + trial % 6;
            let tab = random_clifford(n, &mut r);
            let b = random_outcome(n, &mut r);
            let gates = tableau_to_gates(&tab).unwrap();
            let u = dense_unitary(n, &gates);
            let basis = StateVector::basis(n, b.to_index());
            let v = u.adjoint() * nalgebra::DVector::from_column_slice(basis.amplitudes());
            let expected = StateVector::from_amplitudes(v.iter().copied().collect()).unwrap();
            let got = snapshot_state(&tab, &b).unwrap().to_dense();
            assert!(close(&got, &expected, 1e-10), "trial {trial}");
        }
    }

    #[test]
    fn phase_free_snapshots_agree_up_to_phase() {
        let mut r = from_seed(22);
        for trial in 0..200 {
            let n = 1 + trial % 7;
            let tab = random_clifford(n, &mut r);
            let b = random_outcome(n, &mut r);
            let exact = snapshot_state(&tab, &b).unwrap();
            let fast = snapshot_state_up_to_phase(&tab, &b).unwrap();
            assert_eq!(exact.generators(), fast.generators());
            assert!((stab_inner(&exact, &fast).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_product_examples() {
        let zero = StabilizerState::zero(1);
        let plus = zero.apply_gate(Gate::H(0)).unwrap();
        let v = stab_inner(&zero, &plus).unwrap();
        assert!((v - C::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        let one = StabilizerState::basis(&"1".parse().unwrap());
        let s_plus = plus.apply_gate(Gate::S(0)).unwrap();
        let v = stab_inner(&one, &s_plus).unwrap();
        assert!((v - C::new(0.0, 0.5f64.sqrt())).norm() < 1e-15);
        // H S H|0⟩ carries an eighth-turn global phase.
        let hsh = plus
            .apply_gate(Gate::S(0))
            .unwrap()
            .apply_gate(Gate::H(0))
            .unwrap();
        let v = stab_inner(&zero, &hsh).unwrap();
        assert!((v - C::from_polar(0.5f64.sqrt(), std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
        assert!(stab_inner(&zero, &StabilizerState::zero(2)).is_err());
    }

    fn random_state<R: Rng>(n: usize, r: &mut R) -> (StabilizerState, StateVector) {
        let gates = random_gates(n, 6 * n + r.random_range(0..10), r);
        let b = random_outcome(n, r);
        let stab = StabilizerState::basis(&b).apply_gates(&gates).unwrap();
        let dense = apply_gate_sequence(&StateVector::basis(n, b.to_index()), &gates).unwrap();
        (stab, dense)
    }

    #[test]
    fn inner_products_match_dense() {
        let mut r = from_seed(33);
        for trial in 0..500 {
            let n = 1 + trial % 6;
            let (a, da) = random_state(n, &mut r);
            // Share structure half of the time so nonzero overlaps are common.
            let (b, db) = if trial % 2 == 0 {
                let extra = random_gates(n, r.random_range(0..3), &mut r);
                (
                    a.apply_gates(&extra).unwrap(),
                    apply_gate_sequence(&da, &extra).unwrap(),
                )
            } else {
                random_state(n, &mut r)
            };
            assert!(close(&a.to_dense(), &da, 1e-10));
            let exact = stab_inner(&a, &b).unwrap();
            let dense = da.inner(&db).unwrap();
            assert!(
                (exact - dense).norm() < 1e-10,
                "trial {trial}: {exact} vs {dense}"
            );
        }
    }

    #[test]
    fn entangled_targets_match_dense() {
        for (label, n) in [("I", 1), ("X", 1), ("YZ", 2), ("XIY", 3)] {
            let h: PauliString = label.parse().unwrap();
            let got = pauli_times_entangled(&h).unwrap().to_dense();
            let mut want = crate::dense::maximally_entangled_state(n).unwrap();
            want.apply_pauli(&h).unwrap();
            assert!(close(&got, &want, 1e-12), "{label}");
        }
        let x = pauli_times_entangled(&"X".parse().unwrap())
            .unwrap()
            .to_dense();
        let a = x.amplitudes();
        assert!((a[1].re - 0.5f64.sqrt()).abs() < 1e-15 && (a[2].re - 0.5f64.sqrt()).abs() < 1e-15);
        let with_c = pauli_times_entangled_with_control(&"Y".parse().unwrap(), true)
            .unwrap()
            .to_dense();
        let mut want = crate::dense::maximally_entangled_state(1).unwrap();
        want.apply_pauli(&"Y".parse().unwrap()).unwrap();
        for (i, w) in want.amplitudes().iter().enumerate() {
            assert!((with_c.amplitudes()[2 * i + 1] - w).norm() < 1e-15);
        }
    }

    #[test]
    fn pcsh1_round_trip() {
        let mut r = from_seed(8);
        let records: Vec<(CliffordTableau, BitString)> = (1..=5)
            .map(|n| (random_clifford(n, &mut r), random_outcome(n, &mut r)))
            .collect();
        let mut buf = Vec::new();
        io::write_records(&mut buf, records.len(), records.iter().map(|(t, b)| (t, b))).unwrap();
        assert_eq!(&buf[..5], b"PCSH1");
        assert_eq!(u64::from_le_bytes(buf[5..13].try_into().unwrap()), 5);
        // η = 1: 4 matrix bits + 2 signs + 1 outcome fit one byte after the header.
        assert_eq!(u16::from_le_bytes([buf[13], buf[14]]), 1);
        let back = io::read_records(buf.as_slice()).unwrap();
        assert_eq!(back, records);
        assert!(io::read_records(&b"PCSH2"[..]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn self_overlap_is_exactly_one(seed in any::<u64>(), n in 1usize..8) {
            let mut r = from_seed(seed);
            let (a, _) = random_state(n, &mut r);
            prop_assert_eq!(stab_inner_exact(&a, &a).unwrap(), ExactAmplitude::ONE);
        }

        #[test]
        fn overlap_magnitudes_are_powers_of_root_half(seed in any::<u64>(), n in 1usize..7) {
            let mut r = from_seed(seed);
            let (a, _) = random_state(n, &mut r);
            let (b, _) = random_state(n, &mut r);
            match stab_inner_exact(&a, &b).unwrap() {
                ExactAmplitude::Zero => {}
                ExactAmplitude::Value { halvings, .. } => prop_assert!((0..=n as i32).contains(&halvings)),
            }
        }

        #[test]
        fn canonical_form_is_unique(seed in any::<u64>(), n in 1usize..6) {
            // Two different words for the same state give identical canonical data.
            let mut r = from_seed(seed);
            let (a, _) = random_state(n, &mut r);
            let round = a.apply_gates(&[Gate::H(0), Gate::H(0), Gate::S(0), Gate::S(0), Gate::S(0), Gate::S(0)]).unwrap();
            prop_assert_eq!(round, a);
        }
    }
}
