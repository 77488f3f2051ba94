use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mom::median_of_means;
use super::source::StateSource;
use crate::bits::BitString;
use crate::circuit::Gate;
use crate::dense::{
    apply_gate_sequence, kron, pauli_flavor_normalization, pauli_flavor_operator, CMatrix,
    ChoiLayout, StateVector,
};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, Phase};
use crate::rng::{self, domain};
use crate::stabilizer::CliffordTableau;

pub const LOCAL_CLIFFORD_COUNT: usize = 24;

/// One element of the single-qubit Clifford group modulo phase.
#[derive(Debug, Clone)]
pub struct LocalClifford {
    gates: Vec<Gate>,
    tableau: CliffordTableau,
    /// `⟨0|U P U†|0⟩` for `P = X, Y, Z`.
    diag: [i8; 3],
}

impl LocalClifford {
    /// Gate word on qubit 0.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn tableau(&self) -> &CliffordTableau {
        &self.tableau
    }

    /// `⟨b|U P U†|b⟩`.
    pub fn diagonal(&self, letter: Letter, b: bool) -> f64 {
        let v = match letter {
            Letter::I => return 1.0,
            Letter::X => self.diag[0],
            Letter::Y => self.diag[1],
            Letter::Z => self.diag[2],
        };
        if b {
            -f64::from(v)
        } else {
            f64::from(v)
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let mut u = CMatrix::zeros(2, 2);
        for c in 0..2 {
            let col = apply_gate_sequence(&StateVector::basis(1, c), &self.gates)
                .expect("single-qubit word");
            for (r, a) in col.amplitudes().iter().enumerate() {
                u[(r, c)] = *a;
            }
        }
        u
    }
}

/// The 24 single-qubit Cliffords in breadth-first order over the words in
/// `{H, S}`, starting from the identity.
pub fn local_clifford_table() -> &'static [LocalClifford] {
    static TABLE: OnceLock<Vec<LocalClifford>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let start = CliffordTableau::identity(1);
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([(start, Vec::new())]);
        let mut out = Vec::with_capacity(LOCAL_CLIFFORD_COUNT);
        while let Some((tab, word)) = queue.pop_front() {
            for g in [Gate::H(0), Gate::S(0)] {
                let mut next = tab.clone();
                next.apply_gate(g);
                if seen.insert(next.clone()) {
                    let mut w: Vec<Gate> = word.clone();
                    w.push(g);
                    queue.push_back((next, w));
                }
            }
            let diag = [Letter::X, Letter::Y, Letter::Z].map(|l| {
                let image = tab
                    .conjugate(&PauliString::single(1, 0, l))
                    .expect("one qubit");
                match (image.letter(0), image.phase()) {
                    (Letter::Z, Phase::ONE) => 1,
                    (Letter::Z, _) => -1,
                    _ => 0,
                }
            });
            out.push(LocalClifford {
                gates: word,
                tableau: tab,
                diag,
            });
        }
        assert_eq!(out.len(), LOCAL_CLIFFORD_COUNT);
        out
    })
}

fn on_qubit(g: Gate, q: usize) -> Gate {
    match g {
        Gate::H(_) => Gate::H(q),
        Gate::S(_) => Gate::S(q),
        Gate::Cx(..) => unreachable!("local words hold no two-qubit gates"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliSnapshot {
    /// Indices into [`local_clifford_table`], one per measured qubit.
    #[serde(rename = "u")]
    pub labels: Vec<u8>,
    #[serde(rename = "b")]
    pub outcome: BitString,
}

impl PauliSnapshot {
    /// Dense `⊗_j (3 U_j†|b_j⟩⟨b_j|U_j − I)`.
    pub fn reconstruct_dense(&self) -> Result<CMatrix> {
        let table = local_clifford_table();
        let mut out = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for (j, &l) in self.labels.iter().enumerate() {
            let u = table
                .get(l as usize)
                .ok_or_else(|| Error::Format(format!("unknown local Clifford {l}")))?
                .matrix();
            let b = usize::from(self.outcome.get(j));
            let mut f = CMatrix::from_fn(2, 2, |r, c| u[(b, r)].conj() * u[(b, c)] * 3.0);
            f[(0, 0)] -= 1.0;
            f[(1, 1)] -= 1.0;
            out = kron(&out, &f);
        }
        Ok(out)
    }
}

/// Per-qubit random Clifford snapshots. The last measured qubit is the
/// control register; the others are the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliShadow {
    num_qubits: usize,
    seed: Option<u64>,
    snapshots: Vec<PauliSnapshot>,
}

impl PauliShadow {
    pub fn new(
        num_qubits: usize,
        seed: Option<u64>,
        snapshots: Vec<PauliSnapshot>,
    ) -> Result<Self> {
        for s in &snapshots {
            if s.labels.len() != num_qubits || s.outcome.len() != num_qubits {
                return Err(Error::QubitMismatch {
                    expected: num_qubits,
                    found: s.labels.len(),
                });
            }
            if let Some(&bad) = s
                .labels
                .iter()
                .find(|&&l| l as usize >= LOCAL_CLIFFORD_COUNT)
            {
                return Err(Error::Format(format!("unknown local Clifford {bad}")));
            }
        }
        Ok(Self {
            num_qubits,
            seed,
            snapshots,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn snapshots(&self) -> &[PauliSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// One `{"u": [...], "b": "..."}` object per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for s in &self.snapshots {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut snapshots = Vec::new();
        for line in r.lines() {
            let line = line?;
            if !line.trim().is_empty() {
                snapshots.push(serde_json::from_str::<PauliSnapshot>(&line)?);
            }
        }
        let n = snapshots.first().map_or(0, |s| s.labels.len());
        Self::new(n, None, snapshots)
    }
}

/// System qubits followed by the control qubit of a pseudo-Choi register.
pub fn choi_register(n: usize) -> Vec<usize> {
    let layout = ChoiLayout { n };
    layout
        .system()
        .chain(std::iter::once(layout.control()))
        .collect()
}

/// Rotate each qubit of `register` by an independent uniform single-qubit
/// Clifford and measure it. Qubits outside `register` are left alone.
pub fn collect_pauli_shadow<S: StateSource>(
    source: &S,
    register: &[usize],
    count: usize,
    seed: u64,
) -> Result<PauliShadow> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "a shadow needs at least one snapshot".into(),
        ));
    }
    let total = source.num_qubits();
    if register.is_empty() || register.iter().any(|&q| q >= total) {
        return Err(Error::InvalidArgument(format!(
            "register {register:?} does not fit {total} qubits"
        )));
    }
    let table = local_clifford_table();
    let snapshots = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(seed, domain::PAULI_SNAPSHOT, i);
            let state = source.draw(&mut rng::substream(seed, domain::NOISE, i))?;
            let labels: Vec<u8> = register
                .iter()
                .map(|_| r.random_range(0..LOCAL_CLIFFORD_COUNT as u8))
                .collect();
            let gates: Vec<Gate> = register
                .iter()
                .zip(&labels)
                .flat_map(|(&q, &l)| table[l as usize].gates.iter().map(move |&g| on_qubit(g, q)))
                .collect();
            let mut psi = state.into_owned();
            psi.apply_gates(&gates)?;
            let full = psi.measure_all(&mut r);
            let outcome = BitString::from_bits(register.iter().map(|&q| full.get(q)).collect());
            Ok(PauliSnapshot { labels, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliShadow {
        num_qubits: register.len(),
        seed: Some(seed),
        snapshots,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalTarget {
    /// `(H_l ⊗ X_C) / 2`.
    Term(PauliString),
    /// `I ⊗ |1⟩⟨1|_C`.
    Normalization,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingOperatorPauli {
    n: usize,
    target: LocalTarget,
}

impl DecodingOperatorPauli {
    pub fn term(term: &PauliString) -> Result<Self> {
        if term.phase() != Phase::ONE {
            return Err(Error::InvalidPauli {
                text: term.to_string(),
                reason: "decoding needs a +1 phase".into(),
            });
        }
        Ok(Self {
            n: term.num_qubits(),
            target: LocalTarget::Term(term.clone()),
        })
    }

    pub fn normalization(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "the system register needs at least one qubit".into(),
            ));
        }
        Ok(Self {
            n,
            target: LocalTarget::Normalization,
        })
    }

    pub fn target(&self) -> &LocalTarget {
        &self.target
    }

    /// `n + 1`.
    pub fn num_qubits(&self) -> usize {
        self.n + 1
    }

    pub fn dense(&self) -> CMatrix {
        match &self.target {
            LocalTarget::Term(p) => pauli_flavor_operator(p),
            LocalTarget::Normalization => pauli_flavor_normalization(self.n),
        }
    }

    /// `Tr(ρ̂ O)` for one snapshot as a product of per-qubit factors.
    pub fn snapshot_value(&self, snap: &PauliSnapshot) -> f64 {
        let table = local_clifford_table();
        let n = self.n;
        let control = &table[snap.labels[n] as usize];
        let b_c = snap.outcome.get(n);
        match &self.target {
            LocalTarget::Term(h) => {
                let mut v = 1.5 * control.diagonal(Letter::X, b_c);
                for (j, letter) in h.letters().enumerate() {
                    if v == 0.0 {
                        break;
                    }
                    if letter != Letter::I {
                        v *= 3.0
                            * table[snap.labels[j] as usize].diagonal(letter, snap.outcome.get(j));
                    }
                }
                v
            }
            // |1⟩⟨1| = (I − Z)/2
            LocalTarget::Normalization => 1.5 * (1.0 - control.diagonal(Letter::Z, b_c)) - 1.0,
        }
    }
}

fn check_local(shadow: &PauliShadow, ops: &[DecodingOperatorPauli], groups: usize) -> Result<()> {
    if shadow.is_empty() {
        return Err(Error::InvalidArgument(
            "the shadow holds no snapshots".into(),
        ));
    }
    if groups == 0 || groups > shadow.len() {
        return Err(Error::InvalidArgument(format!(
            "group count {groups} must lie in 1..={}",
            shadow.len()
        )));
    }
    for op in ops {
        if op.num_qubits() != shadow.num_qubits() {
            return Err(Error::QubitMismatch {
                expected: shadow.num_qubits(),
                found: op.num_qubits(),
            });
        }
    }
    Ok(())
}

/// Per-snapshot values laid out `[operator][snapshot]`.
pub fn pauli_snapshot_values(
    shadow: &PauliShadow,
    ops: &[DecodingOperatorPauli],
) -> Result<Vec<Vec<f64>>> {
    check_local(shadow, ops, 1)?;
    Ok(ops
        .par_iter()
        .map(|op| {
            shadow
                .snapshots
                .iter()
                .map(|s| op.snapshot_value(s))
                .collect()
        })
        .collect())
}

pub fn estimate_pauli_expectations(
    shadow: &PauliShadow,
    ops: &[DecodingOperatorPauli],
    groups: usize,
) -> Result<Vec<f64>> {
    check_local(shadow, ops, groups)?;
    pauli_snapshot_values(shadow, ops)?
        .iter()
        .map(|v| median_of_means(v, groups))
        .collect()
}

pub fn estimate_pauli_expectation(
    shadow: &PauliShadow,
    op: &DecodingOperatorPauli,
    groups: usize,
) -> Result<f64> {
    Ok(estimate_pauli_expectations(shadow, std::slice::from_ref(op), groups)?[0])
}
