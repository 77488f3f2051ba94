use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::mom::median_of_means;
use super::source::StateSource;
use crate::bits::BitString;
use crate::dense::{decoding_operator, density_matrix, normalization_operator, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Phase};
use crate::rng::{self, domain};
use crate::stabilizer::{
    io, pauli_times_entangled_with_control, random_clifford, snapshot_state,
    snapshot_state_up_to_phase, stab_inner, tableau_to_gates, CliffordTableau, StabilizerState,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordSnapshot {
    pub unitary: CliffordTableau,
    pub outcome: BitString,
}

impl CliffordSnapshot {
    /// Dense `(2^η+1) U†|b⟩⟨b|U − I`.
    pub fn reconstruct_dense(&self) -> Result<CMatrix> {
        let psi = snapshot_state(&self.unitary, &self.outcome)?.to_dense();
        let d = psi.dim();
        let mut m = density_matrix(&psi) * Complex64::new((d + 1) as f64, 0.0);
        for i in 0..d {
            m[(i, i)] -= 1.0;
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordShadow {
    num_qubits: usize,
    seed: Option<u64>,
    snapshots: Vec<CliffordSnapshot>,
}

impl CliffordShadow {
    pub fn new(
        num_qubits: usize,
        seed: Option<u64>,
        snapshots: Vec<CliffordSnapshot>,
    ) -> Result<Self> {
        for s in &snapshots {
            if s.unitary.num_qubits() != num_qubits || s.outcome.len() != num_qubits {
                return Err(Error::QubitMismatch {
                    expected: num_qubits,
                    found: s.outcome.len(),
                });
            }
            s.unitary.check_symplectic()?;
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

    pub fn snapshots(&self) -> &[CliffordSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn write_pcsh1<W: Write>(&self, w: W) -> Result<()> {
        io::write_records(
            w,
            self.len(),
            self.snapshots.iter().map(|s| (&s.unitary, &s.outcome)),
        )
    }

    pub fn read_pcsh1<R: Read>(r: R) -> Result<Self> {
        let records = io::read_records(r)?;
        let n = records.first().map_or(0, |(t, _)| t.num_qubits());
        let snapshots = records
            .into_iter()
            .map(|(unitary, outcome)| CliffordSnapshot { unitary, outcome })
            .collect();
        Self::new(n, None, snapshots)
    }
}

/// Draw `count` snapshots: a uniform Clifford is applied to a fresh copy of
/// the source state, followed by a full computational-basis measurement.
pub fn collect_clifford_shadow<S: StateSource>(
    source: &S,
    count: usize,
    seed: u64,
) -> Result<CliffordShadow> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "a shadow needs at least one snapshot".into(),
        ));
    }
    let n = source.num_qubits();
    let snapshots = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(seed, domain::CLIFFORD_SNAPSHOT, i);
            let state = source.draw(&mut rng::substream(seed, domain::NOISE, i))?;
            let unitary = random_clifford(n, &mut r);
            let mut psi = state.into_owned();
            psi.apply_gates(&tableau_to_gates(&unitary)?)?;
            let outcome = psi.measure_all(&mut r);
            Ok(CliffordSnapshot { unitary, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CliffordShadow {
        num_qubits: n,
        seed: Some(seed),
        snapshots,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodingTarget {
    /// `|X_l⟩⟨Y|` with `|X_l⟩ = (H_l ⊗ I)|Φ⟩|0⟩_C` and `|Y⟩ = |Φ⟩|1⟩_C`.
    Term(PauliString),
    /// `|Y⟩⟨Y|`.
    Normalization,
}

#[derive(Debug, Clone)]
pub struct DecodingOperatorClifford {
    n: usize,
    target: DecodingTarget,
    term_state: Option<StabilizerState>,
    reference: StabilizerState,
}

impl DecodingOperatorClifford {
    pub fn term(term: &PauliString) -> Result<Self> {
        if term.phase() != Phase::ONE {
            return Err(Error::InvalidPauli {
                text: term.to_string(),
                reason: "decoding needs a +1 phase".into(),
            });
        }
        let n = term.num_qubits();
        Ok(Self {
            n,
            target: DecodingTarget::Term(term.clone()),
            term_state: Some(pauli_times_entangled_with_control(term, false)?),
            reference: pauli_times_entangled_with_control(&PauliString::identity(n), true)?,
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
            target: DecodingTarget::Normalization,
            term_state: None,
            reference: pauli_times_entangled_with_control(&PauliString::identity(n), true)?,
        })
    }

    pub fn target(&self) -> &DecodingTarget {
        &self.target
    }

    pub fn system_qubits(&self) -> usize {
        self.n
    }

    /// `2n + 1`.
    pub fn num_qubits(&self) -> usize {
        2 * self.n + 1
    }

    pub fn term_state(&self) -> Option<&StabilizerState> {
        self.term_state.as_ref()
    }

    pub fn reference_state(&self) -> &StabilizerState {
        &self.reference
    }

    pub fn dense(&self) -> CMatrix {
        match &self.target {
            DecodingTarget::Term(p) => decoding_operator(p),
            DecodingTarget::Normalization => normalization_operator(self.n),
        }
    }
}

fn check_operators(shadow: &CliffordShadow, ops: &[DecodingOperatorClifford]) -> Result<()> {
    if shadow.is_empty() {
        return Err(Error::InvalidArgument(
            "the shadow holds no snapshots".into(),
        ));
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

/// `Tr(ρ̂ O)` for one snapshot state `s = U†|b⟩` on `η` qubits, given
/// `⟨Y|s⟩`. Both quantities are insensitive to the global phase of `s`.
fn snapshot_trace(
    op: &DecodingOperatorClifford,
    s: &StabilizerState,
    reference_overlap: Complex64,
    eta: usize,
) -> Result<Complex64> {
    let scale = ((1u64 << eta) + 1) as f64;
    match &op.term_state {
        Some(x) => {
            if reference_overlap.norm_sqr() == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(stab_inner(s, x)? * reference_overlap * scale)
        }
        None => Ok(Complex64::new(
            scale * reference_overlap.norm_sqr() - 1.0,
            0.0,
        )),
    }
}

/// Per-snapshot `Tr(ρ̂_i O)` for every operator, laid out `[operator][snapshot]`.
pub fn clifford_snapshot_values(
    shadow: &CliffordShadow,
    ops: &[DecodingOperatorClifford],
) -> Result<Vec<Vec<Complex64>>> {
    check_operators(shadow, ops)?;
    let Some(first) = ops.first() else {
        return Ok(Vec::new());
    };
    let eta = shadow.num_qubits();
    let per_snapshot = shadow
        .snapshots
        .par_iter()
        .map(|snap| {
            let s = snapshot_state_up_to_phase(&snap.unitary, &snap.outcome)?;
            let overlap = stab_inner(&first.reference, &s)?;
            ops.iter()
                .map(|op| snapshot_trace(op, &s, overlap, eta))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..ops.len())
        .map(|j| per_snapshot.iter().map(|row| row[j]).collect())
        .collect())
}

/// Median of means of the Hermitian pair `O⁺ = O + O†` and `O⁻ = iO − iO†`,
/// recombined as `(⟨O⁺⟩ − i⟨O⁻⟩)/2`.
pub fn combine_clifford_values(values: &[Complex64], groups: usize) -> Result<Complex64> {
    let plus: Vec<f64> = values.iter().map(|v| 2.0 * v.re).collect();
    let minus: Vec<f64> = values.iter().map(|v| -2.0 * v.im).collect();
    let p = median_of_means(&plus, groups)?;
    let m = median_of_means(&minus, groups)?;
    Ok(Complex64::new(p, -m) / 2.0)
}

pub fn estimate_clifford_expectations(
    shadow: &CliffordShadow,
    ops: &[DecodingOperatorClifford],
    groups: usize,
) -> Result<Vec<Complex64>> {
    if groups == 0 || groups > shadow.len() {
        return Err(Error::InvalidArgument(format!(
            "group count {groups} must lie in 1..={}",
            shadow.len()
        )));
    }
    clifford_snapshot_values(shadow, ops)?
        .iter()
        .map(|v| combine_clifford_values(v, groups))
        .collect()
}

pub fn estimate_clifford_expectation(
    shadow: &CliffordShadow,
    op: &DecodingOperatorClifford,
    groups: usize,
) -> Result<Complex64> {
    Ok(estimate_clifford_expectations(shadow, std::slice::from_ref(op), groups)?[0])
}
