use std::f64::consts::PI;

use num_complex::Complex64;

use super::row::{
    bit, bits_from_outcome, dense_index, dot, flip, is_zero, outcome_from_bits, put, xor_into,
    zero_bits, Bits, Row,
};
use super::tableau::{tableau_to_gates, CliffordTableau};
use crate::bits::BitString;
use crate::circuit::{inverse_sequence, validate_sequence, Gate};
use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Exact value `2^{-k/2} · e^{iπm/4}` or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExactAmplitude {
    Zero,
    Value { halvings: i32, eighth_turns: u8 },
}

impl ExactAmplitude {
    pub const ONE: ExactAmplitude = ExactAmplitude::Value {
        halvings: 0,
        eighth_turns: 0,
    };

    pub fn is_zero(self) -> bool {
        self == ExactAmplitude::Zero
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            ExactAmplitude::Zero => Complex64::new(0.0, 0.0),
            ExactAmplitude::Value {
                halvings,
                eighth_turns,
            } => Complex64::from_polar(
                2f64.powf(-halvings as f64 / 2.0),
                PI * eighth_turns as f64 / 4.0,
            ),
        }
    }

    /// Multiply by `e^{iπ d/4}`.
    pub fn rotate(self, d: u8) -> Self {
        match self {
            ExactAmplitude::Zero => self,
            ExactAmplitude::Value {
                halvings,
                eighth_turns,
            } => ExactAmplitude::Value {
                halvings,
                eighth_turns: (eighth_turns + d) % 8,
            },
        }
    }

    /// Multiply by `i^e`.
    pub fn times_i_pow(self, e: u32) -> Self {
        self.rotate(((2 * e) % 8) as u8)
    }

    pub fn scaled_by_sqrt_half(self, times: i32) -> Self {
        match self {
            ExactAmplitude::Zero => self,
            ExactAmplitude::Value {
                halvings,
                eighth_turns,
            } => ExactAmplitude::Value {
                halvings: halvings + times,
                eighth_turns,
            },
        }
    }

    /// `(a + b) / √2` for two amplitudes of one stabilizer state.
    fn sum_over_sqrt2(a: Self, b: Self) -> Result<Self> {
        use ExactAmplitude::*;
        Ok(match (a, b) {
            (Zero, Zero) => Zero,
            (v, Zero) | (Zero, v) => v.scaled_by_sqrt_half(1),
            (
                Value {
                    halvings: ka,
                    eighth_turns: ma,
                },
                Value {
                    halvings: kb,
                    eighth_turns: mb,
                },
            ) => {
                if ka != kb {
                    return Err(Error::Invariant(format!(
                        "amplitude magnitudes 2^-{ka}/2 and 2^-{kb}/2 differ"
                    )));
                }
                match (mb + 8 - ma) % 8 {
                    0 => Value {
                        halvings: ka - 1,
                        eighth_turns: ma,
                    },
                    2 => Value {
                        halvings: ka,
                        eighth_turns: (ma + 1) % 8,
                    },
                    4 => Zero,
                    6 => Value {
                        halvings: ka,
                        eighth_turns: (ma + 7) % 8,
                    },
                    d => {
                        return Err(Error::Invariant(format!(
                            "odd relative phase {d}/8 between amplitudes"
                        )))
                    }
                }
            }
        })
    }

    /// `self / other` where both share the same magnitude.
    fn ratio_same_magnitude(self, other: Self) -> Result<u8> {
        match (self, other) {
            (
                ExactAmplitude::Value {
                    halvings: ka,
                    eighth_turns: ma,
                },
                ExactAmplitude::Value {
                    halvings: kb,
                    eighth_turns: mb,
                },
            ) if ka == kb => Ok((ma + 8 - mb) % 8),
            _ => Err(Error::Invariant(
                "states differ by more than a phase".into(),
            )),
        }
    }
}

/// Stabilizer state with an exact global phase.
///
/// Generators are kept in reduced row-echelon form over the columns
/// `(x_0..x_{n-1}, z_0..z_{n-1})`, so rows with an x part come first. The
/// support is `anchor ⊕ span{x parts}`, and the anchor is the unique support
/// point that is zero on every x pivot. Its amplitude is stored exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilizerState {
    n: usize,
    rows: Vec<Row>,
    x_pivots: Vec<usize>,
    anchor: Bits,
    anchor_amp: ExactAmplitude,
}

impl StabilizerState {
    /// Computational basis state `|b⟩`.
    pub fn basis(b: &BitString) -> Self {
        let n = b.len();
        let anchor = bits_from_outcome(b);
        let rows = (0..n)
            .map(|q| {
                let mut r = Row::single_z(n, q);
                if bit(&anchor, q) {
                    r.e = 2;
                }
                r
            })
            .collect();
        Self {
            n,
            rows,
            x_pivots: Vec::new(),
            anchor,
            anchor_amp: ExactAmplitude::ONE,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(&BitString::zeros(n))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Canonical generators in letter form.
    pub fn generators(&self) -> Vec<PauliString> {
        self.rows.iter().map(|r| r.to_pauli(self.n)).collect()
    }

    /// Dimension `k` of the support; every nonzero amplitude has modulus `2^{-k/2}`.
    pub fn support_dim(&self) -> usize {
        self.x_pivots.len()
    }

    pub fn anchor(&self) -> BitString {
        outcome_from_bits(&self.anchor, self.n)
    }

    pub fn anchor_amplitude(&self) -> ExactAmplitude {
        self.anchor_amp
    }

    pub fn amplitude(&self, b: &BitString) -> Result<ExactAmplitude> {
        if b.len() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        Ok(self.amp(&bits_from_outcome(b)))
    }

    /// `⟨y|ψ⟩`.
    fn amp(&self, y: &Bits) -> ExactAmplitude {
        let mut diff = y.clone();
        xor_into(&mut diff, &self.anchor);
        let mut acc = Row::identity(self.n);
        for (row, &p) in self.rows.iter().zip(&self.x_pivots) {
            if bit(&diff, p) {
                xor_into(&mut diff, &row.x);
                acc.mul_right(row);
            }
        }
        if !is_zero(&diff) {
            return ExactAmplitude::Zero;
        }
        // g|anchor⟩ = i^e (-1)^{z·anchor} |y⟩ and g|ψ⟩ = |ψ⟩.
        let sign = dot(&acc.z, &self.anchor) % 2;
        self.anchor_amp.times_i_pow(acc.e as u32 + 2 * sign)
    }

    /// `⟨y|g|ψ⟩` for `g = i^e X^x Z^z`.
    fn amp_after_pauli(&self, g: &Row, y: &Bits) -> ExactAmplitude {
        let mut w = y.clone();
        xor_into(&mut w, &g.x);
        let sign = dot(&g.z, &w) % 2;
        self.amp(&w).times_i_pow(g.e as u32 + 2 * sign)
    }

    /// Canonicalise `rows` and locate the anchor; `amp_of` gives the new
    /// amplitude at the anchor in terms of the current state.
    fn rebuild(
        n: usize,
        mut rows: Vec<Row>,
        amp_of: impl FnOnce(&Bits, usize) -> Result<ExactAmplitude>,
    ) -> Result<Self> {
        let mut rank = 0;
        let mut x_pivots = Vec::new();
        let mut z_pivots = Vec::new();
        for col in 0..2 * n {
            let (is_x, q) = if col < n {
                (true, col)
            } else {
                (false, col - n)
            };
            let has = |r: &Row| if is_x { bit(&r.x, q) } else { bit(&r.z, q) };
            let Some(p) = (rank..rows.len()).find(|&i| has(&rows[i])) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && has(r) {
                    r.mul_right(&pivot);
                }
            }
            if is_x {
                x_pivots.push(q);
            } else {
                z_pivots.push(q);
            }
            rank += 1;
        }
        if rank != n {
            return Err(Error::Invariant(format!(
                "{rank} independent generators on {n} qubits"
            )));
        }
        let k = x_pivots.len();
        let mut anchor = zero_bits(n);
        for (row, &q) in rows[k..].iter().zip(&z_pivots) {
            if row.e % 4 == 2 {
                flip(&mut anchor, q);
            } else if row.e % 4 != 0 {
                return Err(Error::Invariant(
                    "diagonal generator is not Hermitian".into(),
                ));
            }
        }
        for (row, &q) in rows[..k].iter().zip(&x_pivots) {
            if bit(&anchor, q) {
                xor_into(&mut anchor, &row.x);
            }
        }
        let anchor_amp = amp_of(&anchor, k)?;
        if anchor_amp.is_zero() {
            return Err(Error::Invariant("anchor amplitude vanished".into()));
        }
        Ok(Self {
            n,
            rows,
            x_pivots,
            anchor,
            anchor_amp,
        })
    }

    pub fn apply_gate(&self, g: Gate) -> Result<Self> {
        g.validate(self.n)?;
        let mut rows = self.rows.clone();
        for r in &mut rows {
            r.conj_gate(g);
        }
        Self::rebuild(self.n, rows, |y, _| match g {
            Gate::H(q) => {
                let mut y0 = y.clone();
                put(&mut y0, q, false);
                let mut y1 = y.clone();
                put(&mut y1, q, true);
                let b = self.amp(&y1).times_i_pow(if bit(y, q) { 2 } else { 0 });
                ExactAmplitude::sum_over_sqrt2(self.amp(&y0), b)
            }
            Gate::S(q) => Ok(self.amp(y).times_i_pow(u32::from(bit(y, q)))),
            Gate::Cx(c, t) => {
                let mut w = y.clone();
                if bit(y, c) {
                    flip(&mut w, t);
                }
                Ok(self.amp(&w))
            }
        })
    }

    pub fn apply_gates(&self, gates: &[Gate]) -> Result<Self> {
        validate_sequence(gates, self.n)?;
        gates.iter().try_fold(self.clone(), |s, &g| s.apply_gate(g))
    }

    /// `P|ψ⟩` for any Pauli on the leading `p.num_qubits()` qubits.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        let g = self.pad(p)?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.anticommutes(&g) {
                    r.e = (r.e + 2) % 4;
                }
                r
            })
            .collect();
        // P|w⟩ = i^e (-1)^{z·w} |w ⊕ x⟩
        Self::rebuild(self.n, rows, |y, _| Ok(self.amp_after_pauli(&g, y)))
    }

    fn pad(&self, p: &PauliString) -> Result<Row> {
        if p.num_qubits() > self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        let src = Row::from_pauli(p);
        let mut g = Row::identity(self.n);
        for q in 0..p.num_qubits() {
            put(&mut g.x, q, bit(&src.x, q));
            put(&mut g.z, q, bit(&src.z, q));
        }
        g.e = src.e;
        Ok(g)
    }

    /// `(I + g)|ψ⟩ / √2` for a Hermitian `g` anticommuting with some generator.
    fn project_anticommuting(&self, g: &Row, first: usize) -> Result<Self> {
        let mut rows = self.rows.clone();
        let h = rows[first].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != first && r.anticommutes(g) {
                r.mul_right(&h);
            }
        }
        rows[first] = g.clone();
        Self::rebuild(self.n, rows, |y, _| {
            ExactAmplitude::sum_over_sqrt2(self.amp(y), self.amp_after_pauli(g, y))
        })
    }

    /// Expectation sign of a Hermitian Pauli in the stabilizer group up to sign.
    fn group_sign(&self, g: &Row) -> Result<bool> {
        let here = self.amp_after_pauli(g, &self.anchor);
        match here.ratio_same_magnitude(self.anchor_amp)? {
            0 => Ok(true),
            4 => Ok(false),
            d => Err(Error::Invariant(format!(
                "stabilizer element acts with phase {d}/8"
            ))),
        }
    }

    /// Dense amplitudes, qubit 0 most significant.
    pub fn to_dense(&self) -> StateVector {
        let k = self.x_pivots.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        let mut y = self.anchor.clone();
        for step in 0..(1usize << k) {
            if step > 0 {
                // Gray code: flip generator of the lowest set bit.
                let j = step.trailing_zeros() as usize;
                xor_into(&mut y, &self.rows[j].x);
            }
            amps[dense_index(&y, self.n)] = self.amp(&y).to_complex();
        }
        StateVector::from_amplitudes(amps).expect("stabilizer states are normalised")
    }
}

/// Exact `⟨a|b⟩`.
pub fn stab_inner_exact(a: &StabilizerState, b: &StabilizerState) -> Result<ExactAmplitude> {
    if a.n != b.n {
        return Err(Error::QubitMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    // ⟨a|b⟩ = ⟨a| Π (I + g)/2 |b⟩ over the generators g of a.
    let mut cur = b.clone();
    let mut halvings = 0;
    for g in &a.rows {
        match cur.rows.iter().position(|r| r.anticommutes(g)) {
            Some(first) => {
                cur = cur.project_anticommuting(g, first)?;
                halvings += 1;
            }
            None => {
                if !cur.group_sign(g)? {
                    return Ok(ExactAmplitude::Zero);
                }
            }
        }
    }
    if cur.rows != a.rows || cur.anchor != a.anchor {
        return Err(Error::Invariant(
            "projection did not reach the target state".into(),
        ));
    }
    let turns = cur.anchor_amp.ratio_same_magnitude(a.anchor_amp)?;
    Ok(ExactAmplitude::Value {
        halvings,
        eighth_turns: turns,
    })
}

pub fn stab_inner(a: &StabilizerState, b: &StabilizerState) -> Result<Complex64> {
    stab_inner_exact(a, b).map(ExactAmplitude::to_complex)
}

/// `U†|b⟩` where `U` is the product of the gate word from [`tableau_to_gates`].
pub fn snapshot_state(tab: &CliffordTableau, b: &BitString) -> Result<StabilizerState> {
    if b.len() != tab.num_qubits() {
        return Err(Error::QubitMismatch {
            expected: tab.num_qubits(),
            found: b.len(),
        });
    }
    let gates = tableau_to_gates(tab)?;
    StabilizerState::basis(b).apply_gates(&inverse_sequence(&gates))
}

/// `U†|b⟩` up to a global phase, read directly off the tableau. The anchor
/// amplitude is taken real and positive.
pub fn snapshot_state_up_to_phase(tab: &CliffordTableau, b: &BitString) -> Result<StabilizerState> {
    let n = tab.num_qubits();
    if b.len() != n {
        return Err(Error::QubitMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let images = tab.rows();
    let rows = (0..n)
        .map(|j| {
            // P with U P U† = ±Z_j: its X_k and Z_k content is fixed by
            // whether Z_j anticommutes with U Z_k U† and U X_k U†.
            let mut p = Row::identity(n);
            for k in 0..n {
                put(&mut p.x, k, bit(&images[n + k].x, j));
                put(&mut p.z, k, bit(&images[k].x, j));
            }
            p.e = (dot(&p.x, &p.z) % 4) as u8;
            let image = tab.conjugate_row(&p);
            let negative = image.e % 4 == 2;
            if negative != b.get(j) {
                p.e = (p.e + 2) % 4;
            }
            p
        })
        .collect();
    StabilizerState::rebuild(n, rows, |_, k| {
        Ok(ExactAmplitude::Value {
            halvings: k as i32,
            eighth_turns: 0,
        })
    })
}

/// `|Φ⟩` on `2n` qubits followed by computational-basis qubits `tail`.
fn bell_pairs_then(n: usize, tail: &[bool]) -> StabilizerState {
    let total = 2 * n + tail.len();
    let mut rows = Vec::with_capacity(total);
    for j in 0..n {
        let mut r = Row::single_x(total, j);
        flip(&mut r.x, n + j);
        rows.push(r);
    }
    for j in 0..n {
        let mut r = Row::single_z(total, j);
        flip(&mut r.z, n + j);
        rows.push(r);
    }
    let mut anchor = zero_bits(total);
    for (i, &v) in tail.iter().enumerate() {
        let mut r = Row::single_z(total, 2 * n + i);
        if v {
            r.e = 2;
            flip(&mut anchor, 2 * n + i);
        }
        rows.push(r);
    }
    StabilizerState {
        n: total,
        rows,
        x_pivots: (0..n).collect(),
        anchor,
        anchor_amp: ExactAmplitude::Value {
            halvings: n as i32,
            eighth_turns: 0,
        },
    }
}

/// `(h ⊗ I_A)|Φ⟩` on `2n` qubits.
pub fn pauli_times_entangled(h: &PauliString) -> Result<StabilizerState> {
    bell_pairs_then(h.num_qubits(), &[]).apply_pauli(h)
}

/// `(h ⊗ I_A)|Φ⟩|c⟩_C` on `2n+1` qubits.
pub fn pauli_times_entangled_with_control(
    h: &PauliString,
    control: bool,
) -> Result<StabilizerState> {
    bell_pairs_then(h.num_qubits(), &[control]).apply_pauli(h)
}
