use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::bits::BitString;
use crate::circuit::{validate_sequence, Gate};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

const NORM_TOL: f64 = 1e-10;

/// Dense amplitudes on `num_qubits` qubits; qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// Wrap amplitudes that are already normalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_amplitudes_unchecked(amps)?;
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state has squared norm {norm}, expected 1"
            )));
        }
        Ok(s)
    }

    /// Wrap amplitudes and rescale them to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_amplitudes_unchecked(amps)?;
        let norm = s.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalise the zero vector".into(),
            ));
        }
        s.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    fn from_amplitudes_unchecked(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        Ok(Self {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &BitString) -> Complex64 {
        self.amps[bits.to_index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_size(other.num_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::QubitMismatch {
                expected: self.num_qubits,
                found: n,
            });
        }
        Ok(())
    }

    #[inline]
    fn mask(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::H(q) => {
                let m = self.mask(q);
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (self.amps[i], self.amps[i | m]);
                    self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                    self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            Gate::S(q) => {
                let m = self.mask(q);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= Complex64::i();
                    }
                }
            }
            Gate::Cx(c, t) => {
                let (mc, mt) = (self.mask(c), self.mask(t));
                for i in (0..self.amps.len()).filter(|i| i & mc != 0 && i & mt == 0) {
                    self.amps.swap(i, i | mt);
                }
            }
        }
        Ok(())
    }

    pub fn apply_gates(&mut self, gates: &[Gate]) -> Result<()> {
        validate_sequence(gates, self.num_qubits)?;
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    /// Apply `p` to the leading `p.num_qubits()` qubits.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() > self.num_qubits {
            return Err(Error::QubitMismatch {
                expected: self.num_qubits,
                found: p.num_qubits(),
            });
        }
        let (xm, zm) = pauli_masks(p, self.num_qubits);
        let pre = p.phase().to_complex() * Complex64::i().powu(p.y_count());
        let old = self.amps.clone();
        for (j, a) in old.into_iter().enumerate() {
            let sign = if (j & zm).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            self.amps[j ^ xm] = pre * a * sign;
        }
        Ok(())
    }

    /// Sample a full computational-basis measurement.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        BitString::from_index(
            sample_index(self.amps.iter().map(|a| a.norm_sqr()), rng),
            self.num_qubits,
        )
    }
}

/// Sample from unnormalised weights given as an iterator, in one pass over a
/// pre-drawn threshold. Falls back to the last positive weight on rounding.
pub(crate) fn sample_index<I, R>(weights: I, rng: &mut R) -> usize
where
    I: Iterator<Item = f64> + Clone,
    R: Rng + ?Sized,
{
    let total: f64 = weights.clone().sum();
    let threshold = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if acc > threshold && w > 0.0 {
            return i;
        }
    }
    last_positive
}

/// X and Z masks of `p` placed on the leading qubits of a `total`-qubit index.
pub(crate) fn pauli_masks(p: &PauliString, total: usize) -> (usize, usize) {
    let mut xm = 0;
    let mut zm = 0;
    for q in 0..p.num_qubits() {
        let (x, z) = p.letter(q).bits();
        let bit = 1usize << (total - 1 - q);
        if x {
            xm |= bit;
        }
        if z {
            zm |= bit;
        }
    }
    (xm, zm)
}

pub fn apply_gate_sequence(state: &StateVector, gates: &[Gate]) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_gates(gates)?;
    Ok(out)
}

pub fn measure_all(state: &StateVector, seed: u64) -> BitString {
    state.measure_all(&mut crate::rng::substream(
        seed,
        crate::rng::domain::MEASUREMENT,
        0,
    ))
}
