//! Clifford gate words over `{H, S, CX}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{get_bit, set_bit, PauliString, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    /// Control, target.
    Cx(usize, usize),
}

impl Gate {
    pub fn max_qubit(self) -> usize {
        match self {
            Gate::H(q) | Gate::S(q) => q,
            Gate::Cx(c, t) => c.max(t),
        }
    }

    pub fn validate(self, num_qubits: usize) -> Result<()> {
        if let Gate::Cx(c, t) = self {
            if c == t {
                return Err(Error::InvalidArgument(format!(
                    "CX with control = target = {c}"
                )));
            }
        }
        if self.max_qubit() >= num_qubits {
            return Err(Error::InvalidArgument(format!(
                "gate {self:?} addresses a qubit outside a {num_qubits}-qubit register"
            )));
        }
        Ok(())
    }

    /// Gates whose product is the inverse of `self`. `S†` is spelled `S S S`.
    pub fn inverse(self) -> Vec<Gate> {
        match self {
            Gate::S(q) => vec![Gate::S(q); 3],
            g => vec![g],
        }
    }
}

pub fn validate_sequence(gates: &[Gate], num_qubits: usize) -> Result<()> {
    gates.iter().try_for_each(|g| g.validate(num_qubits))
}

/// Inverse of the product `g_{m-1} ... g_1 g_0` of a sequence applied in order.
pub fn inverse_sequence(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().flat_map(|g| g.inverse()).collect()
}

/// `G P G†`.
pub fn conjugate(p: &PauliString, gate: Gate) -> PauliString {
    let n = p.num_qubits();
    let mut x = p.x_words().to_vec();
    let mut z = p.z_words().to_vec();
    let mut e = p.xz_exponent();
    match gate {
        Gate::H(q) => {
            let (xb, zb) = (get_bit(&x, q), get_bit(&z, q));
            if xb && zb {
                e += 2;
            }
            set_bit(&mut x, q, zb);
            set_bit(&mut z, q, xb);
        }
        Gate::S(q) => {
            let (xb, zb) = (get_bit(&x, q), get_bit(&z, q));
            if xb {
                e += 1;
            }
            set_bit(&mut z, q, zb ^ xb);
        }
        Gate::Cx(c, t) => {
            let xt = get_bit(&x, t) ^ get_bit(&x, c);
            let zc = get_bit(&z, c) ^ get_bit(&z, t);
            set_bit(&mut x, t, xt);
            set_bit(&mut z, c, zc);
        }
    }
    let y: u32 = x.iter().zip(&z).map(|(a, b)| (a & b).count_ones()).sum();
    let phase = Phase::from_exponent(e + 4 * (y + 1) - y);
    PauliString::from_words(n, x, z, phase).expect("conjugation preserves the register size")
}

/// `U P U†` for `U = g_{m-1} ... g_0`.
pub fn conjugate_by_sequence(p: &PauliString, gates: &[Gate]) -> PauliString {
    gates.iter().fold(p.clone(), |acc, &g| conjugate(&acc, g))
}
