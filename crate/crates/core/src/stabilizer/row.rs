//! Packed Pauli rows `i^e X^x Z^z` shared by tableaux and stabilizer states.

use smallvec::{smallvec, SmallVec};

use crate::bits::BitString;
use crate::pauli::{PauliString, Phase};

/// Bit set over qubits, bit `q` of word `q / 64`.
pub(crate) type Bits = SmallVec<[u64; 2]>;

pub(crate) fn zero_bits(n: usize) -> Bits {
    smallvec![0; n.div_ceil(64).max(1)]
}

#[inline]
pub(crate) fn bit(b: &Bits, q: usize) -> bool {
    (b[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
pub(crate) fn flip(b: &mut Bits, q: usize) {
    b[q >> 6] ^= 1 << (q & 63);
}

#[inline]
pub(crate) fn put(b: &mut Bits, q: usize, v: bool) {
    if bit(b, q) != v {
        flip(b, q);
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut Bits, src: &Bits) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
pub(crate) fn dot(a: &Bits, b: &Bits) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[inline]
pub(crate) fn is_zero(b: &Bits) -> bool {
    b.iter().all(|&w| w == 0)
}

pub(crate) fn bits_from_outcome(b: &BitString) -> Bits {
    let mut out = zero_bits(b.len());
    for (q, &v) in b.bits().iter().enumerate() {
        if v {
            flip(&mut out, q);
        }
    }
    out
}

pub(crate) fn outcome_from_bits(b: &Bits, n: usize) -> BitString {
    BitString::from_bits((0..n).map(|q| bit(b, q)).collect())
}

/// Basis index with qubit 0 as the most significant bit.
pub(crate) fn dense_index(b: &Bits, n: usize) -> usize {
    (0..n).fold(0, |acc, q| (acc << 1) | usize::from(bit(b, q)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Row {
    pub x: Bits,
    pub z: Bits,
    /// Exponent of `i`, mod 4.
    pub e: u8,
}

impl Row {
    pub fn identity(n: usize) -> Self {
        Row {
            x: zero_bits(n),
            z: zero_bits(n),
            e: 0,
        }
    }

    pub fn single_x(n: usize, q: usize) -> Self {
        let mut r = Row::identity(n);
        flip(&mut r.x, q);
        r
    }

    pub fn single_z(n: usize, q: usize) -> Self {
        let mut r = Row::identity(n);
        flip(&mut r.z, q);
        r
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        let n = p.num_qubits();
        let mut r = Row::identity(n);
        r.x[..p.x_words().len()].copy_from_slice(p.x_words());
        r.z[..p.z_words().len()].copy_from_slice(p.z_words());
        r.e = p.xz_exponent() as u8;
        r
    }

    pub fn to_pauli(&self, n: usize) -> PauliString {
        let w = n.div_ceil(64);
        let x = self.x[..w].to_vec();
        let z = self.z[..w].to_vec();
        let y = dot(&self.x, &self.z);
        let phase = Phase::from_exponent(self.e as u32 + 4 - (y % 4));
        PauliString::from_words(n, x, z, phase).expect("row fits its register")
    }

    /// Sign bit of a Hermitian row in letter form: `self = (-1)^s · letters`.
    pub fn letter_sign(&self) -> bool {
        let y = dot(&self.x, &self.z) as u8;
        (self.e + 4 - (y % 4)) % 4 == 2
    }

    pub fn set_letter_sign(&mut self, negative: bool) {
        let y = dot(&self.x, &self.z) as u8;
        self.e = (y + if negative { 2 } else { 0 }) % 4;
    }

    /// `self ← self · other`.
    #[inline]
    pub fn mul_right(&mut self, other: &Row) {
        let twist = dot(&self.z, &other.x);
        self.e = ((self.e as u32 + other.e as u32 + 2 * twist) % 4) as u8;
        xor_into(&mut self.x, &other.x);
        xor_into(&mut self.z, &other.z);
    }

    #[inline]
    pub fn anticommutes(&self, other: &Row) -> bool {
        (dot(&self.x, &other.z) + dot(&self.z, &other.x)) % 2 == 1
    }

    pub fn conj_h(&mut self, q: usize) {
        let (xb, zb) = (bit(&self.x, q), bit(&self.z, q));
        if xb && zb {
            self.e = (self.e + 2) % 4;
        }
        if xb != zb {
            flip(&mut self.x, q);
            flip(&mut self.z, q);
        }
    }

    pub fn conj_s(&mut self, q: usize) {
        if bit(&self.x, q) {
            self.e = (self.e + 1) % 4;
            flip(&mut self.z, q);
        }
    }

    pub fn conj_cx(&mut self, c: usize, t: usize) {
        if bit(&self.x, c) {
            flip(&mut self.x, t);
        }
        if bit(&self.z, t) {
            flip(&mut self.z, c);
        }
    }

    pub fn conj_gate(&mut self, g: crate::circuit::Gate) {
        use crate::circuit::Gate;
        match g {
            Gate::H(q) => self.conj_h(q),
            Gate::S(q) => self.conj_s(q),
            Gate::Cx(c, t) => self.conj_cx(c, t),
        }
    }
}
