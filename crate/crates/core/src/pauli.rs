//! Pauli strings in packed symplectic form and Hamiltonian models built from them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng;

pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], q: usize) -> bool {
    (words[q / 64] >> (q % 64)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], q: usize, value: bool) {
    let mask = 1u64 << (q % 64);
    if value {
        words[q / 64] |= mask;
    } else {
        words[q / 64] &= !mask;
    }
}

#[inline]
pub(crate) fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// A power of `i`, stored mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: u32) -> Self {
        Phase((e % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        }
    }
}

/// `phase · P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}` with each `P_q ∈ {I, X, Y, Z}`.
///
/// Site `q` is encoded by the bit pair `(x_q, z_q)`; `Y` is a letter, so the
/// stored phase is the prefactor in front of the letter product.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = word_count(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: Phase::ONE,
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Build from packed bit words. Bits beyond `n` must be clear.
    pub fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>, phase: Phase) -> Result<Self> {
        let w = word_count(n);
        if x.len() != w || z.len() != w {
            return Err(Error::InvalidArgument(format!(
                "expected {w} words for {n} qubits, got {} and {}",
                x.len(),
                z.len()
            )));
        }
        if !n.is_multiple_of(64) && w > 0 {
            let tail = !0u64 << (n % 64);
            if (x[w - 1] | z[w - 1]) & tail != 0 {
                return Err(Error::InvalidArgument("bits set beyond qubit count".into()));
            }
        }
        Ok(Self { n, x, z, phase })
    }

    /// Single-site operator `letter` on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(q, letter);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(get_bit(&self.x, q), get_bit(&self.z, q))
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let (xb, zb) = letter.bits();
        set_bit(&mut self.x, q, xb);
        set_bit(&mut self.z, q, zb);
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(|q| self.letter(q))
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&q| self.letter(q) != Letter::I)
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Number of `Y` sites.
    pub fn y_count(&self) -> u32 {
        and_popcount(&self.x, &self.z)
    }

    /// Exponent `e` such that `self = i^e X^x Z^z`.
    pub fn xz_exponent(&self) -> u32 {
        (self.phase.0 as u32 + self.y_count()) % 4
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.0.is_multiple_of(2)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let s = and_popcount(&self.x, &other.z) + and_popcount(&self.z, &other.x);
        s.is_multiple_of(2)
    }

    /// Letters only, no phase prefix.
    pub fn label(&self) -> String {
        self.letters().map(Letter::as_char).collect()
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut letters: Vec<Letter> = self.letters().collect();
        letters.extend(other.letters());
        PauliString::from_letters(&letters).with_phase(self.phase.mul(other.phase))
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase.prefix(), self.label())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// Parse a plain letter string such as `"XIZ"` into an `n`-qubit Pauli with phase +1.
pub fn parse_pauli(text: &str, n: usize) -> Result<PauliString> {
    let bad = |reason: String| Error::InvalidPauli {
        text: text.to_string(),
        reason,
    };
    let letters = text
        .chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| bad(format!("unexpected character {c:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if letters.len() != n {
        return Err(bad(format!(
            "expected {n} letters, found {}",
            letters.len()
        )));
    }
    Ok(PauliString::from_letters(&letters))
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional phase prefix (`+`, `-`, `i`, `+i`, `-i`) before the letters.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else {
            (Phase::ONE, s.strip_prefix('+').unwrap_or(s))
        };
        let n = rest.chars().count();
        Ok(parse_pauli(rest, n)
            .map_err(|e| match e {
                Error::InvalidPauli { reason, .. } => Error::InvalidPauli {
                    text: s.to_string(),
                    reason,
                },
                other => other,
            })?
            .with_phase(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `a · b` with the accumulated phase.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.check_same_size(b)?;
    // X^x1 Z^z1 X^x2 Z^z2 = (-1)^{z1·x2} X^{x1+x2} Z^{z1+z2}
    let e = a.xz_exponent() + b.xz_exponent() + 2 * and_popcount(&a.z, &b.x);
    let x: Vec<u64> = a.x.iter().zip(&b.x).map(|(p, q)| p ^ q).collect();
    let z: Vec<u64> = a.z.iter().zip(&b.z).map(|(p, q)| p ^ q).collect();
    let y = and_popcount(&x, &z);
    let letter_phase = Phase::from_exponent(e + 4 - (y % 4));
    Ok(PauliString {
        n: a.n,
        x,
        z,
        phase: letter_phase,
    })
}

/// Normalised Hilbert–Schmidt inner product `2^{-n} Tr(a b)` of two basis terms.
pub fn hs_inner(a: &PauliString, b: &PauliString) -> Result<f64> {
    a.check_same_size(b)?;
    if a.phase != Phase::ONE || b.phase != Phase::ONE {
        return Err(Error::InvalidArgument(format!(
            "basis terms must carry phase +1, got {a} and {b}"
        )));
    }
    Ok(if a.x == b.x && a.z == b.z { 1.0 } else { 0.0 })
}

/// Every non-identity string on `n` qubits with weight at most `k`, in
/// lexicographic letter order with `I < X < Y < Z` and qubit 0 most significant.
pub fn enumerate_klocal(n: usize, k: usize) -> Result<Vec<PauliString>> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "locality {k} must lie in 1..={n}"
        )));
    }
    let mut out = Vec::new();
    let mut current = vec![Letter::I; n];
    fn walk(q: usize, weight: usize, k: usize, cur: &mut [Letter], out: &mut Vec<PauliString>) {
        if q == cur.len() {
            if weight > 0 {
                out.push(PauliString::from_letters(cur));
            }
            return;
        }
        for l in Letter::ALL {
            let w = weight + usize::from(l != Letter::I);
            if w > k {
                continue;
            }
            cur[q] = l;
            walk(q + 1, w, k, cur, out);
        }
        cur[q] = Letter::I;
    }
    walk(0, 0, k, &mut current, &mut out);
    Ok(out)
}

/// `Σ_{j=1..k} C(n,j)·3^j`.
pub fn klocal_count(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut pow3 = 1u128;
    for j in 1..=k.min(n) {
        binom = binom * (n - j + 1) as u128 / j as u128;
        pow3 *= 3;
        total += binom * pow3;
    }
    total
}

#[derive(Debug, Clone, Serialize)]
#[serde(into = "ModelRecord")]
pub struct HamiltonianModel {
    n: usize,
    terms: Vec<PauliString>,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    n: usize,
    terms: Vec<String>,
    coeffs: Vec<f64>,
}

impl From<HamiltonianModel> for ModelRecord {
    fn from(m: HamiltonianModel) -> Self {
        ModelRecord {
            n: m.n,
            terms: m.terms.iter().map(PauliString::label).collect(),
            coeffs: m.coeffs,
        }
    }
}

impl<'de> Deserialize<'de> for HamiltonianModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = ModelRecord::deserialize(deserializer)?;
        let terms = rec
            .terms
            .iter()
            .map(|t| parse_pauli(t, rec.n))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        HamiltonianModel::new(rec.n, terms, rec.coeffs).map_err(serde::de::Error::custom)
    }
}

impl HamiltonianModel {
    pub fn new(n: usize, terms: Vec<PauliString>, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel(
                "a model needs at least one qubit".into(),
            ));
        }
        if terms.is_empty() {
            return Err(Error::InvalidModel(
                "a model needs at least one term".into(),
            ));
        }
        if terms.len() != coeffs.len() {
            return Err(Error::InvalidModel(format!(
                "{} terms but {} coefficients",
                terms.len(),
                coeffs.len()
            )));
        }
        let mut seen = HashSet::new();
        for t in &terms {
            if t.num_qubits() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    found: t.num_qubits(),
                });
            }
            if t.phase() != Phase::ONE {
                return Err(Error::InvalidModel(format!(
                    "term {t} does not carry phase +1"
                )));
            }
            if t.is_identity() {
                return Err(Error::InvalidModel(
                    "the identity is not a valid term".into(),
                ));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::InvalidModel(format!("duplicate term {t}")));
            }
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite coefficient {c}")));
        }
        Ok(Self { n, terms, coeffs })
    }

    /// Convenience constructor from labels such as `[("XZ", 0.3), ("ZI", -0.1)]`.
    pub fn from_labels(n: usize, pairs: &[(&str, f64)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|(t, _)| parse_pauli(t, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, terms, pairs.iter().map(|p| p.1).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.terms.clone(), coeffs)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Upper bound on the operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Append an extra term. Fails if it duplicates an existing one.
    pub fn with_extra_term(&self, term: PauliString, coeff: f64) -> Result<Self> {
        let mut terms = self.terms.clone();
        let mut coeffs = self.coeffs.clone();
        terms.push(term);
        coeffs.push(coeff);
        Self::new(self.n, terms, coeffs)
    }
}

/// Parameters for [`random_model`] with the optional low-intersection constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub coeff_bound: f64,
    /// When set, every term overlaps at most this many other terms.
    #[serde(default)]
    pub max_overlaps: Option<usize>,
}

impl ModelSpec {
    pub fn generate(&self, seed: u64) -> Result<HamiltonianModel> {
        if !(self.coeff_bound > 0.0 && self.coeff_bound.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient bound must be positive, got {}",
                self.coeff_bound
            )));
        }
        let pool = enumerate_klocal(self.n, self.k)?;
        if self.m == 0 || self.m > pool.len() {
            return Err(Error::InvalidArgument(format!(
                "requested {} terms but only {} {}-local terms exist on {} qubits",
                self.m,
                pool.len(),
                self.k,
                self.n
            )));
        }
        let mut r = rng::substream(seed, rng::domain::MODEL, 0);
        let terms = match self.max_overlaps {
            None => {
                let mut idx = sample(&mut r, pool.len(), self.m).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| pool[i].clone()).collect::<Vec<_>>()
            }
            Some(limit) => pick_low_intersection(&pool, self.m, limit, &mut r)?,
        };
        let coeffs = (0..self.m)
            .map(|_| r.random_range(-self.coeff_bound..=self.coeff_bound))
            .collect();
        HamiltonianModel::new(self.n, terms, coeffs)
    }
}

fn overlaps(a: &PauliString, b: &PauliString) -> bool {
    a.x.iter()
        .zip(&a.z)
        .zip(b.x.iter().zip(&b.z))
        .any(|((ax, az), (bx, bz))| (ax | az) & (bx | bz) != 0)
}

fn pick_low_intersection<R: Rng>(
    pool: &[PauliString],
    m: usize,
    limit: usize,
    r: &mut R,
) -> Result<Vec<PauliString>> {
    const ATTEMPTS: usize = 64;
    let mut order: Vec<usize> = (0..pool.len()).collect();
    for _ in 0..ATTEMPTS {
        order.shuffle(r);
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        let mut degree: Vec<usize> = Vec::with_capacity(m);
        for &i in &order {
            let hits: Vec<usize> = (0..chosen.len())
                .filter(|&j| overlaps(&pool[i], &pool[chosen[j]]))
                .collect();
            if hits.len() > limit || hits.iter().any(|&j| degree[j] + 1 > limit) {
                continue;
            }
            for &j in &hits {
                degree[j] += 1;
            }
            chosen.push(i);
            degree.push(hits.len());
            if chosen.len() == m {
                chosen.sort_unstable();
                return Ok(chosen.into_iter().map(|i| pool[i].clone()).collect());
            }
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not place {m} terms with at most {limit} overlaps each after {ATTEMPTS} attempts"
    )))
}

/// `M` distinct `k`-local terms drawn without replacement, coefficients uniform
/// on `[-coeff_bound, coeff_bound]`. Terms are returned in enumeration order.
pub fn random_model(
    n: usize,
    k: usize,
    m: usize,
    coeff_bound: f64,
    seed: u64,
) -> Result<HamiltonianModel> {
    ModelSpec {
        n,
        k,
        m,
        coeff_bound,
        max_overlaps: None,
    }
    .generate(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use proptest::prelude::*;

    // Independent oracle: explicit 2x2 matrices and Kronecker products.
    fn letter_matrix(l: Letter) -> [[C; 2]; 2] {
        let o = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        match l {
            Letter::I => [[one, o], [o, one]],
            Letter::X => [[o, one], [one, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[one, o], [o, -one]],
        }
    }

    fn dense(p: &PauliString) -> Vec<Vec<C>> {
        let mut m = vec![vec![p.phase().to_complex()]];
        for l in p.letters() {
            let s = letter_matrix(l);
            let d = m.len();
            let mut next = vec![vec![C::new(0.0, 0.0); 2 * d]; 2 * d];
            for r in 0..d {
                for c in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            next[2 * r + a][2 * c + b] = m[r][c] * s[a][b];
                        }
                    }
                }
            }
            m = next;
        }
        m
    }

    fn matmul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
        let d = a.len();
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| (0..d).map(|k| a[r][k] * b[k][c]).sum())
                    .collect()
            })
            .collect()
    }

    fn close(a: &[Vec<C>], b: &[Vec<C>]) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn parse_examples() {
        let xz = parse_pauli("XZ", 2).unwrap();
        assert_eq!(xz.letter(0), Letter::X);
        assert_eq!(xz.letter(1), Letter::Z);
        assert_eq!(xz.phase(), Phase::ONE);
        assert!(parse_pauli("II", 2).unwrap().is_identity());
        assert!(parse_pauli("A", 1).is_err());
        assert!(parse_pauli("XZ", 3).is_err());
    }

    #[test]
    fn product_examples() {
        let x = parse_pauli("X", 1).unwrap();
        let y = parse_pauli("Y", 1).unwrap();
        let z = parse_pauli("Z", 1).unwrap();
        let xy = pauli_product(&x, &y).unwrap();
        assert_eq!(xy.label(), "Z");
        assert_eq!(xy.phase(), Phase::I);
        let zz = pauli_product(&z, &z).unwrap();
        assert!(zz.is_identity());
        assert_eq!(zz.phase(), Phase::ONE);
        let a = parse_pauli("XI", 2).unwrap();
        let b = parse_pauli("IZ", 2).unwrap();
        let ab = pauli_product(&a, &b).unwrap();
        assert_eq!(ab.to_string(), "XZ");
        assert!(pauli_product(&x, &a).is_err());
    }

    #[test]
    fn hs_inner_examples() {
        let p = |s: &str| parse_pauli(s, s.len()).unwrap();
        assert_eq!(hs_inner(&p("Z"), &p("Z")).unwrap(), 1.0);
        assert_eq!(hs_inner(&p("X"), &p("Z")).unwrap(), 0.0);
        assert_eq!(hs_inner(&p("XZ"), &p("XX")).unwrap(), 0.0);
    }

    #[test]
    fn hs_inner_matches_dense_trace_exhaustively() {
        for n in 1..=3 {
            let all = enumerate_klocal(n, n).unwrap();
            let d = (1usize << n) as f64;
            for a in &all {
                for b in &all {
                    let m = matmul(&dense(a), &dense(b));
                    let tr: C = (0..m.len()).map(|i| m[i][i]).sum();
                    assert!((tr.re / d - hs_inner(a, b).unwrap()).abs() < 1e-12);
                    assert!(tr.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_klocal(2, 1).unwrap().len(), 6);
        assert_eq!(enumerate_klocal(2, 2).unwrap().len(), 15);
        assert_eq!(enumerate_klocal(3, 2).unwrap().len(), 36);
        let labels: Vec<String> = enumerate_klocal(2, 1)
            .unwrap()
            .iter()
            .map(|p| p.label())
            .collect();
        assert_eq!(labels, ["IX", "IY", "IZ", "XI", "YI", "ZI"]);
        assert!(enumerate_klocal(2, 0).is_err());
        assert!(enumerate_klocal(2, 3).is_err());
        for n in 1..=6 {
            for k in 1..=n {
                let v = enumerate_klocal(n, k).unwrap();
                assert_eq!(v.len() as u128, klocal_count(n, k));
                let labels: Vec<String> = v.iter().map(|p| p.label().replace('I', "A")).collect();
                assert!(labels.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn random_model_examples() {
        let m = random_model(1, 1, 1, 1.0, 3).unwrap();
        assert_eq!(m.num_terms(), 1);
        assert!(m.coeffs()[0].abs() <= 1.0);
        let a = random_model(3, 2, 9, 0.5, 11).unwrap();
        let b = random_model(3, 2, 9, 0.5, 11).unwrap();
        assert_eq!(a.terms(), b.terms());
        assert_eq!(a.coeffs(), b.coeffs());
        assert!(random_model(2, 1, 7, 1.0, 0).is_err());
    }

    #[test]
    fn low_intersection_mode_respects_limit() {
        for seed in 0..20 {
            let spec = ModelSpec {
                n: 6,
                k: 2,
                m: 5,
                coeff_bound: 1.0,
                max_overlaps: Some(1),
            };
            let model = spec.generate(seed).unwrap();
            for a in model.terms() {
                let hits = model
                    .terms()
                    .iter()
                    .filter(|b| *b != a && overlaps(a, b))
                    .count();
                assert!(hits <= 1);
            }
        }
        let impossible = ModelSpec {
            n: 2,
            k: 1,
            m: 3,
            coeff_bound: 1.0,
            max_overlaps: Some(0),
        };
        assert!(impossible.generate(0).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let m = HamiltonianModel::from_labels(3, &[("XIZ", 0.25), ("IYI", -1.5)]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"n":3,"terms":["XIZ","IYI"],"coeffs":[0.25,-1.5]}"#
        );
        let back: HamiltonianModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back.terms(), m.terms());
        assert!(serde_json::from_str::<HamiltonianModel>(
            r#"{"n":1,"terms":["X","X"],"coeffs":[1,2]}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<HamiltonianModel>(r#"{"n":1,"terms":["I"],"coeffs":[1]}"#)
                .is_err()
        );
    }

    #[test]
    fn display_round_trips_phase() {
        for s in ["XZ", "-XZ", "iXZ", "-iXZ"] {
            let p: PauliString = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (proptest::collection::vec(0usize..4, n), 0u32..4).prop_map(|(ls, e)| {
            let letters: Vec<Letter> = ls.into_iter().map(|i| Letter::ALL[i]).collect();
            PauliString::from_letters(&letters).with_phase(Phase::from_exponent(e))
        })
    }

    proptest! {
        #[test]
        fn product_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let ab = pauli_product(&a, &b).unwrap();
            prop_assert!(close(&dense(&ab), &matmul(&dense(&a), &dense(&b))));
        }

        #[test]
        fn product_is_associative(a in arb_pauli(4), b in arb_pauli(4), c in arb_pauli(4)) {
            let left = pauli_product(&pauli_product(&a, &b).unwrap(), &c).unwrap();
            let right = pauli_product(&a, &pauli_product(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn right_multiplying_twice_recovers_up_to_sign(a in arb_pauli(5), b in arb_pauli(5)) {
            let b = b.with_phase(Phase::ONE);
            let back = pauli_product(&pauli_product(&a, &b).unwrap(), &b).unwrap();
            prop_assert_eq!(back.label(), a.label());
            let ratio = (back.phase().exponent() + 4 - a.phase().exponent()) % 4;
            prop_assert!(ratio == 0 || ratio == 2);
        }

        #[test]
        fn commutation_matches_products(a in arb_pauli(4), b in arb_pauli(4)) {
            let ab = pauli_product(&a, &b).unwrap();
            let ba = pauli_product(&b, &a).unwrap();
            prop_assert_eq!(a.commutes_with(&b), ab == ba);
        }
    }
}
