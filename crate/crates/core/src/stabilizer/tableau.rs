use super::row::{bit, dot, Row};
use crate::circuit::{inverse_sequence, validate_sequence, Gate};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Clifford `U` stored by its action on the Pauli generators: row `j` is
/// `U X_j U†` and row `n + j` is `U Z_j U†`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<Row>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|j| Row::single_x(n, j))
            .chain((0..n).map(|j| Row::single_z(n, j)))
            .collect();
        Self { n, rows }
    }

    /// Build from a `2n × 2n` row-major binary matrix (row `r` holds the x bits
    /// then the z bits of generator image `r`) and `2n` sign bits.
    pub fn from_symplectic(n: usize, matrix: &[bool], signs: &[bool]) -> Result<Self> {
        let m = 2 * n;
        if matrix.len() != m * m || signs.len() != m {
            return Err(Error::InvalidArgument(format!(
                "a {n}-qubit tableau needs {} matrix bits and {m} signs",
                m * m
            )));
        }
        let rows = (0..m)
            .map(|r| {
                let mut row = Row::identity(n);
                for q in 0..n {
                    if matrix[r * m + q] {
                        super::row::flip(&mut row.x, q);
                    }
                    if matrix[r * m + n + q] {
                        super::row::flip(&mut row.z, q);
                    }
                }
                row.set_letter_sign(signs[r]);
                row
            })
            .collect();
        let tab = Self { n, rows };
        tab.check_symplectic()?;
        Ok(tab)
    }

    /// Tableau of `g_{m-1} ⋯ g_1 g_0` for a sequence applied in order.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self> {
        validate_sequence(gates, n)?;
        let mut t = Self::identity(n);
        for &g in gates {
            t.apply_gate(g);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub(crate) fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// `U X_j U†`.
    pub fn destabilizer(&self, j: usize) -> PauliString {
        self.rows[j].to_pauli(self.n)
    }

    /// `U Z_j U†`.
    pub fn stabilizer(&self, j: usize) -> PauliString {
        self.rows[self.n + j].to_pauli(self.n)
    }

    pub fn symplectic_bit(&self, r: usize, c: usize) -> bool {
        if c < self.n {
            bit(&self.rows[r].x, c)
        } else {
            bit(&self.rows[r].z, c - self.n)
        }
    }

    pub fn symplectic_matrix(&self) -> Vec<bool> {
        let m = 2 * self.n;
        (0..m * m)
            .map(|i| self.symplectic_bit(i / m, i % m))
            .collect()
    }

    /// Letter-form sign bits.
    pub fn signs(&self) -> Vec<bool> {
        self.rows.iter().map(Row::letter_sign).collect()
    }

    pub fn check_symplectic(&self) -> Result<()> {
        let n = self.n;
        for a in 0..2 * n {
            if self.rows[a].e % 2 != (dot(&self.rows[a].x, &self.rows[a].z) % 2) as u8 {
                return Err(Error::NotSymplectic(format!("row {a} is not Hermitian")));
            }
            for b in a + 1..2 * n {
                let expected = a < n && b == a + n;
                if self.rows[a].anticommutes(&self.rows[b]) != expected {
                    return Err(Error::NotSymplectic(format!(
                        "rows {a} and {b} {} but should {}",
                        if expected { "commute" } else { "anticommute" },
                        if expected { "anticommute" } else { "commute" }
                    )));
                }
            }
        }
        Ok(())
    }

    /// `U ← G U`.
    pub fn apply_gate(&mut self, g: Gate) {
        for r in &mut self.rows {
            r.conj_gate(g);
        }
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        Ok(self.conjugate_row(&Row::from_pauli(p)).to_pauli(self.n))
    }

    pub(crate) fn conjugate_row(&self, src: &Row) -> Row {
        let mut out = Row::identity(self.n);
        out.e = src.e;
        // X^x Z^z = Π_j X_j^{x_j} · Π_j Z_j^{z_j}
        for j in 0..self.n {
            if bit(&src.x, j) {
                out.mul_right(&self.rows[j]);
            }
        }
        for j in 0..self.n {
            if bit(&src.z, j) {
                out.mul_right(&self.rows[self.n + j]);
            }
        }
        out
    }

    fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }
}

fn has_x_from(r: &Row, from: usize, n: usize) -> Option<usize> {
    (from..n).find(|&k| bit(&r.x, k))
}

/// Gate word over `{H, S, CX}` whose product, applied in order, has tableau `tab`.
pub fn tableau_to_gates(tab: &CliffordTableau) -> Result<Vec<Gate>> {
    tab.check_symplectic()?;
    let n = tab.n;
    let mut w = tab.clone();
    let mut ops: Vec<Gate> = Vec::new();
    let mut push = |w: &mut CliffordTableau, g: Gate| {
        w.apply_gate(g);
        ops.push(g);
    };
    let cz = |w: &mut CliffordTableau,
              push: &mut dyn FnMut(&mut CliffordTableau, Gate),
              a: usize,
              b: usize| {
        push(w, Gate::H(b));
        push(w, Gate::Cx(a, b));
        push(w, Gate::H(b));
    };

    for i in 0..n {
        // Destabilizer i becomes ±X_i.
        if has_x_from(&w.rows[i], i, n).is_none() {
            let k = (i..n).find(|&k| bit(&w.rows[i].z, k)).ok_or_else(|| {
                Error::Invariant(format!("destabilizer {i} vanished on qubits >= {i}"))
            })?;
            push(&mut w, Gate::H(k));
        }
        if !bit(&w.rows[i].x, i) {
            let k = has_x_from(&w.rows[i], i + 1, n).expect("an x bit exists");
            push(&mut w, Gate::Cx(k, i));
        }
        for k in i + 1..n {
            if bit(&w.rows[i].x, k) {
                push(&mut w, Gate::Cx(i, k));
            }
        }
        if bit(&w.rows[i].z, i) {
            push(&mut w, Gate::S(i));
        }
        for k in i + 1..n {
            if bit(&w.rows[i].z, k) {
                cz(&mut w, &mut push, i, k);
            }
        }
        // Stabilizer i becomes ±Z_i, cleared while it reads as an X-type row.
        push(&mut w, Gate::H(i));
        let s = n + i;
        for k in i + 1..n {
            if bit(&w.rows[s].x, k) {
                push(&mut w, Gate::Cx(i, k));
            }
        }
        if bit(&w.rows[s].z, i) {
            push(&mut w, Gate::S(i));
        }
        for k in i + 1..n {
            if bit(&w.rows[s].z, k) {
                cz(&mut w, &mut push, i, k);
            }
        }
        push(&mut w, Gate::H(i));
    }
    for i in 0..n {
        if w.rows[i].letter_sign() {
            push(&mut w, Gate::S(i));
            push(&mut w, Gate::S(i));
        }
        if w.rows[n + i].letter_sign() {
            for g in [Gate::H(i), Gate::S(i), Gate::S(i), Gate::H(i)] {
                push(&mut w, g);
            }
        }
    }
    if !w.is_identity() {
        return Err(Error::Invariant(
            "tableau reduction did not reach the identity".into(),
        ));
    }
    Ok(simplify(inverse_sequence(&ops)))
}

/// Cancel adjacent `H H` pairs and reduce runs of `S` mod 4.
fn simplify(gates: Vec<Gate>) -> Vec<Gate> {
    let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
    for g in gates {
        match g {
            Gate::H(q) if out.last() == Some(&Gate::H(q)) => {
                out.pop();
            }
            Gate::S(q) => {
                let run = out.iter().rev().take_while(|&&p| p == Gate::S(q)).count();
                if run == 3 {
                    out.truncate(out.len() - 3);
                } else {
                    out.push(g);
                }
            }
            g => out.push(g),
        }
    }
    out
}
