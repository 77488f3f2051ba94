//! Uniform sampling over the Clifford group modulo global phase, via the
//! Hadamard-free decomposition `F1 · H · S_perm · F2` with a quantum-Mallows
//! draw of the Hadamard layer and permutation.

use rand::Rng;

use super::tableau::CliffordTableau;
use crate::rng;

type Mat = Vec<Vec<bool>>;

fn sample_mallows<R: Rng + ?Sized>(n: usize, r: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let u: f64 = r.random();
        let index = ((-(u + (1.0 - u) * eps).log2().ceil()) as usize).min(2 * m - 1);
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = remaining.remove(k);
    }
    (had, perm)
}

fn random_symmetric<R: Rng + ?Sized>(n: usize, r: &mut R) -> Mat {
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = r.random();
    }
    for i in 0..n {
        for j in 0..i {
            let v = r.random();
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

fn random_unit_lower<R: Rng + ?Sized>(n: usize, r: &mut R) -> Mat {
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        m[i][i] = true;
        for j in 0..i {
            m[i][j] = r.random();
        }
    }
    m
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (rows, inner, cols) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| (0..inner).fold(false, |acc, k| acc ^ (a[i][k] & b[k][j])))
                .collect()
        })
        .collect()
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
fn inverse_unit_lower(m: &Mat) -> Mat {
    let n = m.len();
    let mut inv = vec![vec![false; n]; n];
    for col in 0..n {
        inv[col][col] = true;
        for i in col + 1..n {
            inv[i][col] = (col..i).fold(false, |acc, k| acc ^ (m[i][k] & inv[k][col]));
        }
    }
    inv
}

fn transpose(m: &Mat) -> Mat {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

/// `[[Δ, 0], [ΓΔ, (Δ^{-1})ᵀ]]`.
fn hadamard_free_block<R: Rng + ?Sized>(n: usize, r: &mut R, gamma: Mat) -> Mat {
    let delta = random_unit_lower(n, r);
    let prod = matmul(&gamma, &delta);
    let inv_t = transpose(&inverse_unit_lower(&delta));
    let mut t = vec![vec![false; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            t[i][j] = delta[i][j];
            t[n + i][j] = prod[i][j];
            t[n + i][n + j] = inv_t[i][j];
        }
    }
    t
}

pub fn random_clifford<R: Rng + ?Sized>(n: usize, r: &mut R) -> CliffordTableau {
    assert!(n >= 1, "a Clifford needs at least one qubit");
    let (had, perm) = sample_mallows(n, r);
    let gamma1 = random_symmetric(n, r);
    let gamma2 = random_symmetric(n, r);
    let table1 = hadamard_free_block(n, r, gamma1);
    let table2 = hadamard_free_block(n, r, gamma2);

    let mut table: Mat = perm
        .iter()
        .map(|&p| table2[p].clone())
        .chain(perm.iter().map(|&p| table2[n + p].clone()))
        .collect();
    for (i, &h) in had.iter().enumerate() {
        if h {
            table.swap(i, n + i);
        }
    }
    let symplectic = matmul(&table1, &table);
    let flat: Vec<bool> = symplectic.into_iter().flatten().collect();
    let signs: Vec<bool> = (0..2 * n).map(|_| r.random()).collect();
    CliffordTableau::from_symplectic(n, &flat, &signs)
        .expect("the sampler emits symplectic matrices")
}

/// Seeded uniform Clifford on `n` qubits.
pub fn sample_uniform_clifford(n: usize, seed: u64) -> CliffordTableau {
    random_clifford(
        n,
        &mut rng::substream(seed, rng::domain::CLIFFORD_SNAPSHOT, 0),
    )
}
