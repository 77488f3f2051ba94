//! `PCSH1` binary snapshot records.
//!
//! Layout: the 5-byte magic `PCSH1`, a `u64` little-endian record count, then
//! per record a `u16` little-endian qubit count `η` followed by the bits of the
//! `2η × 2η` symplectic matrix (row-major), the `2η` sign bits and the `η`
//! outcome bits. Bits are packed least-significant first and each record is
//! padded to a whole byte.

use std::io::{Read, Write};

use super::tableau::CliffordTableau;
use crate::bits::BitString;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"PCSH1";

fn pack(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

fn unpack(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len)
        .map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1)
        .collect()
}

pub fn write_records<'a, W, I>(mut w: W, count: usize, records: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a CliffordTableau, &'a BitString)>,
{
    w.write_all(MAGIC)?;
    w.write_all(&(count as u64).to_le_bytes())?;
    let mut written = 0usize;
    for (tab, outcome) in records {
        let n = tab.num_qubits();
        if outcome.len() != n {
            return Err(Error::QubitMismatch {
                expected: n,
                found: outcome.len(),
            });
        }
        let eta = u16::try_from(n)
            .map_err(|_| Error::Format(format!("{n} qubits do not fit a record")))?;
        w.write_all(&eta.to_le_bytes())?;
        let mut bits = tab.symplectic_matrix();
        bits.extend(tab.signs());
        bits.extend_from_slice(outcome.bits());
        w.write_all(&pack(&bits))?;
        written += 1;
    }
    if written != count {
        return Err(Error::Format(format!(
            "header announced {count} records but {written} were written"
        )));
    }
    Ok(())
}

pub fn read_records<R: Read>(mut r: R) -> Result<Vec<(CliffordTableau, BitString)>> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing PCSH1 header".into()));
    }
    let mut count = [0u8; 8];
    r.read_exact(&mut count)?;
    let count = u64::from_le_bytes(count);
    let mut out = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let mut eta = [0u8; 2];
        r.read_exact(&mut eta)?;
        let n = u16::from_le_bytes(eta) as usize;
        let m = 2 * n;
        let total = m * m + m + n;
        let mut bytes = vec![0u8; total.div_ceil(8)];
        r.read_exact(&mut bytes)?;
        let bits = unpack(&bytes, total);
        let tab = CliffordTableau::from_symplectic(n, &bits[..m * m], &bits[m * m..m * m + m])?;
        out.push((tab, BitString::from_bits(bits[m * m + m..].to_vec())));
    }
    Ok(out)
}
