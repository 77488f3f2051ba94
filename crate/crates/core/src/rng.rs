//! Seeded random substreams.
//!
//! All randomness is drawn from ChaCha8 keyed by the root seed. Independent
//! tasks (snapshot `i`, preparation attempt `j`, sweep point `p`, ...) use
//! their own 64-bit stream id `(domain << 48) | index`, so results do not
//! depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream domains. The high 16 bits of the stream id.
pub mod domain {
    pub const CLIFFORD_SNAPSHOT: u64 = 1;
    pub const PAULI_SNAPSHOT: u64 = 2;
    pub const PREPARATION: u64 = 3;
    pub const PERTURBATION: u64 = 4;
    pub const MODEL: u64 = 5;
    pub const SWEEP_POINT: u64 = 6;
    pub const NOISE: u64 = 7;
    pub const MEASUREMENT: u64 = 8;
}

const INDEX_MASK: u64 = (1 << 48) - 1;

/// Generator for item `index` of `domain` under `root`.
pub fn substream(root: u64, domain: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream((domain << 48) | (index & INDEX_MASK));
    rng
}

/// Derive a child root seed, used when a whole sub-experiment needs its own
/// family of substreams.
pub fn derive_seed(root: u64, domain: u64, index: u64) -> u64 {
    use rand::Rng;
    substream(root, domain, index).random()
}

pub fn from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
