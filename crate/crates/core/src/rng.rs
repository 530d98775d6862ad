//! Counter-based random substreams.
//!
//! The generator for replicate `i` is ChaCha8 keyed by `(master_seed, purpose)`
//! and positioned on stream number `i`. It is a pure function of those three
//! values, so replicates may be evaluated in any order on any number of
//! workers and still reproduce the same draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Keeps unrelated procedures from ever sharing draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Bootstrap = 0x626f_6f74,
    Permutation = 0x7065_726d,
    Population = 0x706f_7075,
    Derive = 0x6465_7276,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplicateStream {
    master_seed: u64,
}

impl ReplicateStream {
    pub fn new(master_seed: u64) -> Self {
        ReplicateStream { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn rng(&self, purpose: Purpose, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }

    /// An independent stream family for nested work unit `index`
    /// (a coverage trial, a CV repetition).
    pub fn child(&self, index: u64) -> ReplicateStream {
        ReplicateStream::new(self.rng(Purpose::Derive, index).random())
    }
}
