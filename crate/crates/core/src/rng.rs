//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 keystream selected by a
//! 256-bit key and a 64-bit stream number; the block counter is the draw index.
//! A [`StreamKey`] is derived from a top-level seed and a replication index, and
//! sub-streams (annulus levels, marks, nested cells, ...) are derived by hashing
//! the parent key with a tag. Output therefore depends only on
//! `(seed, stream, tag path)`, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Well-known tags for derived sub-streams.
pub mod tag {
    pub const LEVEL: u64 = 0x4c45_5645_4c00_0000;
    pub const MARKS: u64 = 0x4d41_524b_5300_0000;
    pub const GERMS: u64 = 0x4745_524d_5300_0000;
    pub const THIN: u64 = 0x5448_494e_0000_0000;
    pub const PALM: u64 = 0x5041_4c4d_0000_0000;
    pub const AXIS_V: u64 = 0x4158_4953_5600_0000;
    pub const AXIS_H: u64 = 0x4158_4953_4800_0000;
    pub const CELL: u64 = 0x4345_4c4c_0000_0000;
    pub const FIRST_LAYER: u64 = 0x4649_5253_5400_0000;
    pub const CHAIN: u64 = 0x4348_4149_4e00_0000;
    pub const LINES: u64 = 0x4c49_4e45_5300_0000;
    pub const BRANCH: u64 = 0x4252_414e_4348_0000;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    key: [u8; 32],
    seed: u64,
    stream: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"tessmc/root");
        h.update(seed.to_le_bytes());
        StreamKey { key: h.finalize().into(), seed, stream }
    }

    /// Top-level seed this key descends from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Replication index of the root key.
    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent sub-stream identified by `tag`.
    pub fn child(&self, tag: u64) -> StreamKey {
        let mut h = Sha256::new();
        h.update(b"tessmc/child");
        h.update(self.key);
        h.update(self.stream.to_le_bytes());
        h.update(tag.to_le_bytes());
        StreamKey { key: h.finalize().into(), seed: self.seed, stream: self.stream }
    }

    /// Sub-stream identified by a tag and an index (e.g. level `k`, cell `i`).
    pub fn child_indexed(&self, tag: u64, index: u64) -> StreamKey {
        self.child(tag).child(index)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(self.stream);
        rng
    }
}
