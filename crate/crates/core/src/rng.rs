//! Seed streams.
//!
//! A [`SeededRng`] names a random stream by `(master_seed, stream_id)`. Every
//! random draw in the crate comes from a generator built out of one of these,
//! and nested work (bootstrap iteration `b`, study `s`, ...) derives child
//! streams with [`SeededRng::derive`]. Because derivation is a pure function of
//! the indices, results never depend on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator type handed out by [`SeededRng::rng`].
pub type StreamRng = ChaCha8Rng;

/// What a derived stream is used for. Distinct roles never share a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Iteration = 1,
    Fit = 2,
    Resample = 3,
    Study = 4,
    Perturb = 5,
    FeatureSubset = 6,
    Split = 7,
    Sample = 8,
    NullDraw = 9,
    MonteCarlo = 10,
    Source = 11,
    MixtureMeans = 12,
    Repeat = 13,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeededRng {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_id: 0,
        }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// Child stream for `(role, index)` below this one.
    pub fn derive(self, role: Role, index: u64) -> Self {
        let tag = splitmix64(role as u64 ^ 0xA076_1D64_78BD_642F);
        let mixed = splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(tag)));
        Self {
            master_seed: self.master_seed,
            stream_id: mixed,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

impl Default for SeededRng {
    fn default() -> Self {
        Self::new(0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
