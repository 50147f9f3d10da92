//! Seeded, splittable random streams.
//!
//! Every experiment is driven from a single `u64` seed. Independent streams
//! (one per trial, per oracle, per sampler) are derived by selecting a ChaCha
//! stream id from a path of labels, so the values a trial sees never depend
//! on scheduling or on how many other trials ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
    stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive a child stream. Children with different labels are independent.
    pub fn child(&self, label: u64) -> Self {
        Self { seed: self.seed, stream: splitmix64(self.stream ^ splitmix64(label.wrapping_add(1))) }
    }

    pub fn rng(&self) -> Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    SeedStream::new(seed).rng()
}
