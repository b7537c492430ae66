//! Counter-keyed randomness: every draw is addressed by
//! `(seed, purpose labels…, round, node)`, so streams never overlap and a run
//! can be reproduced from its seed alone.

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

/// Labels separating independent consumers of one seed.
pub mod purpose {
    pub const UNIFORM_GOSSIP: u64 = 0x11;
    pub const SUPERSTEP: u64 = 0x22;
    pub const BASELINE: u64 = 0x33;
    pub const TAPE: u64 = 0x44;
    pub const SIMULATION: u64 = 0x55;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomSource {
    key: u64,
}

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn combine(key: u64, label: u64) -> u64 {
    mix(key ^ mix(label).rotate_left(17))
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { key: mix(seed) }
    }

    /// An independent child source for a sub-purpose (protocol, iteration, …).
    pub fn derive(&self, label: u64) -> Self {
        RandomSource { key: combine(self.key, label) }
    }

    /// Generator for one node in one round.
    pub fn rng(&self, round: u64, node: u64) -> Pcg64Mcg {
        Pcg64Mcg::seed_from_u64(combine(combine(self.key, round), node))
    }
}
