//! Deterministic seed derivation. Every random stream in a run is derived
//! from the master seed plus a stream tag and an index, so any single stream
//! can be rebuilt without replaying the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags keep derived seeds for different purposes disjoint.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub enum Stream {
    EnvLayout = 1,
    TestsetEpisode = 2,
    RandomActions = 3,
    Synonyms = 4,
    Exploration = 5,
    Sampling = 6,
    Init = 7,
    Instructions = 8,
    Eval = 9,
    Rollout = 10,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ (stream as u64).rotate_left(32)) ^ index)
}

pub fn rng_for(base: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream, index))
}
