//! Seed fan-out.
//!
//! A single master seed is split into independent deterministic streams via
//! ChaCha's counter-based stream mechanism, so parallel rollout workers and
//! the trainer never share RNG state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep streams for different subsystems disjoint.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Trainer = 0,
    Env = 1,
    Policy = 2,
    Her = 3,
    Domain = 4,
    Eval = 5,
    Init = 6,
    Select = 7,
}

/// Deterministic RNG for (master seed, purpose, index).
pub fn stream_rng(master_seed: u64, purpose: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((purpose as u64) << 48) ^ index);
    rng
}

/// SplitMix64-style seed mixing for derived single-value seeds.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
