//! Reproducible per-trial random streams.
//!
//! Every trial draws from its own ChaCha8 stream, keyed by `(seed, trial)`.
//! ChaCha is counter based, so stream `i` never depends on how many numbers
//! other trials consumed, and results do not depend on the parallel schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// The stream for trial `trial` under master seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A seeded stream for one-off constructions (instance generators).
pub fn seeded(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}
