//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit generator. Independent pieces of
//! work (trials, seeds, rayon tasks) get their own stream derived from a
//! `(seed, task)` pair, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream `task` of the generator seeded with `seed`.
pub fn stream(seed: u64, task: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Derive a fresh child stream from an existing generator.
pub fn fork(rng: &mut Rng, task: u64) -> Rng {
    use rand::Rng as _;
    stream(rng.random(), task)
}
