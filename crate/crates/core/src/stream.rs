//! Counter-based random substreams.
//!
//! Every trial gets its own ChaCha8 key built from (master seed, domain tag,
//! trial index), so results do not depend on how trials are split across
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Domain tags keep different simulators from sharing substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Coverage = 1,
    Hit = 2,
    Laplace = 3,
    Geometry = 4,
    Sweep = 5,
}

pub fn trial_rng(seed: u64, tag: StreamTag, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&(tag as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

const BLOCK: u64 = 4096;

/// Runs `trial` for every index in `0..trials` across the rayon pool and
/// returns (Σ x, Σ x²). Partial sums are formed over fixed index blocks and
/// combined in block order, so the floating-point result is the same for any
/// number of workers.
pub fn sum_trials<F>(trials: u64, trial: F) -> (f64, f64)
where
    F: Fn(u64) -> f64 + Sync,
{
    let blocks = trials.div_ceil(BLOCK);
    let partial: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let end = ((b + 1) * BLOCK).min(trials);
            (b * BLOCK..end).fold((0.0, 0.0), |(s, q), i| {
                let x = trial(i);
                (s + x, q + x * x)
            })
        })
        .collect();
    partial
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b))
}

/// Counts the trials in `0..trials` for which `trial` returns true.
pub fn count_trials<F>(trials: u64, trial: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    (0..trials).into_par_iter().filter(|&i| trial(i)).count() as u64
}
