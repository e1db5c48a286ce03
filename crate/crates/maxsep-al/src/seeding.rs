//! Deterministic seed derivation and the primitive random draws used by
//! the selection strategies.
//!
//! Every source of randomness in a run is a ChaCha8 stream derived from the
//! run's base seed and a stream tag, so independent concerns (initial split,
//! per-round weight init, per-round shuffles, selection) never share state.
//! Replaying a run with selection bypassed therefore leaves the training
//! streams untouched.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags for the independent RNG streams of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Initial labeled/unlabeled split.
    Split,
    /// Acquisition strategies (random sampling, k-means seeding, ...).
    Select,
    /// Per-round model weight initialization.
    ModelInit,
    /// Per-round minibatch shuffling.
    Shuffle,
    /// Synthetic data generation.
    Data,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Split => 1,
            Stream::Select => 2,
            Stream::ModelInit => 3,
            Stream::Shuffle => 4,
            Stream::Data => 5,
        }
    }
}

/// splitmix64 finalizer; decorrelates nearby seeds.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derive the seed for `stream` at `round` from a run's base seed.
pub fn derive_seed(base: u64, stream: Stream, round: u64) -> u64 {
    splitmix64(splitmix64(base ^ stream.tag().wrapping_mul(0xa076_1d64_78bd_642f)) ^ round)
}

/// ChaCha8 generator for `stream` at `round`.
pub fn stream_rng(base: u64, stream: Stream, round: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream, round))
}

/// One uniform draw in [0, 1).
pub fn unit_f64<R: Rng>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

/// Uniform index in [0, n): floor(u * n) clamped to n - 1.
pub fn pick_index<R: Rng>(rng: &mut R, n: usize) -> usize {
    assert!(n > 0, "pick_index on empty range");
    ((unit_f64(rng) * n as f64) as usize).min(n - 1)
}

/// Weighted index draw by inverse CDF: u = unit * total, pick the first
/// index whose cumulative weight exceeds u. Falls back to the last index
/// with positive weight when rounding pushes u past the total.
pub fn pick_weighted<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return pick_index(rng, weights.len());
    }
    let u = unit_f64(rng) * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc > u {
            return i;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Sample `k` distinct positions from [0, n) by partial Fisher-Yates.
pub fn sample_without_replacement<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot sample {k} from {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + pick_index(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
