//! Reproducible random streams and schedule-independent accumulation.
//!
//! Each trial owns its own ChaCha8 stream keyed by `(seed, substream)`
//! with the trial index as the stream id, so the draws of trial `t` never
//! depend on which worker ran it. Trials are grouped into fixed-size chunks
//! whose partial sums are merged in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials per work unit.
pub const CHUNK: u64 = 1024;

/// Sub-stream tags, one per independent experiment kind.
pub mod substream {
    pub const CHANNEL: u64 = 1;
    pub const ERLANG: u64 = 2;
    pub const LEAKAGE: u64 = 3;
    pub const ANTENNAS: u64 = 4;
    pub const REFERENCE: u64 = 5;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn trial_rng(seed: u64, substream: u64, trial: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(substream));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(trial);
    rng
}

/// Running sums of a per-trial scalar.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum / self.count as f64
    }

    /// Sample standard deviation over √count.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Runs `body(trial, &mut acc)` for every trial, in parallel chunks, and
/// folds the chunk accumulators in chunk order.
pub fn chunked<A, I, F, M>(trials: u64, init: I, body: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(u64, &mut A) + Sync,
    M: Fn(&mut A, A),
{
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let end = ((c + 1) * CHUNK).min(trials);
            for t in c * CHUNK..end {
                body(t, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = init();
    for p in parts {
        merge(&mut total, p);
    }
    total
}
