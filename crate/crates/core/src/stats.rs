//! Streaming mean/variance accumulation with a deterministic parallel
//! reduction.
//!
//! Samples are processed in fixed-size chunks; each chunk accumulates its own
//! Welford state and the chunk states are merged in a fixed pairwise tree.
//! The reduction order depends only on the sample count, never on thread
//! scheduling, so results are bit-identical for any worker count.

use rayon::prelude::*;

/// Number of samples per reduction chunk. Fixed so that the chunk boundaries
/// (and hence the merge tree) are independent of the worker count.
pub const CHUNK: u64 = 8192;

/// Welford running mean and second central moment.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. combination of two partial states.
    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 =
            self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 when fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n > 1 {
            (self.variance() / self.n as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Per-chunk accumulator for weighted-path estimators: moments of the sample
/// weight plus the largest jump count seen (used for overflow diagnostics).
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleStats {
    pub moments: RunningMoments,
    pub max_jumps: u32,
}

impl SampleStats {
    pub fn push(&mut self, weight: f64, jumps: u32) {
        self.moments.push(weight);
        self.max_jumps = self.max_jumps.max(jumps);
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            moments: self.moments.merge(other.moments),
            max_jumps: self.max_jumps.max(other.max_jumps),
        }
    }
}

/// Merge partial states in a fixed pairwise tree (adjacent pairs per pass).
pub fn pairwise_merge(mut parts: Vec<SampleStats>) -> SampleStats {
    if parts.is_empty() {
        return SampleStats::default();
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|pair| {
                if pair.len() == 2 {
                    pair[0].merge(pair[1])
                } else {
                    pair[0]
                }
            })
            .collect();
    }
    parts[0]
}

/// Evaluate `eval(sample_index) -> (weight, jumps)` for indices `0..n_samples`
/// in parallel and reduce deterministically.
pub fn parallel_sample_sum<F>(n_samples: u64, eval: F) -> SampleStats
where
    F: Fn(u64) -> (f64, u32) + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<SampleStats> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n_samples);
            let mut acc = SampleStats::default();
            for i in lo..hi {
                let (w, j) = eval(i);
                acc.push(w, j);
            }
            acc
        })
        .collect();
    pairwise_merge(parts)
}
