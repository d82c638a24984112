//! Reproducible per-sample random streams.
//!
//! Every Monte Carlo sample draws from its own counter-indexed ChaCha stream,
//! keyed by `(seed, sample_index)`. Streams are independent, so samples can be
//! evaluated in any order (or in parallel) and still produce identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator handed to samplers. A concrete type keeps results
/// bit-reproducible across builds of this crate.
pub type SampleRng = ChaCha8Rng;

/// Stream for one sample, derived from the run seed and the sample index.
pub fn sample_stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
