//! Reproducible random streams.
//!
//! Samples are generated in fixed-length blocks; block `b` draws from ChaCha8
//! stream `b` keyed by the run seed. The mapping from sample index to random
//! numbers therefore never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of samples drawn from one stream.
pub const BLOCK_LEN: usize = 8192;

/// Generator for one block of a run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of streams needed for `count` samples.
pub fn stream_count(count: usize) -> usize {
    count.div_ceil(BLOCK_LEN)
}

/// Index range covered by `stream` in a run of `count` samples.
pub fn block_range(stream: usize, count: usize) -> std::ops::Range<usize> {
    let lo = stream * BLOCK_LEN;
    lo..(lo + BLOCK_LEN).min(count)
}
