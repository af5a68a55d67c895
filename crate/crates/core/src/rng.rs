//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a ChaCha8 generator whose
//! seed is derived from `(master seed, stream id, index)` with the SplitMix64
//! finalizer:
//!
//! ```text
//! seed = splitmix64(splitmix64(master ^ (stream * 0x9E3779B97F4A7C15)) ^ index)
//! ```
//!
//! A stream id names one kind of draw (a dataset column, Monte Carlo demand,
//! ...) and the index selects a row or block inside it. Streams never share
//! state, so adding a column or changing the thread count cannot perturb the
//! values of another stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_TEMPERATURE: u64 = 1;
pub const STREAM_HUMIDITY: u64 = 2;
pub const STREAM_PACKAGING: u64 = 3;
pub const STREAM_ENVIRONMENT: u64 = 4;
pub const STREAM_NOISE: u64 = 5;
pub const STREAM_LEAD_TIME_DEMAND: u64 = 6;
pub const STREAM_SCENARIO: u64 = 7;
pub const STREAM_VALIDATION: u64 = 8;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ stream.wrapping_mul(GOLDEN_GAMMA)) ^ index)
}

/// Generator for element `index` of `stream` under `master`.
pub fn stream_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}
