//! Seedable, splittable random streams.
//!
//! Every stochastic routine takes its stream explicitly. Independent
//! streams are ChaCha8 instances sharing the master seed and differing in
//! their 64-bit stream id, so replication `k` draws the same numbers no
//! matter which thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(master_seed: u64, stream_id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    rng
}

/// Packs a small tuple of indices into a stream id.
pub fn stream_id(parts: &[u64]) -> u64 {
    // splitmix64 finalizer over a running combination
    parts.iter().fold(0x9e37_79b9_7f4a_7c15u64, |acc, &p| {
        let mut z = acc ^ p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(acc << 6);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}
