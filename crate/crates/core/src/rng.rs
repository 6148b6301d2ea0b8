//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a ChaCha8 generator keyed by
//! a master seed, with the ChaCha stream id selecting an independent
//! sequence. Monte-Carlo trial `i` of a run seeded with `s` always sees the
//! same numbers no matter which worker executes it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream` under `master_seed`.
pub fn stream_rng(master_seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Packs a trial index and a purpose tag into one stream id.
///
/// The low 16 bits carry the tag, so up to 2⁴⁸ trials stay disjoint.
pub fn trial_stream(trial_index: u64, tag: u16) -> u64 {
    (trial_index << 16) | tag as u64
}
