//! Seed derivation. Every random quantity is drawn from a ChaCha8 stream
//! selected by `(seed, tag, index)`, so results do not depend on how work
//! is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Named substreams. The numeric values are part of the reproducibility
/// contract and must not be renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Dataset = 1,
    Weights = 2,
    Latents = 3,
    Chain = 4,
    Probes = 5,
    PriorDraws = 6,
    GpDraws = 7,
    Permutation = 8,
    Rotation = 9,
    Oracle = 10,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, stream, index)`.
pub fn substream(seed: u64, stream: Stream, index: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(splitmix(seed ^ splitmix(stream as u64)));
    rng.set_stream(index);
    rng
}

/// Derive a child seed, for handing a whole experiment a fresh seed space.
pub fn child_seed(seed: u64, stream: Stream, index: u64) -> u64 {
    splitmix(splitmix(seed ^ (stream as u64).rotate_left(32)) ^ index)
}
