//! Deterministic random streams.
//!
//! All randomness in this crate flows through ChaCha12 (`rand_chacha` 0.3.x,
//! `ChaCha12Rng`), a named and versioned generator whose output is
//! bit-identical across platforms. A run is reproduced by its master seed
//! alone.
//!
//! Independent substreams (noise per instance, k-means restarts, permutation
//! replicates, benchmark cells) come from ChaCha's 64-bit stream field: every
//! consumer derives its stream id from a domain tag plus its indices, so no
//! two consumers share a stream and none depends on evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Noise draws for simulated instances; ids = [NOISE, instance].
pub const NOISE: u64 = 1;
/// K-means restart seeding; ids = [RESTART, outer_iteration, restart].
pub const RESTART: u64 = 2;
/// Column permutations in gap selection; ids = [PERMUTE, grid_index, replicate].
pub const PERMUTE: u64 = 3;
/// Benchmark cells; ids = [CELL, cell_index, replicate].
pub const CELL: u64 = 4;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha12 generator keyed by `seed` on the substream identified by `ids`.
///
/// The id list is folded through SplitMix64 into the stream field, so
/// distinct id lists yield independent streams under one key.
pub fn stream(seed: u64, ids: &[u64]) -> ChaCha12Rng {
    let mut s = 0;
    for &id in ids {
        s = splitmix64(s ^ id);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(s);
    rng
}
