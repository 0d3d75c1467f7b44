//! Deterministic substream derivation for reproducible parallel simulation.
//!
//! Every random draw in the crate comes from a generator derived from a
//! master seed plus an integer path (for example `[trial]` or
//! `[block, lane]`). Distinct paths map to statistically independent
//! streams, so trials can run on any number of worker threads, in any
//! order, and still reproduce the single-threaded results bit for bit.
//!
//! The state is passed through a full avalanche mix after every absorbed
//! element. Mixing only between elements (or not at all) leaves the state
//! linear in the inputs, and nearby (master, path) combinations such as
//! `(seed, [n])` and `(seed + 1, [n - 1])` then collide.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer: bijective with full avalanche.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, v: u64) -> u64 {
    mix(h ^ v.wrapping_add(0x9e37_79b9_7f4a_7c15))
}

fn digest(master: u64, path: &[u64]) -> u64 {
    let mut h = mix(master ^ 0x6c62_272e_07bb_0142);
    for &p in path {
        h = absorb(h, p);
    }
    absorb(h, path.len() as u64)
}

/// Derives an independent generator for `path` under `master`.
pub fn substream(master: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = digest(master, path);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        chunk.copy_from_slice(&mix(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Collapses a path to a single derived seed, for handing a nested
/// component its own master.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    digest(master, path)
}
