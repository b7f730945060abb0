//! Deterministic, splittable random streams.
//!
//! Every stream is a ChaCha8 generator whose 256-bit key is expanded with
//! SplitMix64 from `(master seed, FNV-1a hash of the stream label, counter)`.
//! The derivation is fixed, so a given triple yields the same stream on every
//! platform and run, and distinct labels or counters give independent
//! streams for parallel workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator type used throughout the crate.
pub type StreamRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Derives a 64-bit sub-seed; useful for recording per-trial seeds.
pub fn derive_seed(seed: u64, label: &str, counter: u64) -> u64 {
    let mut state = seed ^ fnv1a(label).rotate_left(17) ^ counter.wrapping_mul(0xd6e8_feb8_6659_fd93);
    splitmix64(&mut state);
    splitmix64(&mut state)
}

/// The random stream keyed by `(seed, label, counter)`.
pub fn stream(seed: u64, label: &str, counter: u64) -> StreamRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    let words = [
        splitmix64(&mut state) ^ fnv1a(label),
        splitmix64(&mut state) ^ counter,
        splitmix64(&mut state),
        splitmix64(&mut state),
    ];
    // second mixing pass so label and counter diffuse into every word
    let mut mix = words[0] ^ words[1].rotate_left(32);
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        let v = w ^ splitmix64(&mut mix);
        chunk.copy_from_slice(&v.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
