//! Seeded stream derivation.
//!
//! One master seed fans out into independent named streams so that adding a
//! stream (or consuming more numbers from one) never perturbs any other.
//! The splitting rule, fixed for reproducibility:
//!
//! 1. `h = fnv1a64(label)` over the label's UTF-8 bytes,
//! 2. `s0 = master ^ h ^ (index * 0x9E3779B97F4A7C15)` (wrapping),
//! 3. four successive SplitMix64 outputs from state `s0` form the 32-byte
//!    ChaCha8 key.
//!
//! Everything here is integer arithmetic, identical on every platform.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a 64-bit sub-seed for `(label, index)` under `master`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut state = master ^ fnv1a64(label.as_bytes()) ^ index.wrapping_mul(GOLDEN);
    splitmix64(&mut state)
}

/// Derive an independent ChaCha8 stream for `(label, index)` under `master`.
pub fn derive_stream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut state = master ^ fnv1a64(label.as_bytes()) ^ index.wrapping_mul(GOLDEN);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Draw from a Bernoulli(p) using one 53-bit uniform.
///
/// Kept as a free function so every Bernoulli event in the simulator uses
/// the exact same draw convention.
pub fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    use rand::Rng;
    rng.random::<f64>() < p
}
