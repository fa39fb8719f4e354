//! Deterministic seed derivation.
//!
//! Every source of randomness in this crate is an explicit input. Sub-seeds
//! for repeats, restarts and sampling stages are derived from a master seed
//! with a fixed mixing function, so any run is reproducible from its config
//! alone and independent of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; bijective on u64.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// FNV-1a hash of a purpose tag.
pub fn tag(name: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derives an independent sub-seed from a master seed and a list of stream
/// components (repeat index, restart index, purpose tags, ...).
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = mix64(master);
    for &p in parts {
        state = mix64(state ^ mix64(p));
    }
    state
}

/// A deterministic RNG for the stream identified by `(master, parts)`.
pub fn stream_rng(master: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(7, &[0, tag("split")]);
        let b = derive_seed(7, &[0, tag("split")]);
        let c = derive_seed(7, &[1, tag("split")]);
        let d = derive_seed(7, &[0, tag("dataset")]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(c, d);
    }

    #[test]
    fn stream_rng_is_reproducible() {
        let mut r1 = stream_rng(42, &[3]);
        let mut r2 = stream_rng(42, &[3]);
        let x1: f64 = r1.random();
        let x2: f64 = r2.random();
        assert_eq!(x1, x2);
    }

    #[test]
    fn order_of_parts_matters() {
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
    }
}
