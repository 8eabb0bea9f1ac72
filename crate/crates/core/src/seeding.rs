//! Project-wide deterministic randomness.
//!
//! Every stochastic operation in the crate takes an explicit 64-bit seed and
//! draws from a single named generator (ChaCha8), so results are
//! bit-reproducible across runs and platforms. Sub-streams (per restart, per
//! trial, per method) are derived with a SplitMix64 chain over the base seed
//! and a list of tag words.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the generator, recorded in provenance metadata.
pub const GENERATOR_NAME: &str = "chacha8";

/// The fixed project-wide RNG.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a sequence of tag words.
///
/// The chain is order-sensitive: `derive_seed(s, &[a, b])` differs from
/// `derive_seed(s, &[b, a])`.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &t in tags {
        state = splitmix64(state ^ t);
    }
    state
}

/// Stable 64-bit FNV-1a hash of a string tag.
pub fn tag(label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn rng_is_reproducible() {
        let a: Vec<f64> = rng_from_seed(7).random_iter().take(8).collect();
        let b: Vec<f64> = rng_from_seed(7).random_iter().take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn derived_seeds_are_order_sensitive() {
        let s = derive_seed(1, &[tag("x"), 4]);
        let t = derive_seed(1, &[4, tag("x")]);
        assert_ne!(s, t);
        assert_eq!(s, derive_seed(1, &[tag("x"), 4]));
    }

    #[test]
    fn tags_distinguish_labels() {
        assert_ne!(tag("restart"), tag("target"));
    }
}
