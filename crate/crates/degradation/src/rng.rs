//! Deterministic seed derivation.
//!
//! Every random stream in the pipeline is derived functionally from a master
//! seed, a domain string, and an index, so any sample can be regenerated in
//! isolation (parallel workers, training resume, manifest replay) without
//! threading mutable RNG state around.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Mix `(seed, domain, index)` into a single derived seed.
pub fn derive_seed(seed: u64, domain: &str, index: u64) -> u64 {
    let mut state = seed ^ fnv1a64(domain.as_bytes());
    let a = splitmix64(&mut state);
    let mut state = a ^ index;
    splitmix64(&mut state)
}

/// Seeded ChaCha stream for `(seed, domain, index)`. ChaCha keystreams are
/// stable across platforms, so derived randomness is fully reproducible.
pub fn derive_rng(seed: u64, domain: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, domain, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_domain_separated() {
        assert_eq!(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
    }
}
