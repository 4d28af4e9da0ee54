//! Reproducible randomness.
//!
//! Every random draw in the crate goes through [`TrialRng`], a ChaCha8 stream
//! cipher generator (`rand_chacha` 0.9). Seeds for independent sub-streams are
//! derived with SplitMix64 mixing, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable hash of a base seed and a path of indices.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(1, &[0, 0]);
        assert_eq!(a, derive_seed(1, &[0, 0]));
        assert_ne!(a, derive_seed(1, &[0, 1]));
        assert_ne!(a, derive_seed(1, &[1, 0]));
        assert_ne!(a, derive_seed(2, &[0, 0]));
    }

    #[test]
    fn generator_is_reproducible() {
        let x: Vec<u64> = (0..4).map(|_| rng_from_seed(9).random()).collect();
        let mut r = rng_from_seed(9);
        let y: u64 = r.random();
        assert_eq!(x[0], y);
    }
}
