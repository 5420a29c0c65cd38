//! Seeded randomness.
//!
//! All sampling draws from xoshiro256** seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256StarStar::seed_from_u64`). Both algorithms are
//! fixed-width integer arithmetic, so a seed yields the same stream on every
//! platform. Bounded integers go through `rand`'s portable `usize` sampler.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub type SeededRng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base` one word at a time:
/// `h <- splitmix64(h ^ part)`, starting from `h = splitmix64(base)`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn stream_is_stable() {
        // Reference xoshiro256** outputs for a SplitMix64-expanded seed of 42,
        // computed outside Rust from the published algorithms.
        let mut rng = seeded(42);
        let first: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        assert_eq!(
            first,
            [0x1578_0B2E_0C2E_C716, 0x6104_D986_6D11_3A7E, 0xAE17_5332_39E4_99A1]
        );
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn derived_seeds_differ_per_part() {
        let a = derive_seed(1, &[0, 1, 2]);
        let b = derive_seed(1, &[0, 2, 1]);
        let c = derive_seed(2, &[0, 1, 2]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[0, 1, 2]));
    }
}
