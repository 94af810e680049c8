use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of a source seeded with `parent`.
///
/// `child = mix(parent ^ mix(index + gamma))`. Children of one parent are
/// pairwise distinct streams and do not depend on how far the parent has
/// been consumed.
pub fn split_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Seeded, platform-independent pseudo-random source.
///
/// A source is owned by one thread at a time. Parallel work derives child
/// sources with [`RandomSource::split`], which is a pure function of the
/// seed and the child index.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u32) -> u32 {
        self.rng.gen_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Child stream `index`; does not advance `self`.
    pub fn split(&self, index: u64) -> RandomSource {
        RandomSource::new(split_seed(self.seed, index))
    }

    /// Fresh source seeded from the next output of `self`.
    pub fn fork(&mut self) -> RandomSource {
        let seed = self.next_u64();
        RandomSource::new(seed)
    }
}

/// Returns 0 with probability `p` and 1 with probability `1 - p`, using
/// exactly one uniform draw.
pub fn toss_coin(src: &mut RandomSource, p: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("coin probability {p} outside [0, 1]")));
    }
    Ok(if src.uniform() < p { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut src = RandomSource::new(1);
        for _ in 0..100_000 {
            let u = src.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn split_is_pure_and_distinct() {
        let mut parent = RandomSource::new(9);
        let before = parent.split(3).next_u64();
        parent.next_u64();
        assert_eq!(parent.split(3).next_u64(), before);
        assert_ne!(parent.split(4).seed(), parent.split(3).seed());
        assert_ne!(split_seed(0, 0), split_seed(1, 0));
    }

    #[test]
    fn coin_extremes() {
        let mut src = RandomSource::new(5);
        for _ in 0..1000 {
            assert_eq!(toss_coin(&mut src, 1.0).unwrap(), 0);
            assert_eq!(toss_coin(&mut src, 0.0).unwrap(), 1);
        }
    }

    #[test]
    fn coin_rejects_bad_probability() {
        let mut src = RandomSource::new(5);
        assert!(matches!(toss_coin(&mut src, 1.5), Err(Error::Domain(_))));
        assert!(matches!(toss_coin(&mut src, -0.1), Err(Error::Domain(_))));
        assert!(toss_coin(&mut src, f64::NAN).is_err());
    }

    #[test]
    fn fair_coin_frequency() {
        // 6 sigma for 1e5 fair tosses is 6 * 0.5 / sqrt(1e5) ~ 0.0095
        let mut src = RandomSource::new(2024);
        let zeros = (0..100_000)
            .filter(|_| toss_coin(&mut src, 0.5).unwrap() == 0)
            .count();
        let freq = zeros as f64 / 100_000.0;
        assert!((freq - 0.5).abs() <= 0.01, "{freq}");
    }

    #[test]
    fn coin_consumes_one_draw() {
        let mut a = RandomSource::new(77);
        let mut b = RandomSource::new(77);
        toss_coin(&mut a, 0.3).unwrap();
        b.uniform();
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
