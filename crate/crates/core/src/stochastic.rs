//! Seeded random streams and the distribution functions called by the model.
//!
//! Every stream is a ChaCha8 generator. Seeds for child streams are derived
//! with a SplitMix64 finalizer over `(parent seed, index)`, so a sweep can hand
//! out independent streams by index and replay any single replication.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::StochasticError;

/// A reproducible random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `index` from `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fresh stream seeded from `(self.seed, index)`. Does not advance `self`.
    pub fn child(&self, index: u64) -> RngStream {
        RngStream::new(derive_seed(self.seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform index in `0..len`. `len` must be non-zero.
    pub fn pick(&mut self, len: usize) -> usize {
        debug_assert!(len > 0);
        self.rng.gen_range(0..len)
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn discrete(&mut self, lo: i64, hi: i64) -> Result<i64, StochasticError> {
        if lo > hi {
            return Err(StochasticError::EmptyInterval { lo, hi });
        }
        Ok(self.rng.gen_range(lo..=hi))
    }

    /// Normal(mean, variance) rounded to the nearest integer and clamped at 0.
    pub fn rn_normal_int(&mut self, mean: f64, variance: f64) -> Result<i64, StochasticError> {
        if variance < 0.0 || !variance.is_finite() || !mean.is_finite() {
            return Err(StochasticError::BadVariance(variance));
        }
        if variance == 0.0 {
            return Ok(round_nonneg(mean));
        }
        let normal = Normal::new(mean, variance.sqrt()).map_err(|_| StochasticError::BadVariance(variance))?;
        Ok(round_nonneg(normal.sample(&mut self.rng)))
    }

    /// Same contract as [`RngStream::rn_normal_int`]; the model's per-tile
    /// complexity function calls it with real-valued parameters.
    pub fn rn_normal_int_real(&mut self, mean: f64, variance: f64) -> Result<i64, StochasticError> {
        self.rn_normal_int(mean, variance)
    }

    /// Exponential with the given mean, rounded to the nearest integer.
    pub fn rn_exponential_int(&mut self, mean: f64) -> Result<i64, StochasticError> {
        if mean <= 0.0 || !mean.is_finite() {
            return Err(StochasticError::BadMean(mean));
        }
        let exp = Exp::new(1.0 / mean).map_err(|_| StochasticError::BadMean(mean))?;
        Ok(round_nonneg(exp.sample(&mut self.rng)))
    }

    pub fn bernoulli(&mut self, p: f64) -> Result<bool, StochasticError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(StochasticError::BadProbability(p));
        }
        Ok(self.rng.gen_bool(p))
    }
}

fn round_nonneg(x: f64) -> i64 {
    let r = x.round();
    if r <= 0.0 {
        0
    } else {
        r as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 100_000;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn variance(xs: &[f64]) -> f64 {
        let m = mean(xs);
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(7);
        let mut b = RngStream::new(7);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut a = RngStream::new(7);
        let mut b = RngStream::new(7);
        for _ in 0..100 {
            assert_eq!(a.rn_normal_int(100.0, 50.0).unwrap(), b.rn_normal_int(100.0, 50.0).unwrap());
            assert_eq!(a.rn_exponential_int(30.0).unwrap(), b.rn_exponential_int(30.0).unwrap());
        }
    }

    #[test]
    fn children_differ() {
        let root = RngStream::new(1);
        let mut c0 = root.child(0);
        let mut c1 = root.child(1);
        let a: Vec<u64> = (0..8).map(|_| c0.next_u64()).collect();
        let b: Vec<u64> = (0..8).map(|_| c1.next_u64()).collect();
        assert_ne!(a, b);
        assert_eq!(root.child(3).seed(), root.child(3).seed());
    }

    #[test]
    fn discrete_bounds_and_degenerate() {
        let mut rng = RngStream::new(11);
        for _ in 0..10_000 {
            let v = rng.discrete(10_000, 70_000).unwrap();
            assert!((10_000..=70_000).contains(&v));
        }
        assert_eq!(rng.discrete(5, 5).unwrap(), 5);
        assert!(matches!(rng.discrete(6, 5), Err(StochasticError::EmptyInterval { .. })));
    }

    #[test]
    fn discrete_fair_coin() {
        let mut rng = RngStream::new(12);
        let ones = (0..N).filter(|_| rng.discrete(0, 1).unwrap() == 1).count();
        let f1 = ones as f64 / N as f64;
        assert!((0.48..=0.52).contains(&f1), "{f1}");
        assert!((0.48..=0.52).contains(&(1.0 - f1)));
    }

    #[test]
    fn normal_point_mass_and_clamp() {
        let mut rng = RngStream::new(13);
        assert_eq!(rng.rn_normal_int(20_000.0, 0.0).unwrap(), 20_000);
        assert_eq!(rng.rn_normal_int_real(0.0, 0.0).unwrap(), 0);
        for _ in 0..N {
            assert!(rng.rn_normal_int(0.0, 10_000.0).unwrap() >= 0);
            assert!(rng.rn_normal_int_real(100.0, 70.0).unwrap() >= 0);
        }
        assert!(rng.rn_normal_int(1.0, -1.0).is_err());
    }

    #[test]
    fn normal_sample_means() {
        let mut rng = RngStream::new(14);
        let xs: Vec<f64> = (0..N).map(|_| rng.rn_normal_int(20_000.0, 10_000.0).unwrap() as f64).collect();
        assert!((mean(&xs) - 20_000.0).abs() <= 200.0);
        let ys: Vec<f64> = (0..N).map(|_| rng.rn_normal_int_real(800.0, 700.0).unwrap() as f64).collect();
        assert!((mean(&ys) - 800.0).abs() <= 16.0);
    }

    #[test]
    fn exponential_moments() {
        let mut rng = RngStream::new(15);
        let xs: Vec<f64> = (0..N).map(|_| rng.rn_exponential_int(500.0).unwrap() as f64).collect();
        assert!(xs.iter().all(|&x| x >= 0.0));
        assert!((mean(&xs) - 500.0).abs() <= 10.0, "{}", mean(&xs));
        assert!((variance(&xs) - 250_000.0).abs() <= 25_000.0, "{}", variance(&xs));
        assert!(rng.rn_exponential_int(0.0).is_err());
        assert!(rng.rn_exponential_int(-3.0).is_err());
    }

    #[test]
    fn bernoulli_edges_and_frequency() {
        let mut rng = RngStream::new(16);
        assert!(rng.bernoulli(1.0).unwrap());
        assert!(!rng.bernoulli(0.0).unwrap());
        let hits = (0..N).filter(|_| rng.bernoulli(0.9).unwrap()).count();
        let f = hits as f64 / N as f64;
        assert!((0.89..=0.91).contains(&f), "{f}");
        assert!(rng.bernoulli(1.5).is_err());
        assert!(rng.bernoulli(-0.1).is_err());
    }
}
