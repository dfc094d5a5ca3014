use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{GeomError, Result};
use crate::kernel::linalg::{norm, scaled};
use crate::scalar::Scalar;

/// Seeded, explicitly threaded source of randomness.
///
/// Identical `(seed, algorithm)` pairs produce identical streams. Forks derive
/// a new seed so that independent components never share a stream.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub const ALGORITHM: &'static str = "chacha20";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        Self::ALGORITHM
    }

    /// Independent source for a sub-component: `seed XOR salt`, mixed.
    pub fn fork(&self, salt: u64) -> Self {
        Self::new(splitmix(self.seed ^ salt))
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        Uniform::new(lo, hi).expect("valid range").sample(&mut self.rng)
    }

    pub fn below(&mut self, n: usize) -> usize {
        Uniform::new(0, n).expect("non-empty range").sample(&mut self.rng)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform sample from the unit sphere S^{n-1} (normalised Gaussian).
pub fn sample_unit_sphere<T: Scalar>(n: usize, rng: &mut RandomSource) -> Result<Vec<T>> {
    if n == 0 {
        return Err(GeomError::InvalidInput("sphere dimension must be >= 1".into()));
    }
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let r = norm(&g);
        if r > 1e-100 {
            return Ok(scaled(&g, 1.0 / r).into_iter().map(T::lit).collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_is_a_fair_coin() {
        let mut rng = RandomSource::new(11);
        let draws = 10_000;
        let plus = (0..draws)
            .filter(|_| sample_unit_sphere::<f64>(1, &mut rng).unwrap()[0] > 0.0)
            .count() as f64;
        let e = draws as f64 / 2.0;
        let chi2 = 2.0 * (plus - e).powi(2) / e;
        // 1% critical value, one degree of freedom
        assert!(chi2 < 6.635, "chi2 = {chi2}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a: Vec<f64> = sample_unit_sphere(3, &mut RandomSource::new(5)).unwrap();
        let b: Vec<f64> = sample_unit_sphere(3, &mut RandomSource::new(5)).unwrap();
        assert_eq!(a, b);
        let c: Vec<f64> = sample_unit_sphere(3, &mut RandomSource::new(5).fork(1)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn coordinate_means_vanish() {
        let mut rng = RandomSource::new(3);
        let mut sum = [0.0f64; 4];
        let draws = 100_000;
        for _ in 0..draws {
            let x: Vec<f64> = sample_unit_sphere(4, &mut rng).unwrap();
            assert!((norm(&x) - 1.0).abs() <= 1e-12);
            for i in 0..4 {
                sum[i] += x[i];
            }
        }
        for s in sum {
            assert!((s / draws as f64).abs() < 0.01);
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(sample_unit_sphere::<f64>(0, &mut RandomSource::new(0)).is_err());
    }
}
