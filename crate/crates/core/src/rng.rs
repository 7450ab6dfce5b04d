//! Seeded random streams.
//!
//! Every stochastic ingredient (exponential integration times, Bernoulli
//! refresh decisions, Gaussian problem data) draws from a [`RandomSource`]:
//! a ChaCha8 generator keyed by a 64-bit seed and a 64-bit stream id. The
//! keystream is fully specified, so identical `(seed, stream_id)` pairs give
//! identical sequences on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};

#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, seed, stream_id }
    }

    /// Source for one run of one algorithm inside an experiment.
    ///
    /// The stream id is a hash of `(seed, label, index)`, so parallel runs
    /// never share generator state.
    pub fn for_run(seed: u64, label: &str, index: u64) -> Self {
        Self::new(seed, derive_stream_id(seed, label, index))
    }

    /// Independent child source on a derived stream.
    pub fn split(&self, label: &str, index: u64) -> Self {
        let parent = derive_stream_id(self.seed, label, index) ^ self.stream_id.rotate_left(17);
        Self::new(self.seed, parent)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on the open interval `(0, 1)`; never returns an endpoint.
    fn open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Exponential variate with the given rate, by inverse CDF.
    pub fn exponential(&mut self, rate: f64) -> Result<f64> {
        check_rate(rate)?;
        Ok(exponential_from_uniform(self.open_unit(), rate))
    }

    pub fn bernoulli(&mut self, p: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", format!("probability must lie in [0, 1], got {p}")));
        }
        Ok(self.uniform() < p)
    }

    pub fn normal_vector(&mut self, d: usize) -> crate::Vector {
        crate::Vector::from_fn(d, |_, _| self.standard_normal())
    }
}

/// Inverse-CDF map `u ↦ −ln(u)/rate` for `u ∈ (0, 1]`.
pub fn exponential_from_uniform(u: f64, rate: f64) -> f64 {
    -u.ln() / rate
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(invalid("rate", format!("must be positive and finite, got {rate}")))
    }
}

/// Stable 64-bit stream id for `(seed, label, index)`.
pub fn derive_stream_id(seed: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_identity() {
        let x = exponential_from_uniform((-1.0f64).exp(), 2.0);
        assert!((x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_rate_and_probability() {
        let mut src = RandomSource::new(1, 0);
        assert!(src.exponential(0.0).is_err());
        assert!(src.exponential(-1.0).is_err());
        assert!(src.exponential(f64::NAN).is_err());
        assert!(src.bernoulli(1.5).is_err());
        assert!(src.bernoulli(-0.1).is_err());
    }

    #[test]
    fn forced_bernoulli() {
        let mut src = RandomSource::new(3, 9);
        for _ in 0..10_000 {
            assert!(src.bernoulli(1.0).unwrap());
            assert!(!src.bernoulli(0.0).unwrap());
        }
    }

    #[test]
    fn exponential_is_strictly_positive() {
        let mut src = RandomSource::new(5, 5);
        for _ in 0..100_000 {
            let x = src.exponential(3.0).unwrap();
            assert!(x > 0.0 && x.is_finite());
        }
    }

    #[test]
    fn exponential_mean_matches_rate() {
        let gamma = 2.5;
        let mut src = RandomSource::new(11, 0);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| src.exponential(gamma).unwrap()).sum::<f64>() / n as f64;
        assert!((mean * gamma - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn normal_moments() {
        let mut src = RandomSource::new(12, 1);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| src.standard_normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn cosine_moment_of_exponential_time() {
        // E[cos²(√σ τ)] = 1 − 2σ/(γ² + 4σ) for τ ~ Exp(γ).
        let (sigma, gamma): (f64, f64) = (1.0, 2.0);
        let mut src = RandomSource::new(13, 2);
        let n = 1_000_000;
        let est = (0..n)
            .map(|_| (sigma.sqrt() * src.exponential(gamma).unwrap()).cos().powi(2))
            .sum::<f64>()
            / n as f64;
        let exact = 1.0 - 2.0 * sigma / (gamma * gamma + 4.0 * sigma);
        assert!((est / exact - 1.0).abs() < 0.01, "{est} vs {exact}");
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::for_run(42, "rhgd", 3);
        let mut b = RandomSource::for_run(42, "rhgd", 3);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            assert_eq!(a.standard_normal().to_bits(), b.standard_normal().to_bits());
        }
    }

    #[test]
    fn streams_are_uncorrelated() {
        let mut a = RandomSource::for_run(42, "rhgd", 0);
        let mut b = RandomSource::for_run(42, "rhgd", 1);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..n).map(|_| b.uniform()).collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() < 0.01, "correlation {corr}");
    }

    #[test]
    fn stream_ids_differ_by_label_and_index() {
        let base = derive_stream_id(1, "gd", 0);
        assert_ne!(base, derive_stream_id(1, "gd", 1));
        assert_ne!(base, derive_stream_id(1, "agd", 0));
        assert_ne!(base, derive_stream_id(2, "gd", 0));
    }
}
