use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

/// White-noise source: ⟨F(t)F(t')⟩ = 2ε·δ(t − t').
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, seed: u64, stream_id: u64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return precondition("epsilon must be finite and >= 0");
        }
        Ok(NoiseSpec { epsilon, seed, stream_id })
    }

    pub fn with_stream(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    /// Increment generator for steps of length `dt`.
    pub fn stream(&self, dt: f64) -> Result<NoiseStream> {
        if !(dt > 0.0) {
            return precondition("dt must be positive");
        }
        Ok(NoiseStream::new(self, dt))
    }
}

/// ChaCha8 keystream keyed by `seed`, nonce `stream_id`; normals by ziggurat.
/// The sequence depends only on (seed, stream_id), never on scheduling.
pub struct NoiseStream {
    rng: ChaCha8Rng,
    scale: f64,
}

impl NoiseStream {
    fn new(spec: &NoiseSpec, dt: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(spec.stream_id);
        NoiseStream { rng, scale: (2.0 * spec.epsilon * dt).sqrt() }
    }

    #[inline(always)]
    pub fn next_increment(&mut self) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let z: f64 = self.rng.sample(StandardNormal);
        self.scale * z
    }
}

/// `count` increments of ∫F dt over steps `dt`: mean 0, variance 2ε·dt.
pub fn noise_increments(spec: &NoiseSpec, dt: f64, count: usize) -> Result<Vec<f64>> {
    let mut s = spec.stream(dt)?;
    Ok((0..count).map(|_| s.next_increment()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_epsilon_is_silent() {
        let v = noise_increments(&NoiseSpec::new(0.0, 1, 2).unwrap(), 0.1, 100).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn variance() {
        let v = noise_increments(&NoiseSpec::new(0.5, 11, 0).unwrap(), 0.01, 1_000_000).unwrap();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 0.01 - 1.0).abs() < 0.01, "{var}");
        assert!(mean.abs() < 5.0 * (0.01f64 / n).sqrt());
    }

    #[test]
    fn deterministic_per_stream() {
        let s = NoiseSpec::new(1.0, 7, 3).unwrap();
        let a = noise_increments(&s, 0.1, 1000).unwrap();
        let b = noise_increments(&s, 0.1, 1000).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = noise_increments(&s.with_stream(4), 0.1, 1000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(NoiseSpec::new(-1.0, 0, 0).is_err());
        assert!(noise_increments(&NoiseSpec::new(1.0, 0, 0).unwrap(), 0.0, 3).is_err());
    }
}
