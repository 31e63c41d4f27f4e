//! Seeded synthetic wind-like series: a daily cycle plus AR(1) noise and an
//! optional linear trend.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub len: usize,
    pub mean: f64,
    pub amplitude: f64,
    /// Samples per cycle.
    pub period: f64,
    /// AR(1) coefficient of the noise.
    pub phi: f64,
    /// Standard deviation of the AR(1) innovations.
    pub sigma: f64,
    /// Added per sample.
    pub trend: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            len: 2400,
            mean: 7.5,
            amplitude: 2.5,
            period: 24.0,
            phi: 0.8,
            sigma: 0.8,
            trend: 0.0,
            seed: 0,
        }
    }
}

pub fn generate(config: &SynthConfig) -> Result<Series> {
    if config.len == 0 {
        return Err(Error::invalid("len", "must be at least 1"));
    }
    if !(config.period > 0.0) {
        return Err(Error::invalid("period", "must be positive"));
    }
    if !(config.phi.abs() < 1.0) {
        return Err(Error::invalid(
            "phi",
            "must lie in (-1, 1) for a stationary noise",
        ));
    }
    let normal =
        Normal::new(0.0, config.sigma).map_err(|e| Error::invalid("sigma", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // start the noise from its stationary distribution
    let mut noise = normal.sample(&mut rng) / (1.0 - config.phi * config.phi).sqrt();
    let values = (0..config.len)
        .map(|t| {
            let t = t as f64;
            let cycle = (2.0 * std::f64::consts::PI * t / config.period).sin();
            let x = config.mean + config.amplitude * cycle + config.trend * t + noise;
            noise = config.phi * noise + normal.sample(&mut rng);
            x
        })
        .collect();
    Series::new(format!("synthetic-{}", config.seed), values)
}
