//! Variational mode decomposition.
//!
//! ADMM over the one-sided spectrum of the mirror-extended signal. Each
//! sweep Wiener-filters every mode around its current center frequency
//! (Gauss–Seidel order, modes updated in sequence), moves the center to the
//! power-weighted mean frequency of the mode, and takes a dual ascent step
//! of size `tau` on the reconstruction constraint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaInit {
    /// Every center frequency starts at 0.
    Zeros,
    /// `omega_k = 0.5 * k / K`.
    Uniform,
    /// Log-uniform between `1/N` and 0.5, sorted; seeded.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VmdConfig {
    pub modes: usize,
    /// Bandwidth penalty.
    pub alpha: f64,
    /// Dual ascent step; 0 disables the reconstruction constraint.
    pub tau: f64,
    /// Pin the first mode at zero frequency.
    pub dc: bool,
    pub init: OmegaInit,
    pub tol: f64,
    pub max_iter: usize,
    /// Only used by [`OmegaInit::Random`].
    pub seed: u64,
}

impl Default for VmdConfig {
    fn default() -> Self {
        Self {
            modes: 10,
            alpha: 5000.0,
            tau: 0.0,
            dc: false,
            init: OmegaInit::Zeros,
            tol: 1e-7,
            max_iter: 500,
            seed: 0,
        }
    }
}

impl VmdConfig {
    pub fn with_modes(modes: usize) -> Self {
        Self {
            modes,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::invalid("modes", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", "must be positive"));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau", "must be non-negative"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VmdDecomposition {
    /// Time-domain modes, ordered by ascending center frequency.
    pub modes: Vec<Vec<f64>>,
    /// Cycles per sample, in `[0, 0.5]`.
    pub center_freqs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Convergence statistic of the last sweep.
    pub final_change: f64,
    /// Input minus the mode sum.
    pub residual: Vec<f64>,
}

/// Mirrors the first and second halves around the signal: length `2N`.
pub fn mirror_extend(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let head = n.div_ceil(2);
    let mut out = Vec::with_capacity(2 * n);
    out.extend(values[..head].iter().rev());
    out.extend_from_slice(values);
    out.extend(values[head..].iter().rev());
    out
}

/// Inverse of [`mirror_extend`] on the retained segment.
pub fn truncate_mirror(extended: &[f64], n: usize) -> Vec<f64> {
    let head = n.div_ceil(2);
    extended[head..head + n].to_vec()
}

fn initial_omegas(config: &VmdConfig, n: usize) -> Vec<f64> {
    let k = config.modes;
    let mut omega: Vec<f64> = match config.init {
        OmegaInit::Zeros => vec![0.0; k],
        OmegaInit::Uniform => (0..k).map(|i| 0.5 * i as f64 / k as f64).collect(),
        OmegaInit::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let fs = 1.0 / n as f64;
            let mut w: Vec<f64> = (0..k)
                .map(|_| (fs.ln() + (0.5f64.ln() - fs.ln()) * rng.random::<f64>()).exp())
                .collect();
            w.sort_by(f64::total_cmp);
            w
        }
    };
    if config.dc {
        omega[0] = 0.0;
    }
    omega
}

fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum()
}

pub fn vmd_decompose(values: &[f64], config: &VmdConfig) -> Result<VmdDecomposition> {
    config.validate()?;
    let n = values.len();
    let k_modes = config.modes;
    let required = 8.max(2 * k_modes);
    if n < required {
        return Err(Error::too_short("vmd input", required, n));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("vmd input"));
    }

    let extended = mirror_extend(values);
    let t = extended.len();
    let half = t / 2 + 1;
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(t);
    let inverse = planner.plan_fft_inverse(t);

    let mut spectrum: Vec<Complex64> = extended.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut spectrum);
    let f_hat = &spectrum[..half];
    let freqs: Vec<f64> = (0..half).map(|j| j as f64 / t as f64).collect();

    let mut omega = initial_omegas(config, n);
    let mut u_hat = vec![vec![Complex64::new(0.0, 0.0); half]; k_modes];
    let mut lambda = vec![Complex64::new(0.0, 0.0); half];
    let mut sum = vec![Complex64::new(0.0, 0.0); half];
    let two_alpha = 2.0 * config.alpha;

    let mut iterations = 0;
    let mut converged = false;
    let mut change = f64::INFINITY;
    while iterations < config.max_iter {
        iterations += 1;
        change = 0.0;
        for k in 0..k_modes {
            let previous = std::mem::take(&mut u_hat[k]);
            let mut updated = Vec::with_capacity(half);
            for j in 0..half {
                let others = sum[j] - previous[j];
                let filter = 1.0 + two_alpha * (freqs[j] - omega[k]).powi(2);
                let value = (f_hat[j] - others + lambda[j] * 0.5) / filter;
                sum[j] = others + value;
                updated.push(value);
            }
            if !(config.dc && k == 0) {
                let power: f64 = energy(&updated);
                if power > 0.0 {
                    let weighted: f64 = updated
                        .iter()
                        .zip(&freqs)
                        .map(|(u, w)| w * u.norm_sqr())
                        .sum();
                    omega[k] = weighted / power;
                }
            }
            let delta: f64 = updated
                .iter()
                .zip(&previous)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            if delta > 0.0 {
                change += delta / energy(&previous);
            }
            u_hat[k] = updated;
        }
        if config.tau > 0.0 {
            for j in 0..half {
                lambda[j] += (f_hat[j] - sum[j]) * config.tau;
            }
        }
        if change.is_nan() || omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::non_finite("vmd update"));
        }
        if u_hat
            .iter()
            .flatten()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::non_finite("vmd mode spectrum"));
        }
        if change < config.tol {
            converged = true;
            break;
        }
    }

    let mut modes: Vec<(f64, Vec<f64>)> = u_hat
        .iter()
        .zip(&omega)
        .map(|(u, &w)| {
            let mut full = vec![Complex64::new(0.0, 0.0); t];
            full[..half].copy_from_slice(u);
            for j in 1..(t - half + 1) {
                full[t - j] = u[j].conj();
            }
            inverse.process(&mut full);
            let time: Vec<f64> = full.iter().map(|c| c.re / t as f64).collect();
            (w, truncate_mirror(&time, n))
        })
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let center_freqs: Vec<f64> = modes.iter().map(|m| m.0).collect();
    let modes: Vec<Vec<f64>> = modes.into_iter().map(|m| m.1).collect();
    let residual = values
        .iter()
        .enumerate()
        .map(|(i, v)| v - modes.iter().map(|m| m[i]).sum::<f64>())
        .collect();

    Ok(VmdDecomposition {
        modes,
        center_freqs,
        iterations,
        converged,
        final_change: change,
        residual,
    })
}

/// Element-wise sum of the modes.
pub fn vmd_reconstruct(decomp: &VmdDecomposition) -> Vec<f64> {
    let n = decomp.residual.len();
    (0..n)
        .map(|i| decomp.modes.iter().map(|m| m[i]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_series_is_a_fixed_point() {
        let d = vmd_decompose(&[0.0; 64], &VmdConfig::with_modes(3)).unwrap();
        assert!(d.converged);
        assert_eq!(d.iterations, 1);
        assert!(d.modes.iter().flatten().all(|&v| v == 0.0));
        assert!(vmd_reconstruct(&d).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mirror_round_trip() {
        for n in [8, 9, 31, 64] {
            let x: Vec<f64> = (0..n).map(|i| (i * i) as f64).collect();
            let ext = mirror_extend(&x);
            assert_eq!(ext.len(), 2 * n);
            assert_eq!(truncate_mirror(&ext, n), x);
        }
    }

    #[test]
    fn rejects_short_input() {
        assert!(matches!(
            vmd_decompose(&[1.0; 7], &VmdConfig::with_modes(1)),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(
            vmd_decompose(&[1.0; 10], &VmdConfig::with_modes(6)),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn dc_mode_stays_at_zero() {
        let x: Vec<f64> = (0..128)
            .map(|t| 1.0 + (2.0 * PI * 0.1 * t as f64).cos())
            .collect();
        let cfg = VmdConfig {
            modes: 2,
            dc: true,
            init: OmegaInit::Uniform,
            alpha: 2000.0,
            ..VmdConfig::default()
        };
        let d = vmd_decompose(&x, &cfg).unwrap();
        assert_eq!(d.center_freqs[0], 0.0);
        assert!((d.center_freqs[1] - 0.1).abs() < 0.01);
    }

    #[test]
    fn residual_is_input_minus_sum() {
        let x: Vec<f64> = (0..100)
            .map(|t| (t as f64 * 0.3).sin() + 0.2 * (t as f64 * 1.9).cos())
            .collect();
        let d = vmd_decompose(
            &x,
            &VmdConfig {
                modes: 3,
                ..VmdConfig::default()
            },
        )
        .unwrap();
        let sum = vmd_reconstruct(&d);
        for i in 0..x.len() {
            assert_eq!(d.residual[i], x[i] - sum[i]);
        }
        assert!(d.center_freqs.windows(2).all(|w| w[0] <= w[1]));
        assert!(d.center_freqs.iter().all(|&w| (0.0..=0.5).contains(&w)));
    }
}
