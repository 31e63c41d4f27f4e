//! Phase-space reconstruction: delay selection by average mutual
//! information, embedding dimension by Cao's false-neighbor statistic, and
//! the local-mean nearest-neighbor predictor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances are floored at this fraction of the series range.
const DISTANCE_FLOOR: f64 = 1e-12;

/// Delay `tau` and dimension `d` of a delay-coordinate embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub delay: usize,
    pub dimension: usize,
}

impl Default for EmbeddingSpec {
    fn default() -> Self {
        Self {
            delay: 1,
            dimension: 60,
        }
    }
}

impl EmbeddingSpec {
    pub fn new(dimension: usize, delay: usize) -> Self {
        Self { delay, dimension }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delay == 0 {
            return Err(Error::invalid("delay", "must be at least 1"));
        }
        if self.dimension == 0 {
            return Err(Error::invalid("dimension", "must be at least 1"));
        }
        Ok(())
    }

    /// Distance from the first coordinate of a vector to its successor value.
    pub fn span(&self) -> usize {
        (self.dimension - 1) * self.delay + 1
    }

    /// The embedded vector starting at `start`.
    pub fn gather(&self, values: &[f64], start: usize) -> Vec<f64> {
        (0..self.dimension)
            .map(|j| values[start + j * self.delay])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmiProfile {
    /// `(tau, I(tau))` in bits for `tau = 1..=tau_max`.
    pub values: Vec<(usize, f64)>,
    pub bins: usize,
}

/// `ceil(n^(1/3))` clamped to `[8, 64]`.
pub fn default_bins(n: usize) -> usize {
    ((n as f64).cbrt().ceil() as usize).clamp(8, 64)
}

/// Equal-frequency bin label for every value. Edges are order statistics of
/// the series itself, so equal values always share a bin.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let edges: Vec<f64> = (1..bins).map(|j| sorted[j * n / bins]).collect();
    values
        .iter()
        .map(|&x| edges.partition_point(|&e| e <= x))
        .collect()
}

fn entropy_bits(counts: &[usize], total: usize) -> f64 {
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Histogram mutual information between two label sequences, in bits.
pub fn mutual_information(s: &[usize], q: &[usize], bins: usize) -> f64 {
    let n = s.len();
    let mut hs = vec![0usize; bins];
    let mut hq = vec![0usize; bins];
    let mut joint = vec![0usize; bins * bins];
    for (&a, &b) in s.iter().zip(q) {
        hs[a] += 1;
        hq[b] += 1;
        joint[a * bins + b] += 1;
    }
    entropy_bits(&hs, n) + entropy_bits(&hq, n) - entropy_bits(&joint, n)
}

pub fn ami_profile(values: &[f64], tau_max: usize, bins: usize) -> Result<AmiProfile> {
    let n = values.len();
    if tau_max == 0 {
        return Err(Error::invalid("tau_max", "must be at least 1"));
    }
    if bins < 2 {
        return Err(Error::invalid("bins", "must be at least 2"));
    }
    if n <= tau_max + 1 {
        return Err(Error::too_short("ami input", tau_max + 2, n));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Err(Error::ConstantSeries("ami input".into()));
    }
    let labels = quantile_bins(values, bins);
    let profile = (1..=tau_max)
        .map(|tau| {
            let mi = mutual_information(&labels[..n - tau], &labels[tau..], bins);
            (tau, mi)
        })
        .collect();
    Ok(AmiProfile {
        values: profile,
        bins,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DelaySelection {
    pub tau: usize,
    /// No interior local minimum; `tau` is the global argmin instead.
    pub no_minimum: bool,
}

/// First local minimum of the AMI curve, falling back to its argmin.
pub fn select_delay(profile: &AmiProfile) -> DelaySelection {
    let v = &profile.values;
    for w in v.windows(3) {
        if w[0].1 > w[1].1 && w[1].1 < w[2].1 {
            return DelaySelection {
                tau: w[1].0,
                no_minimum: false,
            };
        }
    }
    // ties resolve to the larger tau so a flat tail does not pick tau = 1
    let (tau, _) = v
        .iter()
        .copied()
        .fold((v[0].0, f64::INFINITY), |best, (t, i)| {
            if i <= best.1 {
                (t, i)
            } else {
                best
            }
        });
    DelaySelection {
        tau,
        no_minimum: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaoPoint {
    pub dimension: usize,
    pub e: f64,
    pub delta_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaoProfile {
    pub values: Vec<CaoPoint>,
}

fn series_range(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn max_norm(values: &[f64], a: usize, b: usize, dimension: usize, delay: usize) -> f64 {
    (0..dimension)
        .map(|j| (values[a + j * delay] - values[b + j * delay]).abs())
        .fold(0.0, f64::max)
}

/// Nearest neighbor of vector `i` among `0..count` (self excluded) under the
/// floored maximum norm. Ties go to the smallest index.
fn nearest_neighbor(
    values: &[f64],
    i: usize,
    count: usize,
    dimension: usize,
    delay: usize,
    floor: f64,
) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for j in (0..count).filter(|&j| j != i) {
        let dist = max_norm(values, i, j, dimension, delay).max(floor);
        if dist < best.1 {
            best = (j, dist);
        }
    }
    best
}

/// Mean false-neighbor ratio `E(d)`.
fn cao_mean_ratio(values: &[f64], tau: usize, dimension: usize, floor: f64) -> f64 {
    let count = values.len() - dimension * tau;
    let ratios: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (j, den) = nearest_neighbor(values, i, count, dimension, tau, floor);
            let num = max_norm(values, i, j, dimension + 1, tau).max(floor);
            num / den
        })
        .collect();
    ratios.iter().sum::<f64>() / count as f64
}

/// `E(d)` and `ΔE(d) = E(d+1)/E(d)` for `d = 1..=d_max`.
///
/// Both distances of the ratio are floored at `1e-12 x range`, so vectors
/// that coincide in `d` and `d+1` dimensions contribute a ratio of exactly 1.
pub fn cao_profile(values: &[f64], tau: usize, d_max: usize) -> Result<CaoProfile> {
    if tau == 0 || d_max == 0 {
        return Err(Error::invalid("tau/d_max", "must be at least 1"));
    }
    // E(d_max + 1) needs at least two vectors
    let required = (d_max + 1) * tau + 2;
    if values.len() < required {
        return Err(Error::too_short("cao input", required, values.len()));
    }
    let range = series_range(values);
    if range <= 0.0 {
        return Err(Error::ConstantSeries("cao input".into()));
    }
    let floor = DISTANCE_FLOOR * range;
    let e: Vec<f64> = (1..=d_max + 1)
        .map(|d| cao_mean_ratio(values, tau, d, floor))
        .collect();
    let points = (0..d_max)
        .map(|i| CaoPoint {
            dimension: i + 1,
            e: e[i],
            delta_e: e[i + 1] / e[i],
        })
        .collect();
    Ok(CaoProfile { values: points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimensionSelection {
    pub dimension: usize,
    /// `ΔE` never settled within `tol`; `dimension` is `d_max`.
    pub saturated: bool,
}

/// `d_c + 1`, where `d_c` is the smallest `d` from which every `ΔE` stays
/// within `tol` of 1.
pub fn select_dimension(profile: &CaoProfile, tol: f64) -> DimensionSelection {
    let v = &profile.values;
    let mut settled_from = None;
    for p in v.iter().rev() {
        if (p.delta_e - 1.0).abs() <= tol {
            settled_from = Some(p.dimension);
        } else {
            break;
        }
    }
    match settled_from {
        Some(dc) => DimensionSelection {
            dimension: dc + 1,
            saturated: false,
        },
        None => DimensionSelection {
            dimension: v.last().map_or(1, |p| p.dimension),
            saturated: true,
        },
    }
}

/// `ceil(sqrt(m))` for `m` embedded vectors.
pub fn default_neighbors(embedded: usize) -> usize {
    ((embedded as f64).sqrt().ceil() as usize).max(1)
}

/// Averages the successors of the `k` nearest embedded vectors to the final
/// one.
pub fn local_mean_predict(values: &[f64], spec: EmbeddingSpec, k: usize) -> Result<f64> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let span = spec.span();
    let available = values.len().saturating_sub(span - 1);
    if available < k + 1 {
        return Err(Error::NotEnoughNeighbors {
            k,
            required: k + 1,
            available,
        });
    }
    let last = values.len() - span;
    let floor = DISTANCE_FLOOR * series_range(values);
    let mut candidates: Vec<(f64, usize)> = (0..last)
        .map(|i| {
            let dist = max_norm(values, i, last, spec.dimension, spec.delay).max(floor);
            (dist, i)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let sum: f64 = candidates[..k].iter().map(|&(_, i)| values[i + span]).sum();
    Ok(sum / k as f64)
}
