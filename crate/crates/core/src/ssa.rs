//! Singular spectrum analysis.
//!
//! The series is embedded into an `L x K` Hankel trajectory matrix, the
//! eigen-decomposition of the smaller of `X Xᵀ` and `Xᵀ X` yields the
//! singular triplets, and every rank-1 piece `u uᵀ X` is mapped back to a
//! series by anti-diagonal averaging. Summing all pieces reproduces the
//! input; summing the leading `p` of them is the usual denoiser.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
const RELATIVE_EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsaConfig {
    /// Embedding window `L`.
    pub window_len: usize,
    /// Number of leading components kept by [`ssa_denoise`].
    pub keep_components: usize,
}

impl Default for SsaConfig {
    fn default() -> Self {
        Self {
            window_len: 20,
            keep_components: 10,
        }
    }
}

impl SsaConfig {
    pub fn new(window_len: usize, keep_components: usize) -> Self {
        Self {
            window_len,
            keep_components,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let l = self.window_len;
        if l < 2 {
            return Err(Error::invalid("window_len", "must be at least 2"));
        }
        if n < l {
            return Err(Error::too_short("ssa input", l, n));
        }
        if self.keep_components == 0 || self.keep_components > l {
            return Err(Error::invalid(
                "keep_components",
                format!("must lie in [1, {l}], got {}", self.keep_components),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsaDecomposition {
    /// One series per eigen-triplet, by descending singular value.
    pub components: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub window_len: usize,
    pub k: usize,
}

impl SsaDecomposition {
    /// Element-wise sum of the first `p` components.
    pub fn reconstruct(&self, p: usize) -> Vec<f64> {
        let n = self.components.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for comp in self.components.iter().take(p) {
            for (o, c) in out.iter_mut().zip(comp) {
                *o += c;
            }
        }
        out
    }
}

/// Hankel trajectory matrix: column `j` is `x[j..j + L]`.
pub fn trajectory_matrix(values: &[f64], window_len: usize) -> DMatrix<f64> {
    let k = values.len() - window_len + 1;
    DMatrix::from_fn(window_len, k, |i, j| values[i + j])
}

/// Mean over each anti-diagonal `i + j = const` of an `L x K` matrix.
pub fn diagonal_average(matrix: &DMatrix<f64>) -> Vec<f64> {
    let (l, k) = matrix.shape();
    let n = l + k - 1;
    let mut sums = vec![0.0; n];
    let mut counts = vec![0usize; n];
    for j in 0..k {
        for i in 0..l {
            sums[i + j] += matrix[(i, j)];
            counts[i + j] += 1;
        }
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect()
}

pub fn ssa_decompose(values: &[f64], config: SsaConfig) -> Result<SsaDecomposition> {
    let n = values.len();
    config.validate(n)?;
    let l = config.window_len;
    let x = trajectory_matrix(values, l);
    let k = x.ncols();
    // the smaller Gram matrix has the same nonzero eigenvalues
    let wide = l <= k;
    let gram = if wide { &x * x.transpose() } else { x.transpose() * &x };
    let size = gram.nrows();

    let eigen = SymmetricEigen::try_new(gram, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("lag-covariance eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let lambda_max = eigen.eigenvalues[order[0]].max(0.0);
    if !lambda_max.is_finite() {
        return Err(Error::non_finite("ssa eigenvalues"));
    }

    let mut components = Vec::with_capacity(l);
    let mut singular_values = Vec::with_capacity(l);
    for &idx in &order {
        let lambda = eigen.eigenvalues[idx];
        if lambda_max == 0.0 || lambda <= RELATIVE_EIGEN_FLOOR * lambda_max {
            singular_values.push(0.0);
            components.push(vec![0.0; n]);
            continue;
        }
        let w = eigen.eigenvectors.column(idx);
        // √λ u vᵀ is u (uᵀ X) from the left side or (X v) vᵀ from the right
        let rank_one = if wide {
            w * (w.transpose() * &x)
        } else {
            (&x * w) * w.transpose()
        };
        singular_values.push(lambda.sqrt());
        components.push(diagonal_average(&rank_one));
    }
    // a short series has fewer than L triplets; pad with empty ones
    components.resize(l, vec![0.0; n]);
    singular_values.resize(l, 0.0);

    Ok(SsaDecomposition {
        components,
        singular_values,
        window_len: l,
        k,
    })
}

/// Sum of the leading `keep_components` components.
pub fn ssa_denoise(values: &[f64], config: SsaConfig) -> Result<Vec<f64>> {
    let decomposition = ssa_decompose(values, config)?;
    Ok(decomposition.reconstruct(config.keep_components))
}
