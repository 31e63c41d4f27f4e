//! Central finite-difference verification of the analytic gradients.

use serde::Serialize;

use super::model::{backward, batch_loss, NetworkParams};
use crate::error::Result;
use crate::series::WindowSet;

/// Denominator floor for the relative error of near-zero gradient entries.
pub const RELATIVE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    pub parameters: usize,
    pub max_relative_error: f64,
    /// Flat index of the worst entry.
    pub worst_index: usize,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// Compares every analytic gradient entry against
/// `(L(θ + h) - L(θ - h)) / 2h`.
pub fn gradient_check(
    params: &NetworkParams,
    batch: &WindowSet,
    step: f64,
) -> Result<GradCheckReport> {
    let (_, grad) = backward(params, batch)?;
    let analytic = grad.flatten();
    let base = params.network.flatten();
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        parameters: base.len(),
        max_relative_error: 0.0,
        worst_index: 0,
        worst_analytic: 0.0,
        worst_numeric: 0.0,
    };
    let mut flat = base.clone();
    for i in 0..base.len() {
        flat[i] = base[i] + step;
        probe.network.load_flat(&flat)?;
        let plus = batch_loss(&probe, batch)?;
        flat[i] = base[i] - step;
        probe.network.load_flat(&flat)?;
        let minus = batch_loss(&probe, batch)?;
        flat[i] = base[i];
        let numeric = (plus - minus) / (2.0 * step);
        let err = relative_error(analytic[i], numeric);
        if err > report.max_relative_error || i == 0 {
            report.max_relative_error = err;
            report.worst_index = i;
            report.worst_analytic = analytic[i];
            report.worst_numeric = numeric;
        }
    }
    Ok(report)
}
