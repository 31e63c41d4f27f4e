//! Forecast accuracy metrics: MAE, RMSE, MAPE (percent) and R².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Targets with `|y|` at or below this value make MAPE undefined.
pub const MAPE_FLOOR: f64 = 1e-8;

fn check(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).abs())
        .sum();
    Ok(sum / actual.len() as f64)
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    Ok((sum / actual.len() as f64).sqrt())
}

pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    if let Some((index, &value)) = actual
        .iter()
        .enumerate()
        .find(|(_, y)| y.abs() <= MAPE_FLOOR)
    {
        return Err(Error::ZeroTarget { index, value });
    }
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| ((y - p) / y).abs())
        .sum();
    Ok(100.0 * sum / actual.len() as f64)
}

pub fn r2(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::ConstantActual);
    }
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// The four metrics for one model at one horizon, in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_name: String,
    pub horizon: usize,
    pub mae: f64,
    pub rmse: f64,
    pub mape: f64,
    pub r2: f64,
}

impl EvaluationReport {
    pub fn evaluate(
        model_name: impl Into<String>,
        horizon: usize,
        actual: &[f64],
        predicted: &[f64],
    ) -> Result<Self> {
        Ok(Self {
            model_name: model_name.into(),
            horizon,
            mae: mae(actual, predicted)?,
            rmse: rmse(actual, predicted)?,
            mape: mape(actual, predicted)?,
            r2: r2(actual, predicted)?,
        })
    }
}
