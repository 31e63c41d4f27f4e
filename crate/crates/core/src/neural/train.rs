//! Minibatch trainer with Adam or plain SGD.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{backward, ModelSpec, Network, NetworkParams};
use crate::error::{Error, Result};
use crate::series::WindowSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    /// Seeds the per-epoch shuffle.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 150,
            batch_size: 64,
            learning_rate: 1e-3,
            optimizer: Optimizer::Adam,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::invalid("epochs", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(
                "learning_rate",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: NetworkParams,
    /// Mean minibatch loss of each epoch.
    pub loss_curve: Vec<f64>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(size: usize) -> Self {
        Self {
            m: vec![0.0; size],
            v: vec![0.0; size],
            step: 0,
        }
    }

    fn apply(&mut self, network: &mut Network, grad: &Network, lr: f64) {
        self.step += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.step);
        let c2 = 1.0 - Self::BETA2.powi(self.step);
        let mut idx = 0;
        for (p, g) in network.tensors_mut().into_iter().zip(grad.tensors()) {
            for (w, &gi) in p.iter_mut().zip(g) {
                let m = &mut self.m[idx];
                let v = &mut self.v[idx];
                *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * gi;
                *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * gi * gi;
                *w -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
                idx += 1;
            }
        }
    }
}

/// Trains a fresh network. Identical seeds give bit-identical weights and
/// loss curves.
pub fn train(spec: ModelSpec, windows: &WindowSet, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if windows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut params = NetworkParams::init(spec)?;
    let mut adam = Adam::new(params.network.param_count());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..windows.len()).collect();
    let mut loss_curve = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch = windows.subset(chunk);
            let (loss, grad) = backward(&params, &batch)?;
            if !loss.is_finite() || !grad.is_finite() {
                return Err(Error::non_finite(format!(
                    "training loss or gradient at epoch {epoch}"
                )));
            }
            total += loss * chunk.len() as f64;
            match config.optimizer {
                Optimizer::Adam => adam.apply(&mut params.network, &grad, config.learning_rate),
                Optimizer::Sgd => params.network.add_scaled(&grad, -config.learning_rate),
            }
        }
        if !params.network.is_finite() {
            return Err(Error::non_finite(format!("weights after epoch {epoch}")));
        }
        loss_curve.push(total / windows.len() as f64);
    }
    Ok(TrainOutcome { params, loss_curve })
}
