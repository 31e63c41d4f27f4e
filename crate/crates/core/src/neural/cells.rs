//! GRU cell, vanilla RNN cell and the additive attention layer, each with a
//! cached forward pass and the matching reverse pass.

use rand::Rng;

use super::linalg::{add_assign, concat, dot, fan_in_vector, sigmoid, Matrix};
use crate::error::{Error, Result};

/// Gate weights of a GRU cell. Each matrix is `hidden x (hidden + input)`
/// and multiplies `[h_prev; x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GruCell {
    pub w_r: Matrix,
    pub w_z: Matrix,
    pub w_h: Matrix,
    pub b_r: Vec<f64>,
    pub b_z: Vec<f64>,
    pub b_h: Vec<f64>,
}

/// Intermediates of one GRU step needed by the reverse pass.
#[derive(Debug, Clone)]
pub struct GruStepCache {
    h_prev: Vec<f64>,
    concat: Vec<f64>,
    gated: Vec<f64>,
    r: Vec<f64>,
    z: Vec<f64>,
    candidate: Vec<f64>,
}

impl GruCell {
    pub fn init<R: Rng>(hidden: usize, input: usize, rng: &mut R) -> Self {
        let cols = hidden + input;
        Self {
            w_r: Matrix::fan_in_uniform(hidden, cols, rng),
            w_z: Matrix::fan_in_uniform(hidden, cols, rng),
            w_h: Matrix::fan_in_uniform(hidden, cols, rng),
            b_r: vec![0.0; hidden],
            b_z: vec![0.0; hidden],
            b_h: vec![0.0; hidden],
        }
    }

    pub fn zeros(hidden: usize, input: usize) -> Self {
        let cols = hidden + input;
        Self {
            w_r: Matrix::zeros(hidden, cols),
            w_z: Matrix::zeros(hidden, cols),
            w_h: Matrix::zeros(hidden, cols),
            b_r: vec![0.0; hidden],
            b_z: vec![0.0; hidden],
            b_h: vec![0.0; hidden],
        }
    }

    pub fn hidden(&self) -> usize {
        self.b_r.len()
    }

    pub fn input(&self) -> usize {
        self.w_r.cols() - self.hidden()
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        vec![
            self.w_r.as_slice(),
            self.w_z.as_slice(),
            self.w_h.as_slice(),
            &self.b_r,
            &self.b_z,
            &self.b_h,
        ]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w_r.as_mut_slice(),
            self.w_z.as_mut_slice(),
            self.w_h.as_mut_slice(),
            &mut self.b_r,
            &mut self.b_z,
            &mut self.b_h,
        ]
    }

    pub fn check(&self, x: &[f64], h_prev: &[f64]) -> Result<()> {
        let h = self.hidden();
        let shapes_ok = [&self.w_r, &self.w_z, &self.w_h]
            .iter()
            .all(|m| m.rows() == h && m.cols() == h + x.len())
            && self.b_z.len() == h
            && self.b_h.len() == h;
        if !shapes_ok || h_prev.len() != h {
            return Err(Error::ShapeMismatch(format!(
                "gru cell hidden {h}, input {}, got x of {} and h_prev of {}",
                self.input(),
                x.len(),
                h_prev.len()
            )));
        }
        Ok(())
    }

    pub fn step_cached(&self, x: &[f64], h_prev: &[f64]) -> (Vec<f64>, GruStepCache) {
        let hidden = self.hidden();
        let c = concat(h_prev, x);
        let pre_r = self.w_r.matvec(&c);
        let pre_z = self.w_z.matvec(&c);
        let r: Vec<f64> = (0..hidden)
            .map(|i| sigmoid(pre_r[i] + self.b_r[i]))
            .collect();
        let z: Vec<f64> = (0..hidden)
            .map(|i| sigmoid(pre_z[i] + self.b_z[i]))
            .collect();
        let mut gated = c.clone();
        for i in 0..hidden {
            gated[i] *= r[i];
        }
        let pre_n = self.w_h.matvec(&gated);
        let candidate: Vec<f64> = (0..hidden)
            .map(|i| (pre_n[i] + self.b_h[i]).tanh())
            .collect();
        let h: Vec<f64> = (0..hidden)
            .map(|i| (1.0 - z[i]) * h_prev[i] + z[i] * candidate[i])
            .collect();
        let cache = GruStepCache {
            h_prev: h_prev.to_vec(),
            concat: c,
            gated,
            r,
            z,
            candidate,
        };
        (h, cache)
    }

    pub fn step(&self, x: &[f64], h_prev: &[f64]) -> Vec<f64> {
        self.step_cached(x, h_prev).0
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dh_prev`.
    pub fn step_backward(&self, cache: &GruStepCache, dh: &[f64], grad: &mut GruCell) -> Vec<f64> {
        let hidden = self.hidden();
        let mut dh_prev: Vec<f64> = (0..hidden).map(|i| dh[i] * (1.0 - cache.z[i])).collect();

        let da_n: Vec<f64> = (0..hidden)
            .map(|i| dh[i] * cache.z[i] * (1.0 - cache.candidate[i].powi(2)))
            .collect();
        grad.w_h.add_outer(&da_n, &cache.gated);
        add_assign(&mut grad.b_h, &da_n);
        let mut d_gated = vec![0.0; cache.gated.len()];
        self.w_h.t_matvec_acc(&da_n, &mut d_gated);

        let da_r: Vec<f64> = (0..hidden)
            .map(|i| {
                dh_prev[i] += d_gated[i] * cache.r[i];
                let dr = d_gated[i] * cache.h_prev[i];
                dr * cache.r[i] * (1.0 - cache.r[i])
            })
            .collect();
        let da_z: Vec<f64> = (0..hidden)
            .map(|i| {
                let dz = dh[i] * (cache.candidate[i] - cache.h_prev[i]);
                dz * cache.z[i] * (1.0 - cache.z[i])
            })
            .collect();
        grad.w_r.add_outer(&da_r, &cache.concat);
        grad.w_z.add_outer(&da_z, &cache.concat);
        add_assign(&mut grad.b_r, &da_r);
        add_assign(&mut grad.b_z, &da_z);

        let mut d_concat = vec![0.0; cache.concat.len()];
        self.w_r.t_matvec_acc(&da_r, &mut d_concat);
        self.w_z.t_matvec_acc(&da_z, &mut d_concat);
        add_assign(&mut dh_prev, &d_concat[..hidden]);
        dh_prev
    }
}

/// A GRU cell with its sigmoid output head `y = σ(w_o·h + b_o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub cell: GruCell,
    pub w_o: Vec<f64>,
    pub b_o: f64,
}

/// One GRU step followed by the output head.
pub fn gru_step(params: &GruParams, x: &[f64], h_prev: &[f64]) -> Result<(Vec<f64>, f64)> {
    params.cell.check(x, h_prev)?;
    if params.w_o.len() != params.cell.hidden() {
        return Err(Error::ShapeMismatch("gru output head".into()));
    }
    let h = params.cell.step(x, h_prev);
    let y = sigmoid(dot(&params.w_o, &h) + params.b_o);
    Ok((h, y))
}

/// Elman cell `h = tanh(W [h_prev; x] + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnCell {
    pub w: Matrix,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RnnStepCache {
    concat: Vec<f64>,
    h: Vec<f64>,
}

impl RnnCell {
    pub fn init<R: Rng>(hidden: usize, input: usize, rng: &mut R) -> Self {
        Self {
            w: Matrix::fan_in_uniform(hidden, hidden + input, rng),
            b: vec![0.0; hidden],
        }
    }

    pub fn zeros(hidden: usize, input: usize) -> Self {
        Self {
            w: Matrix::zeros(hidden, hidden + input),
            b: vec![0.0; hidden],
        }
    }

    pub fn hidden(&self) -> usize {
        self.b.len()
    }

    pub fn step_cached(&self, x: &[f64], h_prev: &[f64]) -> (Vec<f64>, RnnStepCache) {
        let c = concat(h_prev, x);
        let h: Vec<f64> = self
            .w
            .matvec(&c)
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (a + b).tanh())
            .collect();
        (h.clone(), RnnStepCache { concat: c, h })
    }

    pub fn step_backward(&self, cache: &RnnStepCache, dh: &[f64], grad: &mut RnnCell) -> Vec<f64> {
        let hidden = self.hidden();
        let da: Vec<f64> = dh
            .iter()
            .zip(&cache.h)
            .map(|(d, h)| d * (1.0 - h * h))
            .collect();
        grad.w.add_outer(&da, &cache.concat);
        add_assign(&mut grad.b, &da);
        let mut dc = vec![0.0; cache.concat.len()];
        self.w.t_matvec_acc(&da, &mut dc);
        dc.truncate(hidden);
        dc
    }
}

/// Additive attention: energies `S_i = v·tanh(W h_k + U h_i + b)` against the
/// final state `h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub w: Matrix,
    pub u: Matrix,
    pub v: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AttentionCache {
    activations: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub context: Vec<f64>,
}

impl AttentionParams {
    pub fn init<R: Rng>(hidden: usize, rng: &mut R) -> Self {
        Self {
            w: Matrix::fan_in_uniform(hidden, hidden, rng),
            u: Matrix::fan_in_uniform(hidden, hidden, rng),
            v: fan_in_vector(hidden, rng),
            b: vec![0.0; hidden],
        }
    }

    pub fn zeros(hidden: usize) -> Self {
        Self {
            w: Matrix::zeros(hidden, hidden),
            u: Matrix::zeros(hidden, hidden),
            v: vec![0.0; hidden],
            b: vec![0.0; hidden],
        }
    }

    pub fn hidden(&self) -> usize {
        self.v.len()
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        vec![self.w.as_slice(), self.u.as_slice(), &self.v, &self.b]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w.as_mut_slice(),
            self.u.as_mut_slice(),
            &mut self.v,
            &mut self.b,
        ]
    }

    pub fn forward_cached(&self, states: &[Vec<f64>]) -> AttentionCache {
        let last = states.last().expect("non-empty states");
        let query: Vec<f64> = self
            .w
            .matvec(last)
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a + b)
            .collect();
        let activations: Vec<Vec<f64>> = states
            .iter()
            .map(|h| {
                self.u
                    .matvec(h)
                    .iter()
                    .zip(&query)
                    .map(|(a, q)| (a + q).tanh())
                    .collect()
            })
            .collect();
        let energies: Vec<f64> = activations.iter().map(|a| dot(&self.v, a)).collect();
        let weights = softmax(&energies);
        let mut context = vec![0.0; last.len()];
        for (w, h) in weights.iter().zip(states) {
            for (c, x) in context.iter_mut().zip(h) {
                *c += w * x;
            }
        }
        AttentionCache {
            activations,
            weights,
            context,
        }
    }

    /// Accumulates parameter gradients and adds `dL/dh_i` into `d_states`.
    pub fn backward(
        &self,
        states: &[Vec<f64>],
        cache: &AttentionCache,
        d_context: &[f64],
        grad: &mut AttentionParams,
        d_states: &mut [Vec<f64>],
    ) {
        let hidden = self.hidden();
        let k = states.len();
        let d_weights: Vec<f64> = states.iter().map(|h| dot(d_context, h)).collect();
        let mean: f64 = cache
            .weights
            .iter()
            .zip(&d_weights)
            .map(|(a, d)| a * d)
            .sum();
        let mut d_query = vec![0.0; hidden];
        for i in 0..k {
            let alpha = cache.weights[i];
            for (ds, dc) in d_states[i].iter_mut().zip(d_context) {
                *ds += alpha * dc;
            }
            let d_energy = alpha * (d_weights[i] - mean);
            let act = &cache.activations[i];
            for (gv, a) in grad.v.iter_mut().zip(act) {
                *gv += d_energy * a;
            }
            let d_pre: Vec<f64> = (0..hidden)
                .map(|j| d_energy * self.v[j] * (1.0 - act[j] * act[j]))
                .collect();
            grad.u.add_outer(&d_pre, &states[i]);
            self.u.t_matvec_acc(&d_pre, &mut d_states[i]);
            add_assign(&mut d_query, &d_pre);
        }
        add_assign(&mut grad.b, &d_query);
        grad.w.add_outer(&d_query, &states[k - 1]);
        self.w.t_matvec_acc(&d_query, &mut d_states[k - 1]);
    }
}

pub fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

/// Softmax weights over the states and the weighted context vector.
pub fn attention_context(
    params: &AttentionParams,
    states: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if states.is_empty() {
        return Err(Error::EmptySequence);
    }
    let h = params.hidden();
    let ok = params.w.rows() == h
        && params.w.cols() == h
        && params.u.rows() == h
        && params.u.cols() == h
        && params.b.len() == h
        && states.iter().all(|s| s.len() == h);
    if !ok {
        return Err(Error::ShapeMismatch(format!(
            "attention expects states of length {h}"
        )));
    }
    let cache = params.forward_cached(states);
    Ok((cache.weights, cache.context))
}
