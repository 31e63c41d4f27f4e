//! The four network architectures, their parameter sets, forward passes and
//! reverse-mode gradients of the batch mean squared error.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cells::{AttentionParams, GruCell, GruParams, RnnCell};
use super::linalg::{add_assign, concat, dot, fan_in_vector, sigmoid, Matrix};
use crate::error::{Error, Result};
use crate::series::{Series, WindowSet};

/// Samples per gradient chunk. Fixed so the reduction order never depends on
/// the thread count.
const GRAD_CHUNK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Feed-forward network (BPNN baseline).
    Mlp,
    Rnn,
    Gru,
    /// GRU with an attention head.
    AtGru,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::Rnn => "rnn",
            ModelKind::Gru => "gru",
            ModelKind::AtGru => "atgru",
        }
    }

    /// Name used in result tables.
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Mlp => "BPNN",
            ModelKind::Rnn => "RNN",
            ModelKind::Gru => "GRU",
            ModelKind::AtGru => "AtGRU",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlp" | "bpnn" => Some(ModelKind::Mlp),
            "rnn" => Some(ModelKind::Rnn),
            "gru" => Some(ModelKind::Gru),
            "atgru" => Some(ModelKind::AtGru),
            _ => None,
        }
    }

    pub fn is_recurrent(&self) -> bool {
        !matches!(self, ModelKind::Mlp)
    }
}

/// Architecture descriptor. `input_dim` is the window length; recurrent
/// models read it as that many scalar time steps. `hidden` holds one width
/// for recurrent models and the hidden layer widths for the MLP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, input_dim: usize, hidden: Vec<usize>, seed: u64) -> Self {
        Self {
            kind,
            input_dim,
            hidden,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::invalid("model", "dimensions must be positive"));
        }
        if self.kind.is_recurrent() && self.hidden.len() != 1 {
            return Err(Error::invalid(
                "hidden",
                format!("{} takes a single hidden width", self.kind.label()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Matrix,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// tanh on every layer but the last, sigmoid on the last.
    pub layers: Vec<Dense>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnnParams {
    pub cell: RnnCell,
    pub w_o: Vec<f64>,
    pub b_o: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtGruParams {
    pub cell: GruCell,
    pub attention: AttentionParams,
    /// Head over `[context; h_last]`, length `2 * hidden`.
    pub w_out: Vec<f64>,
    pub b_out: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Mlp(MlpParams),
    Rnn(RnnParams),
    Gru(GruParams),
    AtGru(AtGruParams),
}

/// Trained weights together with the architecture that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub spec: ModelSpec,
    pub network: Network,
}

fn mlp_widths(spec: &ModelSpec) -> Vec<usize> {
    let mut widths = vec![spec.input_dim];
    widths.extend_from_slice(&spec.hidden);
    widths.push(1);
    widths
}

impl Network {
    fn build(spec: &ModelSpec, zero: bool) -> Network {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let h = spec.hidden[0];
        match spec.kind {
            ModelKind::Mlp => {
                let widths = mlp_widths(spec);
                let layers = widths
                    .windows(2)
                    .map(|w| Dense {
                        w: if zero {
                            Matrix::zeros(w[1], w[0])
                        } else {
                            Matrix::fan_in_uniform(w[1], w[0], &mut rng)
                        },
                        b: vec![0.0; w[1]],
                    })
                    .collect();
                Network::Mlp(MlpParams { layers })
            }
            ModelKind::Rnn => Network::Rnn(RnnParams {
                cell: if zero {
                    RnnCell::zeros(h, 1)
                } else {
                    RnnCell::init(h, 1, &mut rng)
                },
                w_o: if zero {
                    vec![0.0; h]
                } else {
                    fan_in_vector(h, &mut rng)
                },
                b_o: 0.0,
            }),
            ModelKind::Gru => Network::Gru(GruParams {
                cell: if zero {
                    GruCell::zeros(h, 1)
                } else {
                    GruCell::init(h, 1, &mut rng)
                },
                w_o: if zero {
                    vec![0.0; h]
                } else {
                    fan_in_vector(h, &mut rng)
                },
                b_o: 0.0,
            }),
            ModelKind::AtGru => Network::AtGru(AtGruParams {
                cell: if zero {
                    GruCell::zeros(h, 1)
                } else {
                    GruCell::init(h, 1, &mut rng)
                },
                attention: if zero {
                    AttentionParams::zeros(h)
                } else {
                    AttentionParams::init(h, &mut rng)
                },
                w_out: if zero {
                    vec![0.0; 2 * h]
                } else {
                    fan_in_vector(2 * h, &mut rng)
                },
                b_out: 0.0,
            }),
        }
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        match self {
            Network::Mlp(p) => p
                .layers
                .iter()
                .flat_map(|l| [l.w.as_slice(), l.b.as_slice()])
                .collect(),
            Network::Rnn(p) => vec![
                p.cell.w.as_slice(),
                &p.cell.b,
                &p.w_o,
                std::slice::from_ref(&p.b_o),
            ],
            Network::Gru(p) => {
                let mut t = p.cell.tensors();
                t.push(&p.w_o);
                t.push(std::slice::from_ref(&p.b_o));
                t
            }
            Network::AtGru(p) => {
                let mut t = p.cell.tensors();
                t.extend(p.attention.tensors());
                t.push(&p.w_out);
                t.push(std::slice::from_ref(&p.b_out));
                t
            }
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            Network::Mlp(p) => p
                .layers
                .iter_mut()
                .flat_map(|l| [l.w.as_mut_slice(), l.b.as_mut_slice()])
                .collect(),
            Network::Rnn(p) => vec![
                p.cell.w.as_mut_slice(),
                &mut p.cell.b,
                &mut p.w_o,
                std::slice::from_mut(&mut p.b_o),
            ],
            Network::Gru(p) => {
                let mut t = p.cell.tensors_mut();
                t.push(&mut p.w_o);
                t.push(std::slice::from_mut(&mut p.b_o));
                t
            }
            Network::AtGru(p) => {
                let mut t = p.cell.tensors_mut();
                t.extend(p.attention.tensors_mut());
                t.push(&mut p.w_out);
                t.push(std::slice::from_mut(&mut p.b_out));
                t
            }
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Overwrites every parameter from a flat row-major payload.
    pub fn load_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                flat.len()
            )));
        }
        let mut offset = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[offset..offset + t.len()]);
            offset += t.len();
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &Network, scale: f64) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }
}

fn recurrent_states<F, C>(window: &[f64], hidden: usize, mut step: F) -> (Vec<Vec<f64>>, Vec<C>)
where
    F: FnMut(&[f64], &[f64]) -> (Vec<f64>, C),
{
    let mut states = Vec::with_capacity(window.len());
    let mut caches = Vec::with_capacity(window.len());
    let mut h = vec![0.0; hidden];
    for &x in window {
        let (next, cache) = step(std::slice::from_ref(&x), &h);
        states.push(next.clone());
        caches.push(cache);
        h = next;
    }
    (states, caches)
}

impl NetworkParams {
    /// Fresh fan-in-uniform weights seeded by `spec.seed`, zero biases.
    pub fn init(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let network = Network::build(&spec, false);
        Ok(Self { spec, network })
    }

    /// Same shapes, all zeros.
    pub fn zeros_like(&self) -> Network {
        Network::build(&self.spec, true)
    }

    fn check_window(&self, window: &[f64]) -> Result<()> {
        if window.len() != self.spec.input_dim {
            return Err(Error::ShapeMismatch(format!(
                "window of length {} for a model with input_dim {}",
                window.len(),
                self.spec.input_dim
            )));
        }
        Ok(())
    }

    pub fn forward(&self, window: &[f64]) -> Result<f64> {
        self.check_window(window)?;
        Ok(self.forward_unchecked(window))
    }

    fn forward_unchecked(&self, window: &[f64]) -> f64 {
        match &self.network {
            Network::Mlp(p) => {
                let mut a = window.to_vec();
                let last = p.layers.len() - 1;
                for (i, layer) in p.layers.iter().enumerate() {
                    let z: Vec<f64> = layer
                        .w
                        .matvec(&a)
                        .iter()
                        .zip(&layer.b)
                        .map(|(x, b)| x + b)
                        .collect();
                    a = if i == last {
                        z.into_iter().map(sigmoid).collect()
                    } else {
                        z.into_iter().map(f64::tanh).collect()
                    };
                }
                a[0]
            }
            Network::Rnn(p) => {
                let (states, _) =
                    recurrent_states(window, p.cell.hidden(), |x, h| p.cell.step_cached(x, h));
                sigmoid(dot(&p.w_o, states.last().unwrap()) + p.b_o)
            }
            Network::Gru(p) => {
                let (states, _) =
                    recurrent_states(window, p.cell.hidden(), |x, h| (p.cell.step(x, h), ()));
                sigmoid(dot(&p.w_o, states.last().unwrap()) + p.b_o)
            }
            Network::AtGru(p) => {
                let (states, _) =
                    recurrent_states(window, p.cell.hidden(), |x, h| (p.cell.step(x, h), ()));
                let att = p.attention.forward_cached(&states);
                let head_in = concat(&att.context, states.last().unwrap());
                sigmoid(dot(&p.w_out, &head_in) + p.b_out)
            }
        }
    }

    /// Forward pass of one window plus reverse accumulation of
    /// `dy * dy/dθ` into `grad`. Returns the output.
    pub fn accumulate_gradient(&self, window: &[f64], dy: f64, grad: &mut Network) -> f64 {
        match (&self.network, grad) {
            (Network::Mlp(p), Network::Mlp(g)) => {
                let last = p.layers.len() - 1;
                let mut acts = vec![window.to_vec()];
                for (i, layer) in p.layers.iter().enumerate() {
                    let z = layer.w.matvec(acts.last().unwrap());
                    let a: Vec<f64> = z
                        .iter()
                        .zip(&layer.b)
                        .map(|(x, b)| {
                            if i == last {
                                sigmoid(x + b)
                            } else {
                                (x + b).tanh()
                            }
                        })
                        .collect();
                    acts.push(a);
                }
                let y = acts[last + 1][0];
                let mut delta = vec![dy * y * (1.0 - y)];
                for i in (0..=last).rev() {
                    g.layers[i].w.add_outer(&delta, &acts[i]);
                    add_assign(&mut g.layers[i].b, &delta);
                    if i > 0 {
                        let mut back = vec![0.0; acts[i].len()];
                        p.layers[i].w.t_matvec_acc(&delta, &mut back);
                        delta = back
                            .iter()
                            .zip(&acts[i])
                            .map(|(d, a)| d * (1.0 - a * a))
                            .collect();
                    }
                }
                y
            }
            (Network::Rnn(p), Network::Rnn(g)) => {
                let (states, caches) =
                    recurrent_states(window, p.cell.hidden(), |x, h| p.cell.step_cached(x, h));
                let h_last = states.last().unwrap();
                let y = sigmoid(dot(&p.w_o, h_last) + p.b_o);
                let d_pre = dy * y * (1.0 - y);
                for (gw, h) in g.w_o.iter_mut().zip(h_last) {
                    *gw += d_pre * h;
                }
                g.b_o += d_pre;
                let mut dh: Vec<f64> = p.w_o.iter().map(|w| w * d_pre).collect();
                for cache in caches.iter().rev() {
                    dh = p.cell.step_backward(cache, &dh, &mut g.cell);
                }
                y
            }
            (Network::Gru(p), Network::Gru(g)) => {
                let (states, caches) =
                    recurrent_states(window, p.cell.hidden(), |x, h| p.cell.step_cached(x, h));
                let h_last = states.last().unwrap();
                let y = sigmoid(dot(&p.w_o, h_last) + p.b_o);
                let d_pre = dy * y * (1.0 - y);
                for (gw, h) in g.w_o.iter_mut().zip(h_last) {
                    *gw += d_pre * h;
                }
                g.b_o += d_pre;
                let mut dh: Vec<f64> = p.w_o.iter().map(|w| w * d_pre).collect();
                for cache in caches.iter().rev() {
                    dh = p.cell.step_backward(cache, &dh, &mut g.cell);
                }
                y
            }
            (Network::AtGru(p), Network::AtGru(g)) => {
                let hidden = p.cell.hidden();
                let (states, caches) =
                    recurrent_states(window, hidden, |x, h| p.cell.step_cached(x, h));
                let att = p.attention.forward_cached(&states);
                let head_in = concat(&att.context, states.last().unwrap());
                let y = sigmoid(dot(&p.w_out, &head_in) + p.b_out);
                let d_pre = dy * y * (1.0 - y);
                for (gw, x) in g.w_out.iter_mut().zip(&head_in) {
                    *gw += d_pre * x;
                }
                g.b_out += d_pre;

                let d_context: Vec<f64> = p.w_out[..hidden].iter().map(|w| w * d_pre).collect();
                let mut d_states = vec![vec![0.0; hidden]; states.len()];
                for (d, w) in d_states
                    .last_mut()
                    .unwrap()
                    .iter_mut()
                    .zip(&p.w_out[hidden..])
                {
                    *d += w * d_pre;
                }
                p.attention
                    .backward(&states, &att, &d_context, &mut g.attention, &mut d_states);

                let mut dh = vec![0.0; hidden];
                for (t, cache) in caches.iter().enumerate().rev() {
                    add_assign(&mut dh, &d_states[t]);
                    dh = p.cell.step_backward(cache, &dh, &mut g.cell);
                }
                y
            }
            _ => unreachable!("gradient buffer built from a different architecture"),
        }
    }
}

/// Batch mean squared error.
pub fn batch_loss(params: &NetworkParams, batch: &WindowSet) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyInput);
    }
    let outputs = predict_values(params, batch)?;
    let sum: f64 = outputs
        .iter()
        .zip(&batch.targets)
        .map(|(y, t)| (y - t).powi(2))
        .sum();
    Ok(sum / batch.len() as f64)
}

/// Gradient of the batch mean squared error with respect to every
/// parameter, and the loss itself.
pub fn backward(params: &NetworkParams, batch: &WindowSet) -> Result<(f64, Network)> {
    if batch.is_empty() {
        return Err(Error::EmptyInput);
    }
    for w in &batch.inputs {
        params.check_window(w)?;
    }
    let n = batch.len() as f64;
    let partials: Vec<(f64, Network)> = (0..batch.len())
        .collect::<Vec<_>>()
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut grad = params.zeros_like();
            let mut loss = 0.0;
            for &i in chunk {
                // dL/dy is linear in y, so run forward once to get y first
                let y = params.forward_unchecked(&batch.inputs[i]);
                let err = y - batch.targets[i];
                loss += err * err;
                params.accumulate_gradient(&batch.inputs[i], 2.0 * err / n, &mut grad);
            }
            (loss, grad)
        })
        .collect();
    let mut iter = partials.into_iter();
    let (mut loss, mut grad) = iter.next().unwrap();
    for (l, g) in iter {
        loss += l;
        grad.add_scaled(&g, 1.0);
    }
    Ok((loss / n, grad))
}

fn predict_values(params: &NetworkParams, windows: &WindowSet) -> Result<Vec<f64>> {
    for w in &windows.inputs {
        params.check_window(w)?;
    }
    Ok(windows
        .inputs
        .par_iter()
        .map(|w| params.forward_unchecked(w))
        .collect())
}

/// One output per window, in window order, in normalized units.
pub fn predict_sequence(params: &NetworkParams, windows: &WindowSet) -> Result<Series> {
    let values = predict_values(params, windows)?;
    if values.is_empty() {
        return Ok(Series::empty("prediction"));
    }
    Series::new("prediction", values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psr::EmbeddingSpec;

    fn windows(d: usize, count: usize) -> WindowSet {
        let x: Vec<f64> = (0..count + d)
            .map(|t| 0.5 + 0.4 * (t as f64 * 0.7).sin())
            .collect();
        crate::series::make_windows(&x, EmbeddingSpec::new(d, 1)).unwrap()
    }

    #[test]
    fn outputs_in_unit_interval() {
        for kind in [
            ModelKind::Mlp,
            ModelKind::Rnn,
            ModelKind::Gru,
            ModelKind::AtGru,
        ] {
            let hidden = if kind == ModelKind::Mlp {
                vec![5, 3]
            } else {
                vec![4]
            };
            let p = NetworkParams::init(ModelSpec::new(kind, 6, hidden, 7)).unwrap();
            for w in &windows(6, 10).inputs {
                let y = p.forward(w).unwrap();
                assert!(y > 0.0 && y < 1.0);
            }
        }
    }

    #[test]
    fn zero_error_batch_has_zero_gradient() {
        let p = NetworkParams::init(ModelSpec::new(ModelKind::AtGru, 5, vec![4], 1)).unwrap();
        let mut batch = windows(5, 6);
        batch.targets = batch.inputs.iter().map(|w| p.forward(w).unwrap()).collect();
        let (loss, grad) = backward(&p, &batch).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.flatten().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_sample_gradient_scales_with_residual() {
        let p = NetworkParams::init(ModelSpec::new(ModelKind::Gru, 4, vec![3], 2)).unwrap();
        let mut batch = windows(4, 1);
        let y = p.forward(&batch.inputs[0]).unwrap();
        batch.targets[0] = y - 0.1;
        let (_, g1) = backward(&p, &batch).unwrap();
        batch.targets[0] = y - 0.3;
        let (_, g3) = backward(&p, &batch).unwrap();
        for (a, b) in g1.flatten().iter().zip(g3.flatten()) {
            assert!((3.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-12));
        }
    }

    #[test]
    fn at_gru_single_step_uses_state_twice() {
        let p = NetworkParams::init(ModelSpec::new(ModelKind::AtGru, 1, vec![3], 5)).unwrap();
        let Network::AtGru(inner) = &p.network else {
            unreachable!()
        };
        let h1 = inner.cell.step(&[0.4], &[0.0; 3]);
        let expected = sigmoid(dot(&inner.w_out, &concat(&h1, &h1)) + inner.b_out);
        assert_eq!(p.forward(&[0.4]).unwrap(), expected);
    }

    #[test]
    fn predict_sequence_matches_forward() {
        let p = NetworkParams::init(ModelSpec::new(ModelKind::Rnn, 3, vec![4], 3)).unwrap();
        let w = windows(3, 7);
        let out = predict_sequence(&p, &w).unwrap();
        for (o, x) in out.iter().zip(&w.inputs) {
            assert_eq!(*o, p.forward(x).unwrap());
        }
        assert!(predict_sequence(&p, &WindowSet::empty(w.spec))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rejects_wrong_window() {
        let p = NetworkParams::init(ModelSpec::new(ModelKind::Gru, 3, vec![2], 3)).unwrap();
        assert!(matches!(p.forward(&[1.0]), Err(Error::ShapeMismatch(_))));
    }
}
