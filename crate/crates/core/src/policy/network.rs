//! Multilayer perceptron with independent categorical heads and a value head.
//!
//! Parameters live in one flat vector laid out by [`PolicySpec::layers`];
//! forward and backward passes are written out by hand in `f64`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::spec::{LayerShape, PolicySpec};
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

/// Scale applied to the policy-head init so fresh policies are near uniform.
const POLICY_HEAD_GAIN: f64 = 0.01;

/// An immutable parameter version of a policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub spec: PolicySpec,
    pub values: Vec<f64>,
}

/// One sampled joint action for an agent.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSample {
    pub indices: Vec<usize>,
    /// Sum of per-head log-probabilities.
    pub log_prob: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Stochastic,
    /// Per-head argmax, ties to the lowest index.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub log_prob: f64,
    /// Sum of per-head entropies.
    pub entropy: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchEvaluation {
    pub log_probs: Vec<f64>,
    pub entropies: Vec<f64>,
    pub values: Vec<f64>,
}

/// Cached activations of one forward pass.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Input followed by every hidden activation.
    activations: Vec<Vec<f64>>,
    /// Softmax probabilities per head.
    pub probs: Vec<Vec<f64>>,
    pub value: f64,
}

/// Coefficients of the scalar being differentiated:
/// `log_prob * d_log_prob + entropy * d_entropy + value * d_value`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutputGrad {
    pub d_log_prob: f64,
    pub d_entropy: f64,
    pub d_value: f64,
}

struct Layer<'a> {
    weights: &'a [f64],
    bias: &'a [f64],
    rows: usize,
    cols: usize,
}

impl Layer<'_> {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| {
                let w = &self.weights[r * self.cols..(r + 1) * self.cols];
                self.bias[r] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect()
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&q| q > 0.0)
        .map(|q| q * q.ln())
        .sum::<f64>()
}

impl PolicyParams {
    /// Gaussian weights with variance `1/fan_in` (policy head scaled down)
    /// and zero biases, deterministic in `seed`.
    pub fn init(spec: PolicySpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let layers = spec.layers();
        let mut rng = seeding::stream(&[tag::INIT, seed]);
        let mut values = Vec::with_capacity(spec.param_count());
        for layer in &layers {
            let gain = if layer.name == "policy_head" {
                POLICY_HEAD_GAIN
            } else {
                1.0
            };
            let normal = Normal::new(0.0, gain / (layer.cols as f64).sqrt()).expect("positive std");
            values.extend((0..layer.rows * layer.cols).map(|_| normal.sample(&mut rng)));
            values.extend(std::iter::repeat(0.0).take(layer.rows));
        }
        Ok(Self { spec, values })
    }

    pub fn from_values(spec: PolicySpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.param_count() {
            return Err(Error::Shape {
                layer: "all".into(),
                reason: format!("expected {} parameters, got {}", spec.param_count(), values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("policy parameters".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn layer_views(&self) -> Vec<Layer<'_>> {
        let mut offset = 0;
        self.spec
            .layers()
            .iter()
            .map(|LayerShape { rows, cols, .. }| {
                let w = rows * cols;
                let view = Layer {
                    weights: &self.values[offset..offset + w],
                    bias: &self.values[offset + w..offset + w + rows],
                    rows: *rows,
                    cols: *cols,
                };
                offset += w + rows;
                view
            })
            .collect()
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.spec.input_dim() {
            return Err(Error::contract(format!(
                "{} policy expects input of length {}, got {}",
                self.spec.agent_type,
                self.spec.input_dim(),
                input.len()
            )));
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::contract("policy input contains a non-finite value"));
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Forward> {
        self.check_input(input)?;
        let layers = self.layer_views();
        let n_hidden = self.spec.hidden.len();
        let mut activations = Vec::with_capacity(n_hidden + 1);
        activations.push(input.to_vec());
        for layer in &layers[..n_hidden] {
            let z = layer.apply(activations.last().unwrap());
            activations.push(z.into_iter().map(f64::tanh).collect());
        }
        let last = activations.last().unwrap();
        let logits = layers[n_hidden].apply(last);
        let value = layers[n_hidden + 1].apply(last)[0];
        let mut probs = Vec::with_capacity(self.spec.action_dims.len());
        let mut start = 0;
        for &d in &self.spec.action_dims {
            probs.push(softmax(&logits[start..start + d]));
            start += d;
        }
        Ok(Forward {
            activations,
            probs,
            value,
        })
    }

    /// Draw one index per head.
    pub fn act<R: Rng + ?Sized>(
        &self,
        input: &[f64],
        rng: &mut R,
        mode: SampleMode,
    ) -> Result<ActionSample> {
        let fwd = self.forward(input)?;
        let mut indices = Vec::with_capacity(fwd.probs.len());
        let mut log_prob = 0.0;
        for p in &fwd.probs {
            let k = match mode {
                SampleMode::Greedy => {
                    let mut best = 0;
                    for (i, &q) in p.iter().enumerate() {
                        if q > p[best] {
                            best = i;
                        }
                    }
                    best
                }
                SampleMode::Stochastic => {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let mut pick = p.len() - 1;
                    for (i, &q) in p.iter().enumerate() {
                        acc += q;
                        if u < acc {
                            pick = i;
                            break;
                        }
                    }
                    pick
                }
            };
            log_prob += p[k].ln();
            indices.push(k);
        }
        Ok(ActionSample {
            indices,
            log_prob,
            value: fwd.value,
        })
    }

    pub fn evaluate(&self, input: &[f64], actions: &[usize]) -> Result<Evaluation> {
        let fwd = self.forward(input)?;
        fwd.evaluate(actions)
    }

    /// Row-wise log-probabilities, entropies and values.
    pub fn evaluate_batch(&self, inputs: &[Vec<f64>], actions: &[Vec<usize>]) -> Result<BatchEvaluation> {
        if inputs.len() != actions.len() {
            return Err(Error::Shape {
                layer: "batch".into(),
                reason: format!("{} inputs but {} action rows", inputs.len(), actions.len()),
            });
        }
        let mut out = BatchEvaluation::default();
        for (x, a) in inputs.iter().zip(actions) {
            let e = self.evaluate(x, a)?;
            out.log_probs.push(e.log_prob);
            out.entropies.push(e.entropy);
            out.values.push(e.value);
        }
        Ok(out)
    }

    /// Accumulate into `grad` the gradient of
    /// `d_log_prob * log_prob(actions) + d_entropy * entropy + d_value * value`.
    pub fn backward(&self, fwd: &Forward, actions: &[usize], out: OutputGrad, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.values.len());
        let shapes = self.spec.layers();
        let n_hidden = self.spec.hidden.len();
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut acc = 0;
        for s in &shapes {
            offsets.push(acc);
            acc += s.len();
        }

        // Gradient with respect to the logits, head by head.
        let mut d_logits = Vec::with_capacity(self.spec.logits_dim());
        for (p, &a) in fwd.probs.iter().zip(actions) {
            let h = entropy(p);
            for (k, &q) in p.iter().enumerate() {
                let onehot = if k == a { 1.0 } else { 0.0 };
                let d_ent = if q > 0.0 { -q * (q.ln() + h) } else { 0.0 };
                d_logits.push(out.d_log_prob * (onehot - q) + out.d_entropy * d_ent);
            }
        }

        let last = &fwd.activations[n_hidden];
        let width = last.len();
        let mut d_hidden = vec![0.0; width];

        let head = &shapes[n_hidden];
        let off = offsets[n_hidden];
        for (r, &g) in d_logits.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let row = off + r * head.cols;
            for c in 0..head.cols {
                grad[row + c] += g * last[c];
                d_hidden[c] += g * self.values[row + c];
            }
            grad[off + head.rows * head.cols + r] += g;
        }

        let off = offsets[n_hidden + 1];
        if out.d_value != 0.0 {
            for c in 0..width {
                grad[off + c] += out.d_value * last[c];
                d_hidden[c] += out.d_value * self.values[off + c];
            }
            grad[off + width] += out.d_value;
        }

        for k in (0..n_hidden).rev() {
            let shape = &shapes[k];
            let off = offsets[k];
            let h = &fwd.activations[k + 1];
            let x = &fwd.activations[k];
            let dz: Vec<f64> = d_hidden
                .iter()
                .zip(h)
                .map(|(d, a)| d * (1.0 - a * a))
                .collect();
            let mut d_prev = vec![0.0; shape.cols];
            for (r, &g) in dz.iter().enumerate() {
                let row = off + r * shape.cols;
                for c in 0..shape.cols {
                    grad[row + c] += g * x[c];
                    if k > 0 {
                        d_prev[c] += g * self.values[row + c];
                    }
                }
                grad[off + shape.rows * shape.cols + r] += g;
            }
            d_hidden = d_prev;
        }
    }
}

impl Forward {
    pub fn evaluate(&self, actions: &[usize]) -> Result<Evaluation> {
        if actions.len() != self.probs.len() {
            return Err(Error::Shape {
                layer: "policy_head".into(),
                reason: format!("{} heads but {} actions", self.probs.len(), actions.len()),
            });
        }
        let mut log_prob = 0.0;
        let mut ent = 0.0;
        for (p, &a) in self.probs.iter().zip(actions) {
            let q = *p.get(a).ok_or_else(|| {
                Error::contract(format!("action {a} outside head of size {}", p.len()))
            })?;
            log_prob += q.ln();
            ent += entropy(p);
        }
        Ok(Evaluation {
            log_prob,
            entropy: ent,
            value: self.value,
        })
    }
}
