use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{OptimizerKind, TrainConfig};
use super::gae::standardize;
use crate::error::{Error, Result};
use crate::policy::{OutputGrad, PolicyParams};
use crate::seeding::{self, tag};

/// Flattened transitions of one learner, ready for a surrogate update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub inputs: Vec<Vec<f64>>,
    pub actions: Vec<Vec<usize>>,
    pub old_log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.inputs.len();
        if [
            self.actions.len(),
            self.old_log_probs.len(),
            self.advantages.len(),
            self.returns.len(),
        ]
        .iter()
        .any(|&m| m != n)
        {
            return Err(Error::Shape {
                layer: "batch".into(),
                reason: "per-transition arrays differ in length".into(),
            });
        }
        Ok(())
    }
}

/// Mean loss terms over a set of transitions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossTerms {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub total: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

/// Clipped-surrogate loss over `rows` of `batch` and its gradient.
pub fn loss_and_gradient(
    params: &PolicyParams,
    batch: &Batch,
    rows: &[usize],
    config: &TrainConfig,
) -> Result<(LossTerms, Vec<f64>)> {
    let mut grad = vec![0.0; params.len()];
    let mut terms = LossTerms::default();
    if rows.is_empty() {
        return Ok((terms, grad));
    }
    let scale = 1.0 / rows.len() as f64;
    let eps = config.clip_epsilon;
    for &k in rows {
        let fwd = params.forward(&batch.inputs[k])?;
        let eval = fwd.evaluate(&batch.actions[k])?;
        let adv = batch.advantages[k];
        let log_ratio = eval.log_prob - batch.old_log_probs[k];
        let ratio = log_ratio.exp();
        let clipped = ratio.clamp(1.0 - eps, 1.0 + eps);
        let unclipped_active = ratio * adv <= clipped * adv;
        let surrogate = if unclipped_active { ratio * adv } else { clipped * adv };
        let v_err = eval.value - batch.returns[k];

        terms.policy_loss -= surrogate * scale;
        terms.value_loss += v_err * v_err * scale;
        terms.entropy += eval.entropy * scale;
        terms.approx_kl += (ratio - 1.0 - log_ratio) * scale;
        if (ratio - 1.0).abs() > eps {
            terms.clip_fraction += scale;
        }

        let coeffs = OutputGrad {
            d_log_prob: if unclipped_active { -adv * ratio * scale } else { 0.0 },
            d_entropy: -config.entropy_coef * scale,
            d_value: 2.0 * config.value_coef * v_err * scale,
        };
        params.backward(&fwd, &batch.actions[k], coeffs, &mut grad);
    }
    terms.total =
        terms.policy_loss + config.value_coef * terms.value_loss - config.entropy_coef * terms.entropy;
    Ok((terms, grad))
}

/// First-order optimizer state owned by one learner.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Optimizer {
    pub fn new(kind: OptimizerKind, lr: f64, n_params: usize) -> Self {
        Self {
            kind,
            lr,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr
    }

    pub fn step(&mut self, values: &mut [f64], grad: &[f64]) {
        if self.lr == 0.0 {
            return;
        }
        match self.kind {
            OptimizerKind::Sgd => {
                for (x, g) in values.iter_mut().zip(grad) {
                    *x -= self.lr * g;
                }
            }
            OptimizerKind::Adam => {
                self.t += 1;
                let c1 = 1.0 - ADAM_BETA1.powi(self.t);
                let c2 = 1.0 - ADAM_BETA2.powi(self.t);
                for k in 0..values.len() {
                    self.m[k] = ADAM_BETA1 * self.m[k] + (1.0 - ADAM_BETA1) * grad[k];
                    self.v[k] = ADAM_BETA2 * self.v[k] + (1.0 - ADAM_BETA2) * grad[k] * grad[k];
                    let m_hat = self.m[k] / c1;
                    let v_hat = self.v[k] / c2;
                    values[k] -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UpdateStats {
    /// Loss terms averaged over every minibatch step.
    pub mean: LossTerms,
    pub steps: usize,
}

/// Several epochs of shuffled minibatch steps on the clipped surrogate.
pub fn ppo_update(
    params: &PolicyParams,
    batch: &Batch,
    config: &TrainConfig,
    optimizer: &mut Optimizer,
    shuffle_seed: u64,
) -> Result<(PolicyParams, UpdateStats)> {
    batch.check()?;
    let mut work = batch.clone();
    if config.normalize_advantages {
        standardize(&mut work.advantages);
    }
    let mut next = params.clone();
    let mut stats = UpdateStats::default();
    let mut order: Vec<usize> = (0..work.len()).collect();
    let mut rng = seeding::stream(&[tag::SHUFFLE, shuffle_seed]);
    for epoch in 0..config.epochs_per_batch {
        order.shuffle(&mut rng);
        for (mb, rows) in order.chunks(config.minibatch_size).enumerate() {
            let (terms, mut grad) = loss_and_gradient(&next, &work, rows, config)?;
            if !terms.total.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "ppo loss at epoch {epoch} minibatch {mb}: {terms:?}"
                )));
            }
            let cap = config.max_grad_norm;
            if cap > 0.0 {
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > cap {
                    grad.iter_mut().for_each(|g| *g *= cap / norm);
                }
            }
            optimizer.step(&mut next.values, &grad);
            stats.steps += 1;
            let s = &mut stats.mean;
            s.policy_loss += terms.policy_loss;
            s.value_loss += terms.value_loss;
            s.entropy += terms.entropy;
            s.total += terms.total;
            s.approx_kl += terms.approx_kl;
            s.clip_fraction += terms.clip_fraction;
        }
    }
    if stats.steps > 0 {
        let n = stats.steps as f64;
        let s = &mut stats.mean;
        for x in [
            &mut s.policy_loss,
            &mut s.value_loss,
            &mut s.entropy,
            &mut s.total,
            &mut s.approx_kl,
            &mut s.clip_fraction,
        ] {
            *x /= n;
        }
    }
    Ok((next, stats))
}
