use serde::{Deserialize, Serialize};

use crate::env::AgentType;
use crate::error::{Error, Result};

/// Step sizes of the four agent-type learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningRates {
    pub household: f64,
    pub firm: f64,
    pub central_bank: f64,
    pub government: f64,
}

impl LearningRates {
    pub fn psro() -> Self {
        Self {
            household: 2e-3,
            firm: 2e-3,
            central_bank: 2e-3,
            government: 5e-3,
        }
    }

    pub fn imarl() -> Self {
        Self {
            household: 2e-3,
            firm: 5e-3,
            central_bank: 5e-3,
            government: 1e-2,
        }
    }

    pub fn uniform(rate: f64) -> Self {
        Self {
            household: rate,
            firm: rate,
            central_bank: rate,
            government: rate,
        }
    }

    pub fn get(&self, agent_type: AgentType) -> f64 {
        match agent_type {
            AgentType::Household => self.household,
            AgentType::Firm => self.firm,
            AgentType::CentralBank => self.central_bank,
            AgentType::Government => self.government,
        }
    }
}

impl Default for LearningRates {
    fn default() -> Self {
        Self::psro()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Adam,
    Sgd,
}

/// Step-size candidates tried when tuning learning rates by hand.
pub const LEARNING_RATE_GRID: [f64; 4] = [1e-3, 2e-3, 5e-3, 1e-2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rates: LearningRates,
    pub episodes: usize,
    /// Surrogate clip range; `f64::INFINITY` turns clipping off.
    pub clip_epsilon: f64,
    pub gae_lambda: f64,
    pub epochs_per_batch: usize,
    pub minibatch_size: usize,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub episodes_per_batch: usize,
    pub normalize_advantages: bool,
    pub optimizer: OptimizerKind,
    /// Global gradient-norm cap per minibatch step; 0 leaves gradients as is.
    pub max_grad_norm: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rates: LearningRates::psro(),
            episodes: 100,
            clip_epsilon: 0.2,
            gae_lambda: 0.95,
            epochs_per_batch: 4,
            minibatch_size: 256,
            entropy_coef: 0.01,
            value_coef: 0.5,
            episodes_per_batch: 10,
            normalize_advantages: true,
            optimizer: OptimizerKind::Adam,
            max_grad_norm: 0.5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn imarl() -> Self {
        Self {
            learning_rates: LearningRates::imarl(),
            episodes: 4000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lr = &self.learning_rates;
        for (name, rate) in [
            ("household", lr.household),
            ("firm", lr.firm),
            ("central_bank", lr.central_bank),
            ("government", lr.government),
        ] {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::config(
                    format!("train.learning_rates.{name}"),
                    "must be finite and nonnegative",
                ));
            }
        }
        let clip_ok = self.clip_epsilon == f64::INFINITY
            || (self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0);
        if !clip_ok {
            return Err(Error::config("train.clip_epsilon", "must lie in (0, 1) or be infinite"));
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return Err(Error::config("train.gae_lambda", "must lie in [0, 1]"));
        }
        for (name, n) in [
            ("train.episodes", self.episodes),
            ("train.epochs_per_batch", self.epochs_per_batch),
            ("train.minibatch_size", self.minibatch_size),
            ("train.episodes_per_batch", self.episodes_per_batch),
        ] {
            if n == 0 {
                return Err(Error::config(name, "must be positive"));
            }
        }
        for (name, c) in [
            ("train.entropy_coef", self.entropy_coef),
            ("train.value_coef", self.value_coef),
        ] {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::config(name, "must be finite and nonnegative"));
            }
        }
        if !(self.max_grad_norm >= 0.0) {
            return Err(Error::config("train.max_grad_norm", "must be nonnegative"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        TrainConfig::default().validate().unwrap();
        TrainConfig::imarl().validate().unwrap();
        let mut c = TrainConfig::default();
        c.clip_epsilon = f64::INFINITY;
        c.validate().unwrap();
        c.clip_epsilon = 1.5;
        assert!(c.validate().is_err());
        c = TrainConfig::default();
        c.gae_lambda = -0.1;
        assert!(c.validate().is_err());
        c = TrainConfig::default();
        c.learning_rates.firm = f64::NAN;
        assert!(c.validate().is_err());
    }
}
