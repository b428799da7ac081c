use serde::{Deserialize, Serialize};

use crate::env::{AgentType, ScenarioConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
}

/// Architecture of one agent type's shared policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub agent_type: AgentType,
    pub obs_dim: usize,
    /// Length of the heterogeneity-parameter suffix of the input.
    pub hetero_dim: usize,
    /// Size of each independent categorical head.
    pub action_dims: Vec<usize>,
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

/// Weight matrix `rows x cols` (output x input) followed by `rows` biases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

impl LayerShape {
    pub fn len(&self) -> usize {
        self.rows * self.cols + self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub const DEFAULT_HIDDEN: [usize; 2] = [64, 64];

impl PolicySpec {
    /// Spec for `agent_type` in the given economy with default hidden sizes.
    pub fn for_scenario(agent_type: AgentType, config: &ScenarioConfig) -> Self {
        Self::with_hidden(agent_type, config, DEFAULT_HIDDEN.to_vec())
    }

    pub fn with_hidden(agent_type: AgentType, config: &ScenarioConfig, hidden: Vec<usize>) -> Self {
        let (n_h, n_f) = (config.n_households(), config.n_firms());
        Self {
            agent_type,
            obs_dim: agent_type.obs_dim(n_h, n_f),
            hetero_dim: super::features::hetero_dim(agent_type, n_f),
            action_dims: config.grids.action_dims(agent_type, n_h, n_f),
            hidden,
            activation: Activation::Tanh,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.obs_dim + self.hetero_dim
    }

    pub fn logits_dim(&self) -> usize {
        self.action_dims.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim() == 0 {
            return Err(Error::config("policy.obs_dim", "input must be nonempty"));
        }
        if self.action_dims.is_empty() || self.action_dims.iter().any(|&d| d < 2) {
            return Err(Error::config(
                "policy.action_dims",
                "every head needs at least two actions",
            ));
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::config("policy.hidden", "hidden layers must be nonempty"));
        }
        Ok(())
    }

    /// Layer table in storage order: hidden layers, policy head, value head.
    pub fn layers(&self) -> Vec<LayerShape> {
        let mut layers = Vec::with_capacity(self.hidden.len() + 2);
        let mut width = self.input_dim();
        for (k, &h) in self.hidden.iter().enumerate() {
            layers.push(LayerShape {
                name: format!("hidden.{k}"),
                rows: h,
                cols: width,
            });
            width = h;
        }
        layers.push(LayerShape {
            name: "policy_head".into(),
            rows: self.logits_dim(),
            cols: width,
        });
        layers.push(LayerShape {
            name: "value_head".into(),
            rows: 1,
            cols: width,
        });
        layers
    }

    pub fn param_count(&self) -> usize {
        self.layers().iter().map(LayerShape::len).sum()
    }
}
