use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::egta::PsroConfig;
use crate::env::ScenarioConfig;
use crate::error::{Error, Result};
use crate::policy::DEFAULT_HIDDEN;
use crate::ppo::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub hidden: Vec<usize>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            hidden: DEFAULT_HIDDEN.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub episodes: usize,
    /// Greedy actions instead of sampling.
    pub deterministic: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            episodes: 500,
            deterministic: false,
        }
    }
}

/// Everything a run needs, loaded from one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default = "TrainConfig::imarl")]
    pub imarl: TrainConfig,
    #[serde(default)]
    pub psro: PsroConfig,
    /// Best-response training inside PSRO; `episodes` follows
    /// `psro.episodes_per_oracle`.
    #[serde(default)]
    pub psro_oracle: TrainConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    /// Global seed; every stream derives from it.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn heterogeneous_skills() -> Self {
        Self {
            scenario: ScenarioConfig::heterogeneous_skills(),
            policy: PolicyConfig::default(),
            imarl: TrainConfig::imarl(),
            psro: PsroConfig::default(),
            psro_oracle: TrainConfig::default(),
            evaluation: EvaluationConfig::default(),
            seed: 0,
        }
    }

    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            reason: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.imarl.validate()?;
        self.psro.validate()?;
        self.psro_oracle.validate()?;
        if self.policy.hidden.contains(&0) {
            return Err(Error::config("policy.hidden", "hidden layers must be nonempty"));
        }
        if self.evaluation.episodes == 0 {
            return Err(Error::config("evaluation.episodes", "must be positive"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    /// Oracle settings with the per-oracle episode budget applied.
    pub fn oracle_train(&self) -> TrainConfig {
        TrainConfig {
            episodes: self.psro.episodes_per_oracle,
            ..self.psro_oracle.clone()
        }
    }
}
