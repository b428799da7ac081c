use serde::{Deserialize, Serialize};

use super::grids::ActionGrids;
use crate::econ::{
    CentralBankParams, FirmParams, GovernmentParams, HouseholdParams, NormalizationDefaults,
    RewardMode,
};
use crate::error::{Error, Result};

fn default_horizon() -> usize {
    40
}

fn default_true() -> bool {
    true
}

/// Population, parameters, grids and horizon of one economy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Episode length in quarters.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    pub households: Vec<HouseholdParams>,
    pub firms: Vec<FirmParams>,
    #[serde(default)]
    pub central_bank: CentralBankParams,
    #[serde(default)]
    pub government: GovernmentParams,
    #[serde(default)]
    pub grids: ActionGrids,
    #[serde(default)]
    pub normalization: NormalizationDefaults,
    #[serde(default)]
    pub seed: u64,
    /// Report normalized rewards from `step` (raw rewards stay in the diagnostics).
    #[serde(default = "default_true")]
    pub normalized_rewards: bool,
}

impl ScenarioConfig {
    /// Two households with skills `[[2, 1], [1, 1]]`, a knowledge firm
    /// (`alpha = 2/3`) and a linear-technology firm (`alpha = 1`), ten years.
    pub fn heterogeneous_skills() -> Self {
        let household = |skills: Vec<f64>| HouseholdParams {
            mu: 1.0,
            ..HouseholdParams::with_skills(skills)
        };
        Self {
            horizon: 40,
            households: vec![household(vec![2.0, 1.0]), household(vec![1.0, 1.0])],
            firms: vec![
                FirmParams::default(),
                FirmParams {
                    alpha: 1.0,
                    ..FirmParams::default()
                },
            ],
            central_bank: CentralBankParams::default(),
            government: GovernmentParams::default(),
            grids: ActionGrids::default(),
            normalization: NormalizationDefaults::default(),
            seed: 0,
            normalized_rewards: true,
        }
    }

    pub fn n_households(&self) -> usize {
        self.households.len()
    }

    pub fn n_firms(&self) -> usize {
        self.firms.len()
    }

    pub fn reward_mode(&self) -> RewardMode {
        if self.normalized_rewards {
            RewardMode::Normalized
        } else {
            RewardMode::Raw
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 5 {
            return Err(Error::config("horizon", "must be at least 5 quarters"));
        }
        if self.households.is_empty() {
            return Err(Error::config("households", "at least one household required"));
        }
        if self.firms.is_empty() {
            return Err(Error::config("firms", "at least one firm required"));
        }
        for h in &self.households {
            h.validate(self.firms.len())?;
        }
        for f in &self.firms {
            f.validate()?;
        }
        self.central_bank.validate()?;
        self.government.validate()?;
        self.grids.validate()?;
        self.normalization.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_is_valid() {
        ScenarioConfig::heterogeneous_skills().validate().unwrap();
    }

    #[test]
    fn invalid_config_names_field() {
        let mut c = ScenarioConfig::heterogeneous_skills();
        c.households[0].gamma = 1.0;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "household.gamma"),
            other => panic!("{other:?}"),
        }
        let mut c = ScenarioConfig::heterogeneous_skills();
        c.horizon = 4;
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "horizon"));
        let mut c = ScenarioConfig::heterogeneous_skills();
        c.households[1].skills.pop();
        assert!(c.validate().is_err());
    }
}
