use std::sync::{Arc, Mutex};

use super::game::GameOracle;
use super::tensor::MixedProfile;
use crate::env::{AgentType, ScenarioConfig};
use crate::error::{Error, Result};
use crate::policy::{PolicyParams, SampleMode};
use crate::ppo::{
    run_episode, train_best_response, MacroEnv, OpponentSampler, PolicySet, TrainConfig,
    TrainingCurve,
};

/// Display names of the four players, in [`AgentType::ALL`] order.
pub const PLAYER_NAMES: [&str; 4] = ["Household", "Firm", "Central Bank", "Government"];

/// Training curve of one best-response run.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub epoch: usize,
    pub agent_type: AgentType,
    pub curve: TrainingCurve,
}

/// The economy as a four-player game between agent types.
///
/// A player's utility in one run is the mean discounted normalized return
/// of the agents of that type.
pub struct MacroGame {
    pub scenario: Arc<ScenarioConfig>,
    /// Oracle training settings; `seed` is replaced per oracle call.
    pub train: TrainConfig,
    pub eval_mode: SampleMode,
    runs: Mutex<Vec<OracleRun>>,
}

impl MacroGame {
    pub fn new(scenario: Arc<ScenarioConfig>, train: TrainConfig, eval_mode: SampleMode) -> Self {
        Self {
            scenario,
            train,
            eval_mode,
            runs: Mutex::new(Vec::new()),
        }
    }

    /// Curves of every oracle trained so far, ordered by epoch then type.
    pub fn take_oracle_runs(&self) -> Vec<OracleRun> {
        let mut runs = std::mem::take(&mut *self.runs.lock().expect("oracle log"));
        runs.sort_by_key(|r| (r.epoch, r.agent_type.index()));
        runs
    }

    fn policy_set(profile: &[&Arc<PolicyParams>]) -> Result<PolicySet> {
        let mut set = PolicySet::new();
        for (i, p) in profile.iter().enumerate() {
            if p.spec.agent_type.index() != i {
                return Err(Error::contract(format!(
                    "slot {i} holds a {} policy",
                    p.spec.agent_type
                )));
            }
            set.set((*p).clone());
        }
        Ok(set)
    }
}

impl GameOracle for MacroGame {
    type Strategy = Arc<PolicyParams>;

    fn players(&self) -> usize {
        4
    }

    fn player_name(&self, player: usize) -> String {
        PLAYER_NAMES[player].to_string()
    }

    fn play(&self, profile: &[&Arc<PolicyParams>], seed: u64) -> Result<Vec<f64>> {
        let policies = Self::policy_set(profile)?;
        let mut env = MacroEnv::new(self.scenario.clone())?;
        let episode = run_episode(&mut env, &policies, seed, self.eval_mode)?;
        episode
            .type_returns()
            .iter()
            .map(|r| r.ok_or_else(|| Error::Internal("agent type missing from episode".into())))
            .collect()
    }

    /// Warm-started from the player's most recent strategy.
    fn best_response(
        &self,
        player: usize,
        epoch: usize,
        sets: &[Vec<Arc<PolicyParams>>],
        sigma: &MixedProfile,
        seed: u64,
    ) -> Result<Arc<PolicyParams>> {
        let agent_type = AgentType::from_index(player)
            .ok_or_else(|| Error::contract(format!("no agent type {player}")))?;
        let mut opponents = OpponentSampler::new();
        for t in AgentType::ALL {
            if t != agent_type {
                let j = t.index();
                opponents.add(t, sets[j].clone(), sigma.0[j].clone())?;
            }
        }
        let initial = sets[player]
            .last()
            .ok_or_else(|| Error::contract("empty strategy set"))?;
        let config = TrainConfig {
            seed,
            ..self.train.clone()
        };
        let scenario = self.scenario.clone();
        let make_env = || MacroEnv::new(scenario.clone());
        let br = train_best_response((**initial).clone(), &opponents, &make_env, &config)?;
        self.runs.lock().expect("oracle log").push(OracleRun {
            epoch,
            agent_type,
            curve: br.curve,
        });
        Ok(br.policy)
    }
}
