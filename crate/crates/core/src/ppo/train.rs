use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use super::config::TrainConfig;
use super::gae::compute_advantages;
use super::rollout::{run_episode, Episode, PolicySet, TrainEnv};
use super::update::{ppo_update, Batch, Optimizer, UpdateStats};
use crate::env::{AgentId, AgentType, ScenarioConfig};
use crate::error::{Error, Result};
use crate::policy::{PolicyParams, PolicySpec, SampleMode};
use crate::seeding::{self, tag};

/// Trailing window for the smoothed training curves.
pub const MOVING_AVERAGE_WINDOW: usize = 20;

/// Mixed opponents: for each non-learning type a strategy pool and weights.
#[derive(Debug, Clone, Default)]
pub struct OpponentSampler {
    pools: [Option<Pool>; 4],
}

#[derive(Debug, Clone)]
struct Pool {
    strategies: Vec<Arc<PolicyParams>>,
    weights: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl OpponentSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every type plays its single given policy.
    pub fn fixed(policies: &PolicySet) -> Self {
        let mut s = Self::new();
        for t in AgentType::ALL {
            if let Ok(p) = policies.get(t) {
                s.add(t, vec![p.clone()], vec![1.0]).expect("singleton pool");
            }
        }
        s
    }

    pub fn add(
        &mut self,
        agent_type: AgentType,
        strategies: Vec<Arc<PolicyParams>>,
        weights: Vec<f64>,
    ) -> Result<()> {
        if strategies.is_empty() || strategies.len() != weights.len() {
            return Err(Error::contract(format!(
                "{agent_type} pool has {} strategies and {} weights",
                strategies.len(),
                weights.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::contract(format!(
                "{agent_type} mixture must be a probability vector"
            )));
        }
        if strategies.iter().any(|s| s.spec.agent_type != agent_type) {
            return Err(Error::contract(format!("{agent_type} pool holds foreign policies")));
        }
        let index = WeightedIndex::new(&weights)
            .map_err(|e| Error::contract(format!("{agent_type} mixture: {e}")))?;
        self.pools[agent_type.index()] = Some(Pool {
            strategies,
            weights,
            index,
        });
        Ok(())
    }

    pub fn weights(&self, agent_type: AgentType) -> Option<&[f64]> {
        self.pools[agent_type.index()]
            .as_ref()
            .map(|p| p.weights.as_slice())
    }

    /// Draw one pure strategy per pooled type; returns the chosen indices too.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (PolicySet, [Option<usize>; 4]) {
        let mut set = PolicySet::new();
        let mut picks = [None; 4];
        for t in AgentType::ALL {
            if let Some(pool) = &self.pools[t.index()] {
                let k = pool.index.sample(rng);
                picks[t.index()] = Some(k);
                set.set(pool.strategies[k].clone());
            }
        }
        (set, picks)
    }
}

/// Per-episode discounted returns of the tracked agents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingCurve {
    pub agents: Vec<AgentId>,
    /// `returns[episode][k]` for `agents[k]`.
    pub returns: Vec<Vec<f64>>,
}

impl TrainingCurve {
    fn push(&mut self, episode: &Episode, track: impl Fn(AgentId) -> bool) {
        if self.agents.is_empty() {
            self.agents = episode.agents.iter().copied().filter(|&a| track(a)).collect();
        }
        let all = episode.discounted_returns();
        self.returns.push(
            episode
                .agents
                .iter()
                .zip(all)
                .filter(|(a, _)| track(**a))
                .map(|(_, r)| r)
                .collect(),
        );
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn series(&self, k: usize) -> Vec<f64> {
        self.returns.iter().map(|row| row[k]).collect()
    }

    /// Per-episode mean over the tracked agents of one type.
    pub fn type_series(&self, agent_type: AgentType) -> Vec<f64> {
        let cols: Vec<usize> = (0..self.agents.len())
            .filter(|&k| self.agents[k].agent_type == agent_type)
            .collect();
        if cols.is_empty() {
            return Vec::new();
        }
        self.returns
            .iter()
            .map(|row| cols.iter().map(|&k| row[k]).sum::<f64>() / cols.len() as f64)
            .collect()
    }
}

/// Trailing mean over at most `window` values ending at each position.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(xs.len());
    let mut sum = 0.0;
    for (t, x) in xs.iter().enumerate() {
        sum += x;
        if t >= window {
            sum -= xs[t - window];
        }
        out.push(sum / (t + 1).min(window) as f64);
    }
    out
}

/// One agent type's policy together with its optimizer state.
#[derive(Debug, Clone)]
pub struct Learner {
    pub agent_type: AgentType,
    pub params: Arc<PolicyParams>,
    optimizer: Optimizer,
    updates: u64,
}

impl Learner {
    pub fn new(params: PolicyParams, config: &TrainConfig) -> Self {
        let agent_type = params.spec.agent_type;
        let optimizer = Optimizer::new(
            config.optimizer,
            config.learning_rates.get(agent_type),
            params.len(),
        );
        Self {
            agent_type,
            params: Arc::new(params),
            optimizer,
            updates: 0,
        }
    }

    /// All transitions of this learner's agents, with advantages.
    pub fn batch(&self, episodes: &[Episode], config: &TrainConfig) -> Result<Batch> {
        let mut batch = Batch::default();
        for ep in episodes {
            for (id, tr) in ep.agents.iter().zip(&ep.trajectories) {
                if id.agent_type != self.agent_type {
                    continue;
                }
                let mut dones = vec![false; tr.rewards.len()];
                if let Some(last) = dones.last_mut() {
                    *last = true;
                }
                let (adv, ret) =
                    compute_advantages(&tr.rewards, &tr.values, &dones, tr.discount, config.gae_lambda)?;
                batch.inputs.extend(tr.inputs.iter().cloned());
                batch.actions.extend(tr.actions.iter().cloned());
                batch.old_log_probs.extend(&tr.log_probs);
                batch.advantages.extend(adv);
                batch.returns.extend(ret);
            }
        }
        Ok(batch)
    }

    pub fn learn(&mut self, episodes: &[Episode], config: &TrainConfig) -> Result<UpdateStats> {
        let batch = self.batch(episodes, config)?;
        let seed = seeding::mix(&[config.seed, self.agent_type.index() as u64, self.updates]);
        let (next, stats) = ppo_update(&self.params, &batch, config, &mut self.optimizer, seed)?;
        self.params = Arc::new(next);
        self.updates += 1;
        Ok(stats)
    }
}

/// Fresh randomly initialized policies for every agent type.
pub fn initial_policies(config: &ScenarioConfig, hidden: &[usize], seed: u64) -> Result<PolicySet> {
    let mut set = PolicySet::new();
    for t in AgentType::ALL {
        let spec = PolicySpec::with_hidden(t, config, hidden.to_vec());
        set.set(Arc::new(PolicyParams::init(
            spec,
            seeding::mix(&[seed, t.index() as u64]),
        )?));
    }
    Ok(set)
}

fn collect<E, F>(
    make_env: &F,
    config: &TrainConfig,
    range: std::ops::Range<usize>,
    policies_for: impl Fn(usize) -> PolicySet + Sync,
) -> Result<Vec<Episode>>
where
    E: TrainEnv,
    F: Fn() -> Result<E> + Sync,
{
    range
        .into_par_iter()
        .map(|e| {
            let mut env = make_env()?;
            let policies = policies_for(e);
            run_episode(
                &mut env,
                &policies,
                seeding::mix(&[config.seed, tag::EPISODE, e as u64]),
                SampleMode::Stochastic,
            )
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BestResponse {
    pub policy: Arc<PolicyParams>,
    /// Returns of the learner's agents.
    pub curve: TrainingCurve,
    pub updates: Vec<UpdateStats>,
}

/// Train `initial` against opponents redrawn from `opponents` at the start
/// of every episode. Opponent parameters are only read.
pub fn train_best_response<E, F>(
    initial: PolicyParams,
    opponents: &OpponentSampler,
    make_env: &F,
    config: &TrainConfig,
) -> Result<BestResponse>
where
    E: TrainEnv,
    F: Fn() -> Result<E> + Sync,
{
    config.validate()?;
    let agent_type = initial.spec.agent_type;
    let mut learner = Learner::new(initial, config);
    let mut curve = TrainingCurve::default();
    let mut updates = Vec::new();
    let mut start = 0;
    while start < config.episodes {
        let end = (start + config.episodes_per_batch).min(config.episodes);
        let current = learner.params.clone();
        let episodes = collect(make_env, config, start..end, |e| {
            let mut rng = seeding::stream(&[tag::OPPONENT, config.seed, e as u64]);
            let (mut set, _) = opponents.sample(&mut rng);
            set.set(current.clone());
            set
        })?;
        for ep in &episodes {
            curve.push(ep, |a| a.agent_type == agent_type);
        }
        updates.push(learner.learn(&episodes, config)?);
        start = end;
    }
    Ok(BestResponse {
        policy: learner.params,
        curve,
        updates,
    })
}

#[derive(Debug, Clone)]
pub struct ImarlOutcome {
    pub policies: PolicySet,
    pub curve: TrainingCurve,
}

/// Independent learners for every agent type, all updating from one shared
/// stream of episodes.
pub fn train_imarl<E, F>(initial: &PolicySet, make_env: &F, config: &TrainConfig) -> Result<ImarlOutcome>
where
    E: TrainEnv,
    F: Fn() -> Result<E> + Sync,
{
    config.validate()?;
    let present: Vec<AgentType> = {
        let env = make_env()?;
        AgentType::ALL
            .into_iter()
            .filter(|t| env.agents().iter().any(|a| a.agent_type == *t))
            .collect()
    };
    let mut learners: Vec<Learner> = present
        .iter()
        .map(|&t| Ok(Learner::new((**initial.get(t)?).clone(), config)))
        .collect::<Result<_>>()?;
    let mut curve = TrainingCurve::default();
    let mut start = 0;
    while start < config.episodes {
        let end = (start + config.episodes_per_batch).min(config.episodes);
        let mut current = PolicySet::new();
        for l in &learners {
            current.set(l.params.clone());
        }
        let episodes = collect(make_env, config, start..end, |_| current.clone())?;
        for ep in &episodes {
            curve.push(ep, |_| true);
        }
        learners
            .par_iter_mut()
            .map(|l| l.learn(&episodes, config).map(|_| ()))
            .collect::<Result<Vec<()>>>()?;
        start = end;
    }
    let mut policies = PolicySet::new();
    for l in learners {
        policies.set(l.params);
    }
    Ok(ImarlOutcome { policies, curve })
}
