use std::sync::Arc;

use crate::env::{AgentId, AgentType, EconomyEnv, JointAction, PerAgent, ScenarioConfig, StepInfo};
use crate::error::{Error, Result};
use crate::policy::{features, PolicyParams, PolicySpec, SampleMode};
use crate::seeding::{self, tag};

/// A multi-agent episodic environment seen through policy inputs.
///
/// Agents are listed once in a fixed order; every agent of a type acts
/// through that type's policy.
pub trait TrainEnv: Send {
    fn agents(&self) -> &[AgentId];
    /// Start a new episode and return every agent's policy input.
    fn reset(&mut self, seed: u64) -> Result<Vec<Vec<f64>>>;
    fn step(&mut self, actions: &[Vec<usize>]) -> Result<EnvStep>;
    fn discount(&self, agent: usize) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvStep {
    pub inputs: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
    pub done: bool,
}

/// The economy with scaled observations and normalized rewards.
pub struct MacroEnv {
    env: EconomyEnv,
    ids: Vec<AgentId>,
    discounts: Vec<f64>,
    last_info: Option<StepInfo>,
}

impl MacroEnv {
    pub fn new(config: Arc<ScenarioConfig>) -> Result<Self> {
        let env = EconomyEnv::new(config.clone())?;
        let ids = crate::env::agent_ids(config.n_households(), config.n_firms());
        let discounts = ids
            .iter()
            .map(|id| agent_discount(&config, *id))
            .collect();
        Ok(Self {
            env,
            ids,
            discounts,
            last_info: None,
        })
    }

    pub fn economy(&self) -> &EconomyEnv {
        &self.env
    }

    /// Diagnostics of the most recent quarter.
    pub fn last_info(&self) -> Option<&StepInfo> {
        self.last_info.as_ref()
    }

    fn inputs(&self, obs: &PerAgent<Vec<f64>>) -> Vec<Vec<f64>> {
        let cfg = self.env.config();
        self.ids
            .iter()
            .map(|&id| features::policy_input(id, obs.get(id), cfg))
            .collect()
    }
}

/// Discount factor of one agent.
pub fn agent_discount(config: &ScenarioConfig, id: AgentId) -> f64 {
    match id.agent_type {
        AgentType::Household => config.households[id.index].discount,
        AgentType::Firm => config.firms[id.index].discount,
        AgentType::CentralBank => config.central_bank.discount,
        AgentType::Government => config.government.discount,
    }
}

/// Reassemble a flat canonical-order list into per-class groups.
pub fn per_agent_from_flat<T: Clone>(ids: &[AgentId], flat: &[T]) -> Result<PerAgent<T>> {
    let pick = |t: AgentType| -> Vec<T> {
        ids.iter()
            .zip(flat)
            .filter(|(id, _)| id.agent_type == t)
            .map(|(_, v)| v.clone())
            .collect()
    };
    let single = |t: AgentType| -> Result<T> {
        let v = pick(t);
        match v.len() {
            1 => Ok(v.into_iter().next().unwrap()),
            n => Err(Error::contract(format!("expected one {t}, found {n}"))),
        }
    };
    if ids.len() != flat.len() {
        return Err(Error::contract("agent list and values differ in length"));
    }
    Ok(PerAgent {
        households: pick(AgentType::Household),
        firms: pick(AgentType::Firm),
        central_bank: single(AgentType::CentralBank)?,
        government: single(AgentType::Government)?,
    })
}

impl TrainEnv for MacroEnv {
    fn agents(&self) -> &[AgentId] {
        &self.ids
    }

    fn reset(&mut self, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.last_info = None;
        let obs = self.env.reset(seed);
        Ok(self.inputs(&obs))
    }

    fn step(&mut self, actions: &[Vec<usize>]) -> Result<EnvStep> {
        let heads = per_agent_from_flat(&self.ids, actions)?;
        let joint = JointAction::from_heads(&heads)?;
        let result = self.env.step(&joint)?;
        let rewards = self
            .ids
            .iter()
            .map(|&id| *result.info.normalized_rewards.get(id))
            .collect();
        let inputs = self.inputs(&result.observations);
        self.last_info = Some(result.info);
        Ok(EnvStep {
            inputs,
            rewards,
            done: result.done,
        })
    }

    fn discount(&self, agent: usize) -> f64 {
        self.discounts[agent]
    }
}

/// One policy per agent type; types absent from an environment may be empty.
#[derive(Debug, Clone, Default)]
pub struct PolicySet {
    slots: [Option<Arc<PolicyParams>>; 4],
}

impl PolicySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, policy: Arc<PolicyParams>) -> Self {
        self.set(policy);
        self
    }

    pub fn set(&mut self, policy: Arc<PolicyParams>) {
        let k = policy.spec.agent_type.index();
        self.slots[k] = Some(policy);
    }

    pub fn get(&self, agent_type: AgentType) -> Result<&Arc<PolicyParams>> {
        self.slots[agent_type.index()]
            .as_ref()
            .ok_or_else(|| Error::contract(format!("no policy for {agent_type}")))
    }

    /// Zero-parameter policies: uniform over every action head.
    pub fn uniform(config: &ScenarioConfig) -> Self {
        let mut set = Self::new();
        for t in AgentType::ALL {
            let spec = PolicySpec::for_scenario(t, config);
            let n = spec.param_count();
            set.set(Arc::new(
                PolicyParams::from_values(spec, vec![0.0; n]).expect("valid spec"),
            ));
        }
        set
    }
}

/// Per-agent record of one episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgentTrajectory {
    pub inputs: Vec<Vec<f64>>,
    pub actions: Vec<Vec<usize>>,
    pub log_probs: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Vec<f64>,
    pub discount: f64,
}

impl AgentTrajectory {
    pub fn discounted_return(&self) -> f64 {
        crate::env::episode_return(&self.rewards, self.discount)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub agents: Vec<AgentId>,
    pub trajectories: Vec<AgentTrajectory>,
}

impl Episode {
    pub fn discounted_returns(&self) -> Vec<f64> {
        self.trajectories
            .iter()
            .map(AgentTrajectory::discounted_return)
            .collect()
    }

    /// Mean discounted return over the agents of each type, indexed by
    /// [`AgentType::index`]; `None` for types that do not appear.
    pub fn type_returns(&self) -> [Option<f64>; 4] {
        let returns = self.discounted_returns();
        let mut out = [None; 4];
        for t in AgentType::ALL {
            let vals: Vec<f64> = self
                .agents
                .iter()
                .zip(&returns)
                .filter(|(id, _)| id.agent_type == t)
                .map(|(_, r)| *r)
                .collect();
            if !vals.is_empty() {
                out[t.index()] = Some(vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
        out
    }
}

/// Play one episode. The environment seed and the action stream both
/// derive from `seed`.
pub fn run_episode<E: TrainEnv + ?Sized>(
    env: &mut E,
    policies: &PolicySet,
    seed: u64,
    mode: SampleMode,
) -> Result<Episode> {
    run_episode_observed(env, policies, seed, mode, |_| {})
}

/// [`run_episode`] with a callback after every step.
pub fn run_episode_observed<E: TrainEnv + ?Sized>(
    env: &mut E,
    policies: &PolicySet,
    seed: u64,
    mode: SampleMode,
    mut after_step: impl FnMut(&E),
) -> Result<Episode> {
    let agents = env.agents().to_vec();
    let nets: Vec<&Arc<PolicyParams>> = agents
        .iter()
        .map(|id| policies.get(id.agent_type))
        .collect::<Result<_>>()?;
    let mut rng = seeding::stream(&[tag::ACTION, seed]);
    let mut trajectories: Vec<AgentTrajectory> = (0..agents.len())
        .map(|k| AgentTrajectory {
            discount: env.discount(k),
            ..AgentTrajectory::default()
        })
        .collect();
    let mut inputs = env.reset(seeding::mix(&[tag::EPISODE, seed]))?;
    loop {
        let mut actions = Vec::with_capacity(agents.len());
        for (k, net) in nets.iter().enumerate() {
            let sample = net.act(&inputs[k], &mut rng, mode)?;
            let tr = &mut trajectories[k];
            tr.log_probs.push(sample.log_prob);
            tr.values.push(sample.value);
            actions.push(sample.indices);
        }
        let step = env.step(&actions)?;
        after_step(env);
        for (k, (x, a)) in inputs.into_iter().zip(actions).enumerate() {
            let tr = &mut trajectories[k];
            tr.inputs.push(x);
            tr.actions.push(a);
            tr.rewards.push(step.rewards[k]);
        }
        inputs = step.inputs;
        if step.done {
            break;
        }
    }
    Ok(Episode {
        agents,
        trajectories,
    })
}
