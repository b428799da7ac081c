//! Episodic multi-agent economy.
//!
//! One call to [`EconomyEnv::step`] is one quarter. Goods produced in a
//! quarter join the inventory at its end, so households ration the inventory
//! carried in from the previous quarter.

mod agents;
mod config;
mod grids;

use std::sync::Arc;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use agents::{agent_ids, AgentId, AgentType, PerAgent};
pub use config::ScenarioConfig;
pub use grids::{
    decode_actions, default_index, ActionGrids, DecodedActions, FirmAction, GovernmentAction,
    HouseholdAction, JointAction,
};

use crate::econ::{self, RewardMode, WorldState};
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

/// Raw (unscaled) observation vectors for every agent.
pub type JointObservation = PerAgent<Vec<f64>>;

/// Everything that happened in one quarter, in the units the dynamics use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub step: usize,
    pub decoded: DecodedActions,
    /// Prices, wages, rate and tax rate in effect during the quarter.
    pub prices: Vec<f64>,
    pub wages: Vec<f64>,
    pub interest_rate: f64,
    pub tax_rate: f64,
    pub credits: Vec<f64>,
    pub shocks: Vec<f64>,
    pub production_factor: Vec<f64>,
    pub production: Vec<f64>,
    pub total_production: f64,
    /// `sum_i n_ij * omega_ij` per firm.
    pub skilled_labor: Vec<Vec<f64>>,
    /// Realized consumption `[household][firm]`.
    pub realized_consumption: Vec<Vec<f64>>,
    pub inventory_before: Vec<f64>,
    pub inventory_after: Vec<f64>,
    pub savings_before: Vec<f64>,
    pub savings_after: Vec<f64>,
    pub tax_paid: Vec<f64>,
    pub total_tax: f64,
    pub next_credits: Vec<f64>,
    pub inflation: f64,
    pub welfare_weights: Vec<f64>,
    pub raw_rewards: PerAgent<f64>,
    pub normalized_rewards: PerAgent<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// Observations at the start of the next quarter.
    pub observations: JointObservation,
    pub rewards: PerAgent<f64>,
    pub done: bool,
    pub info: StepInfo,
}

/// Aggregates from the previous quarter that appear in observations.
#[derive(Debug, Clone, Default)]
struct Carry {
    skilled_labor: Vec<f64>,
    consumption: Vec<f64>,
    total_production: f64,
    tax_paid: Vec<f64>,
}

/// A single-threaded economy instance; many may run in parallel over one
/// shared config.
#[derive(Debug, Clone)]
pub struct EconomyEnv {
    config: Arc<ScenarioConfig>,
    seed: u64,
    state: WorldState,
    carry: Carry,
    shocks: Vec<f64>,
    done: bool,
}

impl EconomyEnv {
    pub fn new(config: Arc<ScenarioConfig>) -> Result<Self> {
        config.validate()?;
        let mut env = Self {
            state: initial_state(&config),
            config,
            seed: 0,
            carry: Carry::default(),
            shocks: Vec::new(),
            done: false,
        };
        let seed = env.config.seed;
        env.reset(seed);
        Ok(env)
    }

    pub fn config(&self) -> &Arc<ScenarioConfig> {
        &self.config
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Zero savings and inventories, default prices, wages, rate and tax,
    /// no credits, unit production factors.
    pub fn reset(&mut self, seed: u64) -> JointObservation {
        let (i, j) = (self.config.n_households(), self.config.n_firms());
        self.seed = seed;
        self.state = initial_state(&self.config);
        self.carry = Carry {
            skilled_labor: vec![0.0; j],
            consumption: vec![0.0; j],
            total_production: 0.0,
            tax_paid: vec![0.0; i],
        };
        self.done = false;
        self.shocks = self.draw_shocks(0);
        self.observe()
    }

    /// Exogenous shock for `firm` in quarter `step`. The first quarter uses
    /// the initial unit factor, so its shock is zero.
    pub fn shock(&self, firm: usize, step: usize) -> f64 {
        if step == 0 {
            return 0.0;
        }
        let params = &self.config.firms[firm];
        if params.shock_std == 0.0 {
            return params.shock_mean;
        }
        let mut rng = seeding::stream(&[tag::SHOCK, self.seed, firm as u64, step as u64]);
        Normal::new(params.shock_mean, params.shock_std)
            .expect("validated shock std")
            .sample(&mut rng)
    }

    fn draw_shocks(&self, step: usize) -> Vec<f64> {
        (0..self.config.n_firms()).map(|j| self.shock(j, step)).collect()
    }

    fn observe(&self) -> JointObservation {
        let s = &self.state;
        let cfg = &self.config;
        let (n_h, n_f) = (cfg.n_households(), cfg.n_firms());
        let households = (0..n_h)
            .map(|i| {
                let mut o = Vec::with_capacity(3 + 2 * n_f);
                o.extend([s.credits[i], s.tax_rate, s.interest_rate]);
                o.extend(&s.wages);
                o.extend(&s.prices);
                o.push(s.savings[i]);
                o
            })
            .collect();
        let firms = (0..n_f)
            .map(|j| {
                vec![
                    self.carry.skilled_labor[j],
                    self.carry.consumption[j],
                    self.shocks[j],
                    s.production_factor[j],
                    s.wages[j],
                    s.prices[j],
                    s.inventory[j],
                ]
            })
            .collect();
        let mut central_bank = s.price_history.to_vec();
        central_bank.push(self.carry.total_production);
        let mut government = Vec::with_capacity(1 + 3 * n_h);
        government.push(s.tax_rate);
        government.extend(&s.credits);
        government.extend(&self.carry.tax_paid);
        government.extend(
            s.savings
                .iter()
                .map(|&m| econ::welfare_weight(m, &cfg.government)),
        );
        PerAgent {
            households,
            firms,
            central_bank,
            government,
        }
    }

    /// Advance one quarter.
    pub fn step(&mut self, actions: &JointAction) -> Result<StepResult> {
        if self.done {
            return Err(Error::contract("step called on a finished episode"));
        }
        let cfg = Arc::clone(&self.config);
        let (n_h, n_f) = (cfg.n_households(), cfg.n_firms());
        let decoded = decode_actions(actions, &cfg.grids, n_h, n_f)?;
        let s = &self.state;

        // Production with this quarter's labor.
        let mut skilled_labor = vec![vec![0.0; n_f]; n_h];
        let mut factor = Vec::with_capacity(n_f);
        let mut production = Vec::with_capacity(n_f);
        for (j, firm) in cfg.firms.iter().enumerate() {
            for (i, hh) in cfg.households.iter().enumerate() {
                skilled_labor[i][j] = decoded.labor[i][j] * hh.skills[j];
            }
            let labor_j: f64 = skilled_labor.iter().map(|row| row[j]).sum();
            let eps = econ::evolve_production_factor(
                s.production_factor[j],
                firm.rho,
                self.shocks[j],
            )?;
            production.push(econ::produce(eps, labor_j, firm.alpha));
            factor.push(eps);
        }

        // Ration the carried-in inventory, then book this quarter's output.
        let mut realized = vec![vec![0.0; n_f]; n_h];
        let mut inventory_after = Vec::with_capacity(n_f);
        for j in 0..n_f {
            let requests: Vec<f64> = decoded.consumption_requests.iter().map(|r| r[j]).collect();
            let alloc = econ::allocate_consumption(&requests, s.inventory[j])?;
            let consumed: f64 = alloc.iter().sum();
            for (i, c) in alloc.into_iter().enumerate() {
                realized[i][j] = c;
            }
            inventory_after.push(econ::update_inventory(s.inventory[j], production[j], consumed)?);
        }

        // Household budgets at the current rate, tax and credit.
        let mut savings_after = Vec::with_capacity(n_h);
        let mut tax_paid = Vec::with_capacity(n_h);
        for i in 0..n_h {
            let income: Vec<f64> = (0..n_f).map(|j| skilled_labor[i][j] * s.wages[j]).collect();
            let cost: Vec<f64> = (0..n_f).map(|j| realized[i][j] * s.prices[j]).collect();
            tax_paid.push(s.tax_rate * income.iter().sum::<f64>());
            savings_after.push(econ::update_savings(
                s.savings[i],
                s.interest_rate,
                &income,
                &cost,
                s.tax_rate,
                s.credits[i],
            ));
        }
        let total_tax: f64 = tax_paid.iter().sum();
        let next_credits = econ::compute_tax_credits(
            &decoded.credit_fractions,
            total_tax,
            cfg.government.redistribution_fraction,
        )?;
        let inflation = econ::compute_inflation(&s.price_history)?;
        let total_production: f64 = production.iter().sum();
        let welfare_weights: Vec<f64> = s
            .savings
            .iter()
            .map(|&m| econ::welfare_weight(m, &cfg.government))
            .collect();

        let firm_labor: Vec<f64> = (0..n_f)
            .map(|j| skilled_labor.iter().map(|row| row[j]).sum())
            .collect();
        let firm_consumption: Vec<f64> = (0..n_f)
            .map(|j| realized.iter().map(|row| row[j]).sum())
            .collect();
        let alphas: Vec<f64> = cfg.firms.iter().map(|f| f.alpha).collect();
        let rewards_in = |mode: RewardMode| -> PerAgent<f64> {
            let households: Vec<f64> = (0..n_h)
                .map(|i| {
                    econ::household_reward(
                        &realized[i],
                        &decoded.labor[i],
                        savings_after[i],
                        &cfg.households[i],
                        mode,
                        &cfg.normalization,
                        &s.prices,
                    )
                })
                .collect();
            let firms = (0..n_f)
                .map(|j| {
                    econ::firm_reward(
                        s.prices[j],
                        s.wages[j],
                        firm_consumption[j],
                        firm_labor[j],
                        inventory_after[j],
                        &cfg.firms[j],
                        mode,
                        &cfg.normalization,
                        n_h,
                    )
                })
                .collect();
            let central_bank = econ::central_bank_reward(
                inflation,
                total_production,
                &cfg.central_bank,
                mode,
                &alphas,
                n_h,
                &cfg.normalization,
            );
            let government = econ::government_reward(&welfare_weights, &households);
            PerAgent {
                households,
                firms,
                central_bank,
                government,
            }
        };
        let raw_rewards = rewards_in(RewardMode::Raw);
        let normalized_rewards = rewards_in(RewardMode::Normalized);
        let rewards = match cfg.reward_mode() {
            RewardMode::Raw => raw_rewards.clone(),
            RewardMode::Normalized => normalized_rewards.clone(),
        };

        let info = StepInfo {
            step: s.step,
            prices: s.prices.clone(),
            wages: s.wages.clone(),
            interest_rate: s.interest_rate,
            tax_rate: s.tax_rate,
            credits: s.credits.clone(),
            shocks: self.shocks.clone(),
            production_factor: factor.clone(),
            production,
            total_production,
            skilled_labor,
            realized_consumption: realized,
            inventory_before: s.inventory.clone(),
            inventory_after: inventory_after.clone(),
            savings_before: s.savings.clone(),
            savings_after: savings_after.clone(),
            tax_paid: tax_paid.clone(),
            total_tax,
            next_credits: next_credits.clone(),
            inflation,
            welfare_weights,
            raw_rewards,
            normalized_rewards,
            decoded,
        };

        // Install next-quarter state.
        let s = &mut self.state;
        s.savings = savings_after;
        s.inventory = inventory_after;
        s.production_factor = factor;
        s.credits = next_credits;
        s.prices = info.decoded.prices.clone();
        s.wages = info.decoded.wages.clone();
        s.interest_rate = info.decoded.rate;
        s.tax_rate = info.decoded.tax_rate;
        s.price_history.rotate_left(1);
        s.price_history[4] = s.prices.iter().sum();
        s.step += 1;
        self.carry = Carry {
            skilled_labor: firm_labor,
            consumption: firm_consumption,
            total_production,
            tax_paid,
        };
        self.done = s.step >= cfg.horizon;
        let next_step = s.step;
        self.shocks = self.draw_shocks(next_step);

        Ok(StepResult {
            observations: self.observe(),
            rewards,
            done: self.done,
            info,
        })
    }
}

fn initial_state(cfg: &ScenarioConfig) -> WorldState {
    let (n_h, n_f) = (cfg.n_households(), cfg.n_firms());
    let g = &cfg.grids;
    let price = g.prices[default_index(&g.prices)];
    let wage = g.wages[default_index(&g.wages)];
    WorldState {
        savings: vec![0.0; n_h],
        inventory: vec![0.0; n_f],
        prices: vec![price; n_f],
        wages: vec![wage; n_f],
        production_factor: vec![1.0; n_f],
        price_history: [price * n_f as f64; 5],
        interest_rate: g.rates[default_index(&g.rates)],
        tax_rate: g.tax_rates[default_index(&g.tax_rates)],
        credits: vec![0.0; n_h],
        step: 0,
    }
}

/// Discounted sum `sum_t discount^t * r_t`.
pub fn episode_return(rewards: &[f64], discount: f64) -> f64 {
    rewards
        .iter()
        .rev()
        .fold(0.0, |acc, r| r + discount * acc)
}
