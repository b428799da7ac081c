//! Policy inputs: observations scaled by fixed calibration constants,
//! followed by the agent's heterogeneity parameters.

use crate::env::{AgentId, AgentType, ScenarioConfig};

pub fn hetero_dim(agent_type: AgentType, n_firms: usize) -> usize {
    match agent_type {
        AgentType::Household => n_firms + 3,
        AgentType::Firm => 5,
        AgentType::CentralBank | AgentType::Government => 0,
    }
}

/// Skills and utility weights for households; shock, technology and
/// inventory parameters for firms; nothing for the singleton agents.
pub fn hetero_features(agent: AgentId, config: &ScenarioConfig) -> Vec<f64> {
    match agent.agent_type {
        AgentType::Household => {
            let h = &config.households[agent.index];
            let mut v = h.skills.clone();
            v.extend([h.gamma, h.nu, h.mu]);
            v
        }
        AgentType::Firm => {
            let f = &config.firms[agent.index];
            vec![f.rho, f.shock_mean, f.shock_std, f.alpha, f.inventory_risk]
        }
        AgentType::CentralBank | AgentType::Government => Vec::new(),
    }
}

/// Rescale a raw observation: prices by the default price, wages by the
/// default wage, money by a default quarter's wage bill, hours and goods by
/// the default total hours; rates, tax rates, shocks and weights stay raw.
pub fn scale_observation(agent_type: AgentType, raw: &[f64], config: &ScenarioConfig) -> Vec<f64> {
    let norm = &config.normalization;
    let (n_h, n_f) = (config.n_households(), config.n_firms());
    let money = norm.default_labor * norm.default_wage;
    let hours = norm.default_labor * n_h as f64;
    let goods_per_household = norm.default_consumption * n_h as f64;
    let p = norm.default_price;
    let w = norm.default_wage;
    match agent_type {
        AgentType::Household => {
            let mut v = Vec::with_capacity(raw.len());
            v.push(raw[0] / money);
            v.push(raw[1]);
            v.push(raw[2]);
            v.extend(raw[3..3 + n_f].iter().map(|x| x / w));
            v.extend(raw[3 + n_f..3 + 2 * n_f].iter().map(|x| x / p));
            v.push(raw[3 + 2 * n_f] / money);
            v
        }
        AgentType::Firm => vec![
            raw[0] / hours,
            raw[1] / goods_per_household,
            raw[2],
            raw[3],
            raw[4] / w,
            raw[5] / p,
            raw[6] / hours,
        ],
        AgentType::CentralBank => {
            let total_price = p * n_f as f64;
            let mut v: Vec<f64> = raw[..5].iter().map(|x| x / total_price).collect();
            v.push(raw[5] / hours);
            v
        }
        AgentType::Government => {
            let mut v = Vec::with_capacity(raw.len());
            v.push(raw[0]);
            v.extend(raw[1..1 + 2 * n_h].iter().map(|x| x / money));
            v.extend(&raw[1 + 2 * n_h..]);
            v
        }
    }
}

/// Full network input for one agent.
pub fn policy_input(agent: AgentId, raw: &[f64], config: &ScenarioConfig) -> Vec<f64> {
    let mut v = scale_observation(agent.agent_type, raw, config);
    v.extend(hetero_features(agent, config));
    v
}
