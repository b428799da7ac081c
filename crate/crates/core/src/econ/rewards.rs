//! Per-agent rewards in raw and normalized units.

use serde::{Deserialize, Serialize};

use super::params::{
    CentralBankParams, FirmParams, GovernmentParams, HouseholdParams, NormalizationDefaults,
};

/// Whether rewards are reported in raw currency/unit terms or rescaled by
/// the calibration defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    Raw,
    Normalized,
}

fn isoelastic(x: f64, gamma: f64) -> f64 {
    x.powf(1.0 - gamma) / (1.0 - gamma)
}

/// `c^(1-g)/(1-g) - nu n^2 + mu sign(m) |m|^(1-g)/(1-g)`.
pub fn household_utility(c: f64, n: f64, m: f64, params: &HouseholdParams) -> f64 {
    let g = params.gamma;
    let savings = if m == 0.0 {
        0.0
    } else {
        m.signum() * isoelastic(m.abs(), g)
    };
    isoelastic(c, g) - params.nu * n * n + params.mu * savings
}

/// Sum of per-firm utilities with the shared end-of-quarter savings.
///
/// In normalized mode labor is divided by the default hours and savings by
/// the default quarterly wage bill across firms times the mean current price.
pub fn household_reward(
    consumption: &[f64],
    labor: &[f64],
    next_savings: f64,
    params: &HouseholdParams,
    mode: RewardMode,
    norm: &NormalizationDefaults,
    current_prices: &[f64],
) -> f64 {
    let (labor_scale, savings) = match mode {
        RewardMode::Raw => (1.0, next_savings),
        RewardMode::Normalized => {
            let n_firms = current_prices.len() as f64;
            let wage_bill = norm.default_labor * norm.default_wage * n_firms;
            let mean_price = current_prices.iter().sum::<f64>() / n_firms;
            (norm.default_labor, next_savings / (wage_bill * mean_price))
        }
    };
    consumption
        .iter()
        .zip(labor)
        .map(|(&c, &n)| household_utility(c, n / labor_scale, savings, params))
        .sum()
}

/// Revenue minus wage bill minus inventory risk.
#[allow(clippy::too_many_arguments)]
pub fn firm_reward(
    price: f64,
    wage: f64,
    total_consumption: f64,
    skilled_labor: f64,
    next_inventory: f64,
    params: &FirmParams,
    mode: RewardMode,
    norm: &NormalizationDefaults,
    n_households: usize,
) -> f64 {
    let revenue = price * total_consumption;
    let wages = wage * skilled_labor;
    let risk = params.inventory_risk * price * next_inventory;
    match mode {
        RewardMode::Raw => revenue - wages - risk,
        RewardMode::Normalized => {
            let households = n_households as f64;
            let labor_total = norm.default_labor * households;
            let revenue_scale = norm.default_price * norm.default_consumption * households;
            let wage_scale = norm.default_wage * labor_total;
            let inventory_scale = norm.default_price
                * (params.shock_mean + 10.0 * params.shock_std).exp()
                * labor_total;
            revenue / revenue_scale - wages / wage_scale - risk / inventory_scale
        }
    }
}

/// Quadratic inflation-targeting loss plus a production bonus.
pub fn central_bank_reward(
    inflation: f64,
    total_production: f64,
    params: &CentralBankParams,
    mode: RewardMode,
    firm_alphas: &[f64],
    n_households: usize,
    norm: &NormalizationDefaults,
) -> f64 {
    let production = match mode {
        RewardMode::Raw => total_production,
        RewardMode::Normalized => {
            let labor_total = norm.default_labor * n_households as f64;
            let reference: f64 = firm_alphas.iter().map(|a| labor_total.powf(*a)).sum();
            total_production / reference
        }
    };
    let gap = inflation - params.target_inflation;
    -gap * gap + params.production_weight * production * production
}

/// Social-welfare weight of a household as a function of its savings.
pub fn welfare_weight(savings: f64, params: &GovernmentParams) -> f64 {
    if savings > 0.0 {
        params
            .weight_floor
            .max(-params.weight_slope * savings + params.weight_intercept)
    } else {
        params
            .weight_cap
            .min(-2.0 * params.weight_slope * savings + params.weight_intercept)
    }
}

/// Weighted sum of household rewards.
pub fn government_reward(weights: &[f64], household_rewards: &[f64]) -> f64 {
    weights
        .iter()
        .zip(household_rewards)
        .map(|(l, r)| l * r)
        .sum()
}
