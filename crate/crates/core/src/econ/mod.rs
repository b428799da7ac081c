//! Economic primitives: parameter records, the world state, and the pure
//! dynamics and reward functions every agent type is built from.
//!
//! Everything here is a plain function of its arguments and is safe to call
//! from any thread.

mod dynamics;
mod params;
mod rewards;

use serde::{Deserialize, Serialize};

pub use dynamics::{
    allocate_consumption, compute_inflation, compute_tax_credits, evolve_production_factor,
    produce, update_inventory, update_savings, INVENTORY_TOLERANCE,
};
pub use params::{
    CentralBankParams, FirmParams, GovernmentParams, HouseholdParams, NormalizationDefaults,
};
pub use rewards::{
    central_bank_reward, firm_reward, government_reward, household_reward, household_utility,
    welfare_weight, RewardMode,
};

/// Full economy state at the start of quarter `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    /// Household savings in dollars; negative values are debt.
    pub savings: Vec<f64>,
    /// Firm inventories in units.
    pub inventory: Vec<f64>,
    pub prices: Vec<f64>,
    pub wages: Vec<f64>,
    /// Production factor of the previous quarter per firm.
    pub production_factor: Vec<f64>,
    /// Total price across firms for quarters `step-4 ..= step`, oldest first.
    pub price_history: [f64; 5],
    pub interest_rate: f64,
    pub tax_rate: f64,
    /// Tax credit each household receives this quarter.
    pub credits: Vec<f64>,
    pub step: usize,
}

impl WorldState {
    pub fn total_price(&self) -> f64 {
        self.prices.iter().sum()
    }
}
