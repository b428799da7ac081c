//! State transitions: rationing, savings, production and inventory.

use crate::error::{Error, Result};

/// Slack allowed when checking that inventories stay nonnegative.
pub const INVENTORY_TOLERANCE: f64 = 1e-9;

/// Ration one firm's inventory among requesting households.
///
/// Each household receives `min(request, inventory * request / total)`; a
/// quarter with no requests allocates nothing.
pub fn allocate_consumption(requests: &[f64], inventory: f64) -> Result<Vec<f64>> {
    if !(inventory >= 0.0 && inventory.is_finite()) {
        return Err(Error::contract(format!(
            "inventory must be finite and nonnegative, got {inventory}"
        )));
    }
    if let Some(r) = requests.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::contract(format!(
            "consumption requests must be finite and nonnegative, got {r}"
        )));
    }
    let total: f64 = requests.iter().sum();
    if total == 0.0 {
        return Ok(vec![0.0; requests.len()]);
    }
    Ok(requests
        .iter()
        .map(|&r| r.min(inventory * (r / total)))
        .collect())
}

/// Next-quarter savings: interest on the current balance, net labor income
/// after tax, minus spending, plus the tax credit.
pub fn update_savings(
    savings: f64,
    rate: f64,
    labor_income: &[f64],
    consumption_cost: &[f64],
    tax_rate: f64,
    credit: f64,
) -> f64 {
    debug_assert_eq!(labor_income.len(), consumption_cost.len());
    let income: f64 = labor_income.iter().sum();
    let net_flows: f64 = labor_income
        .iter()
        .zip(consumption_cost)
        .map(|(i, c)| i - c)
        .sum();
    (1.0 + rate) * savings + net_flows - tax_rate * income + credit
}

/// Log-autoregressive production factor: `prev^rho * exp(shock)`.
pub fn evolve_production_factor(prev: f64, rho: f64, shock: f64) -> Result<f64> {
    if !(prev > 0.0) {
        return Err(Error::contract(format!(
            "production factor must be positive, got {prev}"
        )));
    }
    Ok(prev.powf(rho) * shock.exp())
}

/// Cobb-Douglas output from skilled labor hours.
pub fn produce(factor: f64, skilled_labor: f64, alpha: f64) -> f64 {
    factor * skilled_labor.powf(alpha)
}

/// Carry inventory forward. Tiny negative residue from rounding is clamped.
pub fn update_inventory(inventory: f64, produced: f64, consumed: f64) -> Result<f64> {
    let next = inventory + produced - consumed;
    if next < -INVENTORY_TOLERANCE * (1.0 + inventory.abs() + produced.abs()) {
        return Err(Error::Internal(format!(
            "inventory would go negative: {inventory} + {produced} - {consumed} = {next}"
        )));
    }
    Ok(next.max(0.0))
}

/// Gross annual inflation from five quarterly total prices (oldest first).
pub fn compute_inflation(price_history: &[f64; 5]) -> Result<f64> {
    if let Some(p) = price_history.iter().find(|p| !(**p > 0.0)) {
        return Err(Error::contract(format!(
            "price history entries must be positive, got {p}"
        )));
    }
    Ok(price_history[4] / price_history[0])
}

/// Tax credits paid next quarter: `xi * fraction_i * total_tax`.
pub fn compute_tax_credits(fractions: &[f64], total_tax: f64, xi: f64) -> Result<Vec<f64>> {
    if fractions.iter().any(|f| !(*f >= 0.0)) {
        return Err(Error::contract("credit fractions must be nonnegative"));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::contract(format!(
            "credit fractions must sum to 1, got {sum}"
        )));
    }
    Ok(fractions.iter().map(|f| xi * f * total_tax).collect())
}
