//! Agent parameter records and calibration defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(cond: bool, field: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

/// Household heterogeneity: skills per firm plus utility curvature and weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseholdParams {
    /// Skill multiplier at each firm.
    pub skills: Vec<f64>,
    /// Isoelastic curvature, strictly inside (0, 1).
    pub gamma: f64,
    /// Weight on the quadratic labor disutility.
    pub nu: f64,
    /// Weight on the savings utility.
    pub mu: f64,
    pub discount: f64,
}

impl HouseholdParams {
    pub fn with_skills(skills: Vec<f64>) -> Self {
        Self {
            skills,
            gamma: 0.33,
            nu: 0.5,
            mu: 0.1,
            discount: 0.99,
        }
    }

    pub fn validate(&self, n_firms: usize) -> Result<()> {
        check(
            self.skills.len() == n_firms,
            "household.skills",
            "one skill per firm required",
        )?;
        check(
            self.skills.iter().all(|s| s.is_finite() && *s > 0.0),
            "household.skills",
            "skills must be strictly positive",
        )?;
        check(
            self.gamma > 0.0 && self.gamma < 1.0,
            "household.gamma",
            "gamma must lie strictly inside (0, 1)",
        )?;
        check(self.nu >= 0.0, "household.nu", "nu must be nonnegative")?;
        check(self.mu >= 0.0, "household.mu", "mu must be nonnegative")?;
        check(
            (0.0..1.0).contains(&self.discount),
            "household.discount",
            "discount must lie in [0, 1)",
        )
    }
}

/// Firm sector: shock process, technology and inventory aversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmParams {
    /// Autocorrelation of the log production factor.
    pub rho: f64,
    pub shock_mean: f64,
    pub shock_std: f64,
    /// Production elasticity of skilled labor.
    pub alpha: f64,
    /// Inventory-risk weight.
    pub inventory_risk: f64,
    pub discount: f64,
}

impl Default for FirmParams {
    fn default() -> Self {
        Self {
            rho: 0.97,
            shock_mean: 0.0,
            shock_std: 0.1,
            alpha: 2.0 / 3.0,
            inventory_risk: 0.1,
            discount: 0.99,
        }
    }
}

impl FirmParams {
    pub fn validate(&self) -> Result<()> {
        check((0.0..=1.0).contains(&self.rho), "firm.rho", "rho must lie in [0, 1]")?;
        check(self.shock_mean.is_finite(), "firm.shock_mean", "must be finite")?;
        check(
            self.shock_std >= 0.0 && self.shock_std.is_finite(),
            "firm.shock_std",
            "shock_std must be nonnegative",
        )?;
        check(
            self.alpha > 0.0 && self.alpha <= 1.0,
            "firm.alpha",
            "alpha must lie in (0, 1]",
        )?;
        check(
            self.inventory_risk >= 0.0,
            "firm.inventory_risk",
            "inventory_risk must be nonnegative",
        )?;
        check(
            (0.0..1.0).contains(&self.discount),
            "firm.discount",
            "discount must lie in [0, 1)",
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralBankParams {
    /// Annual gross inflation target (e.g. 1.02).
    pub target_inflation: f64,
    /// Weight of the production term relative to inflation targeting.
    pub production_weight: f64,
    pub discount: f64,
}

impl Default for CentralBankParams {
    fn default() -> Self {
        Self {
            target_inflation: 1.02,
            production_weight: 0.25,
            discount: 0.99,
        }
    }
}

impl CentralBankParams {
    pub fn validate(&self) -> Result<()> {
        check(
            self.target_inflation.is_finite(),
            "central_bank.target_inflation",
            "must be finite",
        )?;
        check(
            self.production_weight > 0.0,
            "central_bank.production_weight",
            "production_weight must be positive",
        )?;
        check(
            (0.0..1.0).contains(&self.discount),
            "central_bank.discount",
            "discount must lie in [0, 1)",
        )
    }
}

/// Government redistribution share and the savings-dependent welfare weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GovernmentParams {
    /// Share of collected taxes paid back as credits.
    pub redistribution_fraction: f64,
    pub weight_slope: f64,
    pub weight_intercept: f64,
    pub weight_floor: f64,
    pub weight_cap: f64,
    pub discount: f64,
}

impl Default for GovernmentParams {
    fn default() -> Self {
        Self {
            redistribution_fraction: 0.1,
            weight_slope: 1.0,
            weight_intercept: 1.2,
            weight_floor: 1e-3,
            weight_cap: 3.2,
            discount: 0.99,
        }
    }
}

impl GovernmentParams {
    pub fn validate(&self) -> Result<()> {
        check(
            (0.0..=1.0).contains(&self.redistribution_fraction),
            "government.redistribution_fraction",
            "must lie in [0, 1]",
        )?;
        check(
            self.weight_slope > 0.0,
            "government.weight_slope",
            "must be positive",
        )?;
        check(
            self.weight_intercept > 0.0,
            "government.weight_intercept",
            "must be positive",
        )?;
        check(
            self.weight_floor > 0.0,
            "government.weight_floor",
            "must be positive",
        )?;
        check(
            self.weight_cap > self.weight_floor,
            "government.weight_cap",
            "must exceed weight_floor",
        )?;
        check(
            self.weight_intercept >= self.weight_floor && self.weight_intercept <= self.weight_cap,
            "government.weight_intercept",
            "must lie between weight_floor and weight_cap",
        )?;
        check(
            (0.0..1.0).contains(&self.discount),
            "government.discount",
            "discount must lie in [0, 1)",
        )
    }
}

/// Default labor, consumption, price and wage used to scale rewards and
/// observations (the centers of the action grids).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationDefaults {
    pub default_labor: f64,
    pub default_consumption: f64,
    pub default_price: f64,
    pub default_wage: f64,
}

impl Default for NormalizationDefaults {
    fn default() -> Self {
        Self {
            default_labor: 480.0,
            default_consumption: 12.0,
            default_price: 322.0,
            default_wage: 32.06,
        }
    }
}

impl NormalizationDefaults {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.default_labor,
            self.default_consumption,
            self.default_price,
            self.default_wage,
        ];
        check(
            all.iter().all(|v| v.is_finite() && *v > 0.0),
            "normalization",
            "all defaults must be strictly positive",
        )
    }
}
