//! Discrete action grids and index decoding.

use serde::{Deserialize, Serialize};

use super::agents::{AgentId, AgentType, PerAgent};
use crate::error::{Error, Result};

/// Value grids for every discrete action; the center entry is the default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionGrids {
    /// Hours per quarter worked at one firm.
    pub labor_hours: Vec<f64>,
    /// Units requested from one firm.
    pub consumption_units: Vec<f64>,
    /// Dollars per hour.
    pub wages: Vec<f64>,
    /// Dollars per unit.
    pub prices: Vec<f64>,
    /// Interest rate per quarter.
    pub rates: Vec<f64>,
    pub tax_rates: Vec<f64>,
    /// Unnormalized credit shares; divided by their sum across households.
    pub fraction_raw: Vec<f64>,
}

impl Default for ActionGrids {
    fn default() -> Self {
        Self {
            labor_hours: vec![0.0, 240.0, 480.0, 720.0, 960.0],
            consumption_units: vec![0.0, 6.0, 12.0, 18.0, 24.0],
            wages: vec![7.25, 19.65, 32.06, 44.46, 56.87],
            prices: vec![188.0, 255.0, 322.0, 389.0, 456.0],
            rates: vec![0.0025, 0.01625, 0.03, 0.04375, 0.0575],
            tax_rates: vec![0.10, 0.1675, 0.235, 0.3025, 0.37],
            fraction_raw: vec![1.0, 2.0, 3.0, 4.0, 5.0],
        }
    }
}

/// Index of the default (center) entry of a grid.
pub fn default_index(grid: &[f64]) -> usize {
    grid.len() / 2
}

impl ActionGrids {
    fn named(&self) -> [(&'static str, &Vec<f64>); 7] {
        [
            ("grids.labor_hours", &self.labor_hours),
            ("grids.consumption_units", &self.consumption_units),
            ("grids.wages", &self.wages),
            ("grids.prices", &self.prices),
            ("grids.rates", &self.rates),
            ("grids.tax_rates", &self.tax_rates),
            ("grids.fraction_raw", &self.fraction_raw),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, grid) in self.named() {
            if grid.len() < 2 {
                return Err(Error::config(name, "grid needs at least two entries"));
            }
            if grid.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::config(name, "grid must be strictly increasing"));
            }
        }
        let nonneg = [
            ("grids.labor_hours", &self.labor_hours),
            ("grids.consumption_units", &self.consumption_units),
            ("grids.rates", &self.rates),
        ];
        for (name, grid) in nonneg {
            if grid[0] < 0.0 {
                return Err(Error::config(name, "entries must be nonnegative"));
            }
        }
        if self.wages[0] < 0.0 || self.prices[0] <= 0.0 {
            return Err(Error::config("grids.prices", "prices must be positive and wages nonnegative"));
        }
        if self.tax_rates[0] < 0.0 || *self.tax_rates.last().unwrap() > 1.0 {
            return Err(Error::config("grids.tax_rates", "tax rates must lie in [0, 1]"));
        }
        if self.fraction_raw[0] <= 0.0 {
            return Err(Error::config("grids.fraction_raw", "raw fractions must be positive"));
        }
        Ok(())
    }

    /// Categorical head sizes for one agent of the given type, in head order.
    ///
    /// Household: labor at each firm then consumption at each firm.
    /// Firm: wage then price. Central bank: rate. Government: tax rate then
    /// one credit share per household.
    pub fn action_dims(&self, agent_type: AgentType, n_households: usize, n_firms: usize) -> Vec<usize> {
        match agent_type {
            AgentType::Household => {
                let mut dims = vec![self.labor_hours.len(); n_firms];
                dims.extend(std::iter::repeat(self.consumption_units.len()).take(n_firms));
                dims
            }
            AgentType::Firm => vec![self.wages.len(), self.prices.len()],
            AgentType::CentralBank => vec![self.rates.len()],
            AgentType::Government => {
                let mut dims = vec![self.tax_rates.len()];
                dims.extend(std::iter::repeat(self.fraction_raw.len()).take(n_households));
                dims
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HouseholdAction {
    pub labor: Vec<usize>,
    pub consumption: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirmAction {
    pub wage: usize,
    pub price: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GovernmentAction {
    pub tax: usize,
    pub fractions: Vec<usize>,
}

/// Grid indices chosen by every agent for one quarter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointAction {
    pub households: Vec<HouseholdAction>,
    pub firms: Vec<FirmAction>,
    pub central_bank_rate: usize,
    pub government: GovernmentAction,
}

impl JointAction {
    /// Everyone plays the center of every grid.
    pub fn defaults(grids: &ActionGrids, n_households: usize, n_firms: usize) -> Self {
        let labor = default_index(&grids.labor_hours);
        let cons = default_index(&grids.consumption_units);
        Self {
            households: (0..n_households)
                .map(|_| HouseholdAction {
                    labor: vec![labor; n_firms],
                    consumption: vec![cons; n_firms],
                })
                .collect(),
            firms: vec![
                FirmAction {
                    wage: default_index(&grids.wages),
                    price: default_index(&grids.prices),
                };
                n_firms
            ],
            central_bank_rate: default_index(&grids.rates),
            government: GovernmentAction {
                tax: default_index(&grids.tax_rates),
                fractions: vec![default_index(&grids.fraction_raw); n_households],
            },
        }
    }

    /// Assemble from flat per-agent head indices (layout of [`ActionGrids::action_dims`]).
    pub fn from_heads(heads: &PerAgent<Vec<usize>>) -> Result<Self> {
        let n_firms = heads.firms.len();
        let n_households = heads.households.len();
        let wrong = |id: AgentId, want: usize, got: usize| Error::Decode {
            agent: id.to_string(),
            reason: format!("expected {want} action heads, got {got}"),
        };
        let mut households = Vec::with_capacity(n_households);
        for (i, h) in heads.households.iter().enumerate() {
            if h.len() != 2 * n_firms {
                return Err(wrong(AgentId::new(AgentType::Household, i), 2 * n_firms, h.len()));
            }
            households.push(HouseholdAction {
                labor: h[..n_firms].to_vec(),
                consumption: h[n_firms..].to_vec(),
            });
        }
        let mut firms = Vec::with_capacity(n_firms);
        for (j, f) in heads.firms.iter().enumerate() {
            if f.len() != 2 {
                return Err(wrong(AgentId::new(AgentType::Firm, j), 2, f.len()));
            }
            firms.push(FirmAction { wage: f[0], price: f[1] });
        }
        if heads.central_bank.len() != 1 {
            return Err(wrong(
                AgentId::new(AgentType::CentralBank, 0),
                1,
                heads.central_bank.len(),
            ));
        }
        let g = &heads.government;
        if g.len() != 1 + n_households {
            return Err(wrong(AgentId::new(AgentType::Government, 0), 1 + n_households, g.len()));
        }
        Ok(Self {
            households,
            firms,
            central_bank_rate: heads.central_bank[0],
            government: GovernmentAction {
                tax: g[0],
                fractions: g[1..].to_vec(),
            },
        })
    }

    /// Inverse of [`JointAction::from_heads`].
    pub fn to_heads(&self) -> PerAgent<Vec<usize>> {
        PerAgent {
            households: self
                .households
                .iter()
                .map(|h| h.labor.iter().chain(&h.consumption).copied().collect())
                .collect(),
            firms: self.firms.iter().map(|f| vec![f.wage, f.price]).collect(),
            central_bank: vec![self.central_bank_rate],
            government: std::iter::once(self.government.tax)
                .chain(self.government.fractions.iter().copied())
                .collect(),
        }
    }
}

/// Real-valued actions after grid lookup. Matrices are indexed `[household][firm]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedActions {
    pub labor: Vec<Vec<f64>>,
    pub consumption_requests: Vec<Vec<f64>>,
    pub wages: Vec<f64>,
    pub prices: Vec<f64>,
    pub rate: f64,
    pub tax_rate: f64,
    /// Credit shares, summing to one.
    pub credit_fractions: Vec<f64>,
}

fn lookup(grid: &[f64], index: usize, agent: AgentId, what: &str) -> Result<f64> {
    grid.get(index).copied().ok_or_else(|| Error::Decode {
        agent: agent.to_string(),
        reason: format!("{what} index {index} outside grid of size {}", grid.len()),
    })
}

/// Map grid indices to values; credit shares are normalized by their sum.
pub fn decode_actions(
    actions: &JointAction,
    grids: &ActionGrids,
    n_households: usize,
    n_firms: usize,
) -> Result<DecodedActions> {
    let gov = AgentId::new(AgentType::Government, 0);
    if actions.households.len() != n_households
        || actions.firms.len() != n_firms
        || actions.government.fractions.len() != n_households
    {
        return Err(Error::Decode {
            agent: "joint".into(),
            reason: format!(
                "action shape does not match {n_households} households and {n_firms} firms"
            ),
        });
    }
    let mut labor = Vec::with_capacity(n_households);
    let mut requests = Vec::with_capacity(n_households);
    for (i, h) in actions.households.iter().enumerate() {
        let id = AgentId::new(AgentType::Household, i);
        if h.labor.len() != n_firms || h.consumption.len() != n_firms {
            return Err(Error::Decode {
                agent: id.to_string(),
                reason: format!("need one labor and one consumption index per firm ({n_firms})"),
            });
        }
        labor.push(
            h.labor
                .iter()
                .map(|&k| lookup(&grids.labor_hours, k, id, "labor"))
                .collect::<Result<Vec<_>>>()?,
        );
        requests.push(
            h.consumption
                .iter()
                .map(|&k| lookup(&grids.consumption_units, k, id, "consumption"))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut wages = Vec::with_capacity(n_firms);
    let mut prices = Vec::with_capacity(n_firms);
    for (j, f) in actions.firms.iter().enumerate() {
        let id = AgentId::new(AgentType::Firm, j);
        wages.push(lookup(&grids.wages, f.wage, id, "wage")?);
        prices.push(lookup(&grids.prices, f.price, id, "price")?);
    }
    let rate = lookup(
        &grids.rates,
        actions.central_bank_rate,
        AgentId::new(AgentType::CentralBank, 0),
        "rate",
    )?;
    let tax_rate = lookup(&grids.tax_rates, actions.government.tax, gov, "tax")?;
    let raw = actions
        .government
        .fractions
        .iter()
        .map(|&k| lookup(&grids.fraction_raw, k, gov, "credit fraction"))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = raw.iter().sum();
    let credit_fractions = raw.iter().map(|r| r / total).collect();
    Ok(DecodedActions {
        labor,
        consumption_requests: requests,
        wages,
        prices,
        rate,
        tax_rate,
        credit_fractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decode_fractions(fr: Vec<usize>) -> Vec<f64> {
        let grids = ActionGrids::default();
        let mut a = JointAction::defaults(&grids, fr.len(), 2);
        a.government.fractions = fr;
        let n = a.households.len();
        decode_actions(&a, &grids, n, 2).unwrap().credit_fractions
    }

    #[test]
    fn fraction_normalization() {
        assert_eq!(decode_fractions(vec![1, 1]), vec![0.5, 0.5]);
        let f = decode_fractions(vec![0, 4]);
        assert!((f[0] - 1.0 / 6.0).abs() < 1e-15 && (f[1] - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn default_wage_is_grid_center() {
        let grids = ActionGrids::default();
        let a = JointAction::defaults(&grids, 2, 2);
        assert_eq!(a.firms[0].wage, 2);
        let d = decode_actions(&a, &grids, 2, 2).unwrap();
        assert_eq!(d.wages, vec![32.06, 32.06]);
        assert_eq!(d.prices, vec![322.0, 322.0]);
        assert_eq!(d.rate, 0.03);
        assert_eq!(d.tax_rate, 0.235);
    }

    #[test]
    fn out_of_range_index_names_agent() {
        let grids = ActionGrids::default();
        let mut a = JointAction::defaults(&grids, 2, 2);
        a.firms[1].price = 5;
        match decode_actions(&a, &grids, 2, 2) {
            Err(Error::Decode { agent, .. }) => assert_eq!(agent, "firm_2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn heads_round_trip() {
        let grids = ActionGrids::default();
        let mut a = JointAction::defaults(&grids, 2, 3);
        a.households[1].consumption[2] = 4;
        a.government.fractions[0] = 0;
        assert_eq!(JointAction::from_heads(&a.to_heads()).unwrap(), a);
        let dims = grids.action_dims(AgentType::Household, 2, 3);
        assert_eq!(dims.len(), a.to_heads().households[0].len());
    }
}
