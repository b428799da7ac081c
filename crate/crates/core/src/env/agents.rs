use std::fmt;

use serde::{Deserialize, Serialize};

/// The four agent classes of the economy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentType {
    Household,
    Firm,
    CentralBank,
    Government,
}

impl AgentType {
    pub const ALL: [AgentType; 4] = [
        AgentType::Household,
        AgentType::Firm,
        AgentType::CentralBank,
        AgentType::Government,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentType::Household => "household",
            AgentType::Firm => "firm",
            AgentType::CentralBank => "central_bank",
            AgentType::Government => "government",
        }
    }

    /// Position in [`AgentType::ALL`]; also the player index in empirical games.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Raw observation length given `I` households and `J` firms.
    pub fn obs_dim(self, n_households: usize, n_firms: usize) -> usize {
        match self {
            AgentType::Household => 4 + 2 * n_firms,
            AgentType::Firm => 7,
            AgentType::CentralBank => 6,
            AgentType::Government => 1 + 3 * n_households,
        }
    }

    pub fn count(self, n_households: usize, n_firms: usize) -> usize {
        match self {
            AgentType::Household => n_households,
            AgentType::Firm => n_firms,
            AgentType::CentralBank | AgentType::Government => 1,
        }
    }
}

impl fmt::Display for AgentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One agent: its class and its index within the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentId {
    pub agent_type: AgentType,
    pub index: usize,
}

impl AgentId {
    pub fn new(agent_type: AgentType, index: usize) -> Self {
        Self { agent_type, index }
    }
}

impl fmt::Display for AgentId {
    /// Human-facing labels are 1-based (`household_1`, `firm_2`, ...).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.agent_type {
            AgentType::CentralBank | AgentType::Government => f.write_str(self.agent_type.name()),
            t => write!(f, "{}_{}", t.name(), self.index + 1),
        }
    }
}

/// A value for every agent, grouped by class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerAgent<T> {
    pub households: Vec<T>,
    pub firms: Vec<T>,
    pub central_bank: T,
    pub government: T,
}

impl<T> PerAgent<T> {
    pub fn get(&self, id: AgentId) -> &T {
        match id.agent_type {
            AgentType::Household => &self.households[id.index],
            AgentType::Firm => &self.firms[id.index],
            AgentType::CentralBank => &self.central_bank,
            AgentType::Government => &self.government,
        }
    }

    pub fn get_mut(&mut self, id: AgentId) -> &mut T {
        match id.agent_type {
            AgentType::Household => &mut self.households[id.index],
            AgentType::Firm => &mut self.firms[id.index],
            AgentType::CentralBank => &mut self.central_bank,
            AgentType::Government => &mut self.government,
        }
    }

    pub fn ids(&self) -> Vec<AgentId> {
        agent_ids(self.households.len(), self.firms.len())
    }

    /// Agents in canonical order: households, firms, central bank, government.
    pub fn iter(&self) -> impl Iterator<Item = (AgentId, &T)> {
        let h = self
            .households
            .iter()
            .enumerate()
            .map(|(i, v)| (AgentId::new(AgentType::Household, i), v));
        let f = self
            .firms
            .iter()
            .enumerate()
            .map(|(j, v)| (AgentId::new(AgentType::Firm, j), v));
        h.chain(f)
            .chain(std::iter::once((
                AgentId::new(AgentType::CentralBank, 0),
                &self.central_bank,
            )))
            .chain(std::iter::once((
                AgentId::new(AgentType::Government, 0),
                &self.government,
            )))
    }

    pub fn of_type(&self, agent_type: AgentType) -> Vec<&T> {
        match agent_type {
            AgentType::Household => self.households.iter().collect(),
            AgentType::Firm => self.firms.iter().collect(),
            AgentType::CentralBank => vec![&self.central_bank],
            AgentType::Government => vec![&self.government],
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(AgentId, &T) -> U) -> PerAgent<U> {
        PerAgent {
            households: self
                .households
                .iter()
                .enumerate()
                .map(|(i, v)| f(AgentId::new(AgentType::Household, i), v))
                .collect(),
            firms: self
                .firms
                .iter()
                .enumerate()
                .map(|(j, v)| f(AgentId::new(AgentType::Firm, j), v))
                .collect(),
            central_bank: f(AgentId::new(AgentType::CentralBank, 0), &self.central_bank),
            government: f(AgentId::new(AgentType::Government, 0), &self.government),
        }
    }

    pub fn len(&self) -> usize {
        self.households.len() + self.firms.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl<T: Clone> PerAgent<T> {
    pub fn filled(n_households: usize, n_firms: usize, value: T) -> Self {
        Self {
            households: vec![value.clone(); n_households],
            firms: vec![value.clone(); n_firms],
            central_bank: value.clone(),
            government: value,
        }
    }
}

/// Canonical agent ordering for a population.
pub fn agent_ids(n_households: usize, n_firms: usize) -> Vec<AgentId> {
    let mut ids: Vec<AgentId> = (0..n_households)
        .map(|i| AgentId::new(AgentType::Household, i))
        .collect();
    ids.extend((0..n_firms).map(|j| AgentId::new(AgentType::Firm, j)));
    ids.push(AgentId::new(AgentType::CentralBank, 0));
    ids.push(AgentId::new(AgentType::Government, 0));
    ids
}
