//! CSV record types written by the harness.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::env::{AgentId, AgentType, StepInfo};
use crate::error::{Error, Result};

/// Bumped whenever a column changes.
pub const LOG_SCHEMA_VERSION: u32 = 1;

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_error(path, e)))
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
}

fn split(s: &str, path: &Path) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|x| {
            x.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                reason: format!("bad number {x:?}"),
            })
        })
        .collect()
}

fn pairs(items: impl IntoIterator<Item = (String, f64)>) -> String {
    items
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// One training episode of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub scheme: String,
    pub epoch: usize,
    pub episode: usize,
    pub agent_id: String,
    pub agent_type: String,
    pub discounted_return: f64,
    pub moving_avg: f64,
}

/// One agent in one evaluated quarter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentStepRow {
    pub schema: u32,
    pub episode: usize,
    pub step: usize,
    pub agent_id: String,
    pub agent_type: String,
    /// Decoded actions as `name=value` pairs separated by `;`.
    pub action: String,
    /// Key observations as `name=value` pairs separated by `;`.
    pub observation: String,
    pub raw_reward: f64,
    pub normalized_reward: f64,
    pub inflation: f64,
    pub total_production: f64,
    pub total_tax: f64,
    /// Household: goods received; firm: goods sold; others: all goods sold.
    pub consumption: f64,
}

/// Economy-wide aggregates of one evaluated quarter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterRow {
    pub schema: u32,
    pub episode: usize,
    pub step: usize,
    pub inflation: f64,
    pub interest_rate: f64,
    /// Rate chosen this quarter, in effect next quarter.
    pub next_interest_rate: f64,
    pub tax_rate: f64,
    pub total_production: f64,
    pub total_tax: f64,
    /// Per-firm values separated by `;`.
    pub prices: String,
    pub wages: String,
    pub sold: String,
}

/// Parsed form of [`QuarterRow`] used by the stylized-fact checks.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarterRecord {
    pub episode: usize,
    pub step: usize,
    pub inflation: f64,
    pub interest_rate: f64,
    pub next_interest_rate: f64,
    pub prices: Vec<f64>,
    pub sold: Vec<f64>,
}

impl QuarterRecord {
    pub fn from_info(episode: usize, info: &StepInfo) -> Self {
        Self {
            episode,
            step: info.step,
            inflation: info.inflation,
            interest_rate: info.interest_rate,
            next_interest_rate: info.decoded.rate,
            prices: info.prices.clone(),
            sold: firm_sales(info),
        }
    }

    pub fn to_row(&self, info: &StepInfo) -> QuarterRow {
        QuarterRow {
            schema: LOG_SCHEMA_VERSION,
            episode: self.episode,
            step: self.step,
            inflation: self.inflation,
            interest_rate: self.interest_rate,
            next_interest_rate: self.next_interest_rate,
            tax_rate: info.tax_rate,
            total_production: info.total_production,
            total_tax: info.total_tax,
            prices: join(&self.prices),
            wages: join(&info.wages),
            sold: join(&self.sold),
        }
    }

    pub fn from_row(row: &QuarterRow, path: &Path) -> Result<Self> {
        if row.schema != LOG_SCHEMA_VERSION {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                reason: format!("schema {} but this build reads {LOG_SCHEMA_VERSION}", row.schema),
            });
        }
        Ok(Self {
            episode: row.episode,
            step: row.step,
            inflation: row.inflation,
            interest_rate: row.interest_rate,
            next_interest_rate: row.next_interest_rate,
            prices: split(&row.prices, path)?,
            sold: split(&row.sold, path)?,
        })
    }
}

fn firm_sales(info: &StepInfo) -> Vec<f64> {
    let n_firms = info.prices.len();
    (0..n_firms)
        .map(|j| info.realized_consumption.iter().map(|c| c[j]).sum())
        .collect()
}

/// Per-agent rows for one quarter.
pub fn agent_rows(episode: usize, info: &StepInfo, ids: &[AgentId]) -> Vec<AgentStepRow> {
    let d = &info.decoded;
    let sales = firm_sales(info);
    let n_firms = info.prices.len();
    ids.iter()
        .map(|&id| {
            let (action, observation, consumption) = match id.agent_type {
                AgentType::Household => {
                    let i = id.index;
                    let mut act: Vec<(String, f64)> = (0..n_firms)
                        .map(|j| (format!("labor_{}", j + 1), d.labor[i][j]))
                        .collect();
                    act.extend((0..n_firms).map(|j| {
                        (format!("consumption_{}", j + 1), d.consumption_requests[i][j])
                    }));
                    let obs = vec![
                        ("savings".to_string(), info.savings_before[i]),
                        ("credit".to_string(), info.credits[i]),
                        ("tax_paid".to_string(), info.tax_paid[i]),
                    ];
                    (act, obs, info.realized_consumption[i].iter().sum())
                }
                AgentType::Firm => {
                    let j = id.index;
                    let act = vec![
                        ("wage".to_string(), d.wages[j]),
                        ("price".to_string(), d.prices[j]),
                    ];
                    let obs = vec![
                        ("price".to_string(), info.prices[j]),
                        ("wage".to_string(), info.wages[j]),
                        ("inventory".to_string(), info.inventory_before[j]),
                        ("production".to_string(), info.production[j]),
                        ("shock".to_string(), info.shocks[j]),
                    ];
                    (act, obs, sales[j])
                }
                AgentType::CentralBank => {
                    let act = vec![("rate".to_string(), d.rate)];
                    let obs = vec![
                        ("interest_rate".to_string(), info.interest_rate),
                        ("inflation".to_string(), info.inflation),
                    ];
                    (act, obs, sales.iter().sum())
                }
                AgentType::Government => {
                    let mut act = vec![("tax".to_string(), d.tax_rate)];
                    act.extend(
                        d.credit_fractions
                            .iter()
                            .enumerate()
                            .map(|(i, f)| (format!("fraction_{}", i + 1), *f)),
                    );
                    let obs = vec![
                        ("tax_rate".to_string(), info.tax_rate),
                        ("total_tax".to_string(), info.total_tax),
                    ];
                    (act, obs, sales.iter().sum())
                }
            };
            AgentStepRow {
                schema: LOG_SCHEMA_VERSION,
                episode,
                step: info.step,
                agent_id: id.to_string(),
                agent_type: id.agent_type.name().to_string(),
                action: pairs(action),
                observation: pairs(observation),
                raw_reward: *info.raw_rewards.get(id),
                normalized_reward: *info.normalized_rewards.get(id),
                inflation: info.inflation,
                total_production: info.total_production,
                total_tax: info.total_tax,
                consumption,
            }
        })
        .collect()
}

/// Discounted return of one agent in one evaluation episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnRow {
    pub episode: usize,
    pub agent_id: String,
    pub agent_type: String,
    pub discounted_return: f64,
}

/// Long-form utility tensor: one row per cell per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRow {
    pub cell: usize,
    /// Strategy index of each player, separated by `;`.
    pub profile: String,
    pub player: String,
    pub utility: f64,
}

/// One deviation strategy's utility against the candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub candidate: String,
    pub player: String,
    pub deviation: String,
    pub utility: f64,
    pub candidate_utility: f64,
    pub gain: f64,
}

/// One regret-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    pub candidate: String,
    pub player: String,
    pub utility: f64,
    pub regret: f64,
    /// Empty when undefined.
    pub percentage: Option<f64>,
}
