use std::collections::BTreeSet;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{cell_seed, estimate_utilities, GameOracle};
use super::tensor::MixedProfile;
use crate::error::{Error, Result};

/// Utilities below this magnitude make percentage regret undefined.
pub const PERCENT_EPSILON: f64 = 1e-12;

/// Per-player and total regret of a profile against a deviation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub players: Vec<String>,
    /// `U_i(sigma)`.
    pub utilities: Vec<f64>,
    /// Best deviation utility per player.
    pub best_deviation: Vec<f64>,
    /// Clamped at zero.
    pub regrets: Vec<f64>,
    /// Regret as a percentage of `|U_i(sigma)|`; `None` when undefined.
    pub percentages: Vec<Option<f64>>,
    pub total_regret: f64,
    pub total_utility: f64,
    pub total_percentage: Option<f64>,
    /// `U_i(s, sigma_-i)` for each strategy `s` of player `i`'s deviation set.
    pub deviation_utilities: Vec<Vec<f64>>,
}

fn percent(regret: f64, utility: f64) -> Option<f64> {
    (utility.abs() >= PERCENT_EPSILON).then(|| 100.0 * regret / utility.abs())
}

impl RegretReport {
    pub fn from_deviation_utilities(
        players: Vec<String>,
        utilities: Vec<f64>,
        deviation_utilities: Vec<Vec<f64>>,
    ) -> Self {
        let best_deviation: Vec<f64> = deviation_utilities
            .iter()
            .zip(&utilities)
            .map(|(d, &u)| d.iter().cloned().fold(u, f64::max))
            .collect();
        let regrets: Vec<f64> = best_deviation
            .iter()
            .zip(&utilities)
            .map(|(b, u)| (b - u).max(0.0))
            .collect();
        let percentages = regrets
            .iter()
            .zip(&utilities)
            .map(|(&r, &u)| percent(r, u))
            .collect();
        let total_regret: f64 = regrets.iter().sum();
        let total_utility: f64 = utilities.iter().sum();
        Self {
            players,
            total_percentage: percent(total_regret, total_utility),
            utilities,
            best_deviation,
            regrets,
            percentages,
            total_regret,
            total_utility,
            deviation_utilities,
        }
    }

    /// `"regret (percentage%)"` per player followed by the total.
    pub fn row(&self) -> Vec<String> {
        let fmt = |r: f64, p: Option<f64>| match p {
            Some(p) => format!("{r:.2} ({p:.2}%)"),
            None => format!("{r:.2} (undefined)"),
        };
        self.regrets
            .iter()
            .zip(&self.percentages)
            .map(|(&r, &p)| fmt(r, p))
            .chain(std::iter::once(fmt(self.total_regret, self.total_percentage)))
            .collect()
    }

    /// Header line and one labelled row.
    pub fn table(&self, label: &str) -> String {
        regret_table(&[(label, self)])
    }
}

/// Aligned text table: a header of player names and one row per report.
pub fn regret_table(rows: &[(&str, &RegretReport)]) -> String {
    let Some((_, first)) = rows.first() else {
        return String::new();
    };
    let mut header = vec!["Scheme".to_string()];
    header.extend(first.players.iter().cloned());
    header.push("Total".into());
    let mut lines = vec![header];
    for (label, report) in rows {
        let mut row = vec![label.to_string()];
        row.extend(report.row());
        lines.push(row);
    }
    let widths: Vec<usize> = (0..lines[0].len())
        .map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in &lines {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", cells.join(" | ").trim_end()).unwrap();
    }
    out
}

/// Regret of `candidate` (a mixture over each player's deviation set)
/// against every strategy in the deviation sets.
///
/// Only cells where at most one player leaves the candidate's support are
/// simulated; cell seeds follow the empirical-game schedule so matching
/// index layouts reproduce the same estimates.
pub fn compute_regret<O: GameOracle>(
    oracle: &O,
    deviation_sets: &[Vec<O::Strategy>],
    candidate: &MixedProfile,
    runs: usize,
    seed: u64,
) -> Result<RegretReport> {
    let dims: Vec<usize> = deviation_sets.iter().map(Vec::len).collect();
    if dims.len() != oracle.players() {
        return Err(Error::contract("one deviation set per player required"));
    }
    candidate.validate(&dims)?;
    let supports: Vec<Vec<usize>> = candidate
        .0
        .iter()
        .map(|s| (0..s.len()).filter(|&k| s[k] > 0.0).collect())
        .collect();

    let mut needed: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..dims.len() {
        let mut partial: Vec<Vec<usize>> = vec![vec![]];
        for (j, support) in supports.iter().enumerate() {
            let options: Vec<usize> = if j == i {
                (0..dims[i]).collect()
            } else {
                support.clone()
            };
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    options.iter().map(move |&k| {
                        let mut p = p.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        needed.extend(partial);
    }
    let cells: Vec<Vec<usize>> = needed.into_iter().collect();
    let values: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|idx| {
            let profile: Vec<&O::Strategy> = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| &deviation_sets[i][k])
                .collect();
            estimate_utilities(oracle, &profile, runs, |r| cell_seed(seed, idx, r))
        })
        .collect::<Result<_>>()?;

    let n = dims.len();
    let mut deviation_utilities: Vec<Vec<f64>> = dims.iter().map(|&m| vec![0.0; m]).collect();
    for (idx, u) in cells.iter().zip(&values) {
        for i in 0..n {
            let mut w = 1.0;
            for j in 0..n {
                if j != i {
                    w *= candidate.0[j][idx[j]];
                }
            }
            if w > 0.0 {
                deviation_utilities[i][idx[i]] += w * u[i];
            }
        }
    }
    let utilities: Vec<f64> = (0..n)
        .map(|i| {
            deviation_utilities[i]
                .iter()
                .zip(&candidate.0[i])
                .map(|(u, p)| u * p)
                .sum()
        })
        .collect();
    let players = (0..n).map(|i| oracle.player_name(i)).collect();
    Ok(RegretReport::from_deviation_utilities(
        players,
        utilities,
        deviation_utilities,
    ))
}
