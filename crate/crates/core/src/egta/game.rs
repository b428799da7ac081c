use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tensor::{flatten, unflatten, MixedProfile, PayoffTensor};
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

/// A game that can be simulated and best-responded to.
pub trait GameOracle: Sync {
    type Strategy: Clone + Send + Sync;

    fn players(&self) -> usize;

    fn player_name(&self, player: usize) -> String {
        format!("player_{}", player + 1)
    }

    /// Per-player utilities of one simulated run of a pure profile.
    fn play(&self, profile: &[&Self::Strategy], seed: u64) -> Result<Vec<f64>>;

    /// A new strategy for `player` against the others' mixtures in `sigma`.
    fn best_response(
        &self,
        player: usize,
        epoch: usize,
        sets: &[Vec<Self::Strategy>],
        sigma: &MixedProfile,
        seed: u64,
    ) -> Result<Self::Strategy>;
}

/// Seed of run `run` of the cell at multi-index `idx`.
pub fn cell_seed(global: u64, idx: &[usize], run: usize) -> u64 {
    let mut words = Vec::with_capacity(idx.len() + 3);
    words.push(tag::CELL);
    words.push(global);
    words.extend(idx.iter().map(|&i| i as u64));
    words.push(run as u64);
    seeding::mix(&words)
}

/// Mean utilities over `runs` simulations of a pure profile.
pub fn estimate_utilities<O: GameOracle>(
    oracle: &O,
    profile: &[&O::Strategy],
    runs: usize,
    seed_of_run: impl Fn(usize) -> u64,
) -> Result<Vec<f64>> {
    if runs == 0 {
        return Err(Error::contract("at least one run per utility estimate"));
    }
    let mut total = vec![0.0; oracle.players()];
    for r in 0..runs {
        let u = oracle.play(profile, seed_of_run(r))?;
        if u.len() != total.len() {
            return Err(Error::contract(format!(
                "play returned {} utilities for {} players",
                u.len(),
                total.len()
            )));
        }
        for (t, v) in total.iter_mut().zip(u) {
            *t += v;
        }
    }
    let out: Vec<f64> = total.into_iter().map(|t| t / runs as f64).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("estimated utilities".into()));
    }
    Ok(out)
}

/// Strategy sets and the (partially) simulated utility tensor over them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalGame<S> {
    pub strategy_sets: Vec<Vec<S>>,
    /// Utilities per cell in row-major order; `None` marks a pending cell.
    cells: Vec<Option<Vec<f64>>>,
    pub runs_per_cell: usize,
    pub seed: u64,
    /// Cells simulated since creation.
    pub evaluations: usize,
}

impl<S: Clone + Send + Sync> EmpiricalGame<S> {
    /// One strategy per player and a single pending cell.
    pub fn new(initial: Vec<S>, runs_per_cell: usize, seed: u64) -> Self {
        Self {
            strategy_sets: initial.into_iter().map(|s| vec![s]).collect(),
            cells: vec![None],
            runs_per_cell,
            seed,
            evaluations: 0,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.strategy_sets.iter().map(Vec::len).collect()
    }

    pub fn players(&self) -> usize {
        self.strategy_sets.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn pending(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn utilities(&self, idx: &[usize]) -> Option<&[f64]> {
        self.cells[flatten(&self.dims(), idx)].as_deref()
    }

    /// Append strategies (one list per player) and mark the new cells pending.
    pub fn add_strategies(&mut self, new: Vec<Vec<S>>) -> Result<()> {
        if new.len() != self.players() {
            return Err(Error::contract(format!(
                "{} new strategy lists for {} players",
                new.len(),
                self.players()
            )));
        }
        let old_dims = self.dims();
        for (set, extra) in self.strategy_sets.iter_mut().zip(new) {
            set.extend(extra);
        }
        let dims = self.dims();
        if dims == old_dims {
            return Ok(());
        }
        let total: usize = dims.iter().product();
        let mut cells = vec![None; total];
        for (c, cell) in std::mem::take(&mut self.cells).into_iter().enumerate() {
            let idx = unflatten(&old_dims, c);
            cells[flatten(&dims, &idx)] = cell;
        }
        self.cells = cells;
        Ok(())
    }

    /// Simulate every pending cell; returns how many were simulated.
    pub fn expand<O: GameOracle<Strategy = S>>(&mut self, oracle: &O) -> Result<usize> {
        if oracle.players() != self.players() {
            return Err(Error::contract("oracle and game disagree on player count"));
        }
        let dims = self.dims();
        let pending: Vec<usize> = (0..self.cells.len())
            .filter(|&c| self.cells[c].is_none())
            .collect();
        let (runs, seed) = (self.runs_per_cell, self.seed);
        let sets = &self.strategy_sets;
        let results: Vec<(usize, Vec<f64>)> = pending
            .par_iter()
            .map(|&c| {
                let idx = unflatten(&dims, c);
                let profile: Vec<&S> = idx.iter().enumerate().map(|(i, &k)| &sets[i][k]).collect();
                let u = estimate_utilities(oracle, &profile, runs, |r| cell_seed(seed, &idx, r))?;
                Ok((c, u))
            })
            .collect::<Result<_>>()?;
        let n = results.len();
        for (c, u) in results {
            self.cells[c] = Some(u);
        }
        self.evaluations += n;
        Ok(n)
    }

    /// The fully evaluated utility tensor.
    pub fn payoffs(&self) -> Result<PayoffTensor> {
        let mut values = Vec::with_capacity(self.cells.len() * self.players());
        for (c, cell) in self.cells.iter().enumerate() {
            match cell {
                Some(u) => values.extend(u),
                None => {
                    return Err(Error::contract(format!(
                        "cell {:?} has not been simulated",
                        unflatten(&self.dims(), c)
                    )))
                }
            }
        }
        PayoffTensor::new(self.dims(), values)
    }

    /// Same game with strategies replaced by `f(player, index, strategy)`.
    pub fn map_strategies<T>(&self, mut f: impl FnMut(usize, usize, &S) -> T) -> EmpiricalGame<T> {
        EmpiricalGame {
            strategy_sets: self
                .strategy_sets
                .iter()
                .enumerate()
                .map(|(i, set)| set.iter().enumerate().map(|(k, s)| f(i, k, s)).collect())
                .collect(),
            cells: self.cells.clone(),
            runs_per_cell: self.runs_per_cell,
            seed: self.seed,
            evaluations: self.evaluations,
        }
    }

    pub fn try_map_strategies<T>(
        &self,
        mut f: impl FnMut(usize, usize, &S) -> Result<T>,
    ) -> Result<EmpiricalGame<T>> {
        let mut sets = Vec::with_capacity(self.players());
        for (i, set) in self.strategy_sets.iter().enumerate() {
            sets.push(
                set.iter()
                    .enumerate()
                    .map(|(k, s)| f(i, k, s))
                    .collect::<Result<Vec<T>>>()?,
            );
        }
        Ok(EmpiricalGame {
            strategy_sets: sets,
            cells: self.cells.clone(),
            runs_per_cell: self.runs_per_cell,
            seed: self.seed,
            evaluations: self.evaluations,
        })
    }
}

/// Append one list of new strategies per player and simulate exactly the
/// cells that involve at least one of them.
pub fn expand_empirical_game<O: GameOracle>(
    game: &mut EmpiricalGame<O::Strategy>,
    new_strategies: Vec<Vec<O::Strategy>>,
    oracle: &O,
) -> Result<usize> {
    game.add_strategies(new_strategies)?;
    game.expand(oracle)
}
