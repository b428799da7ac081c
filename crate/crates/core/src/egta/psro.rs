use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{EmpiricalGame, GameOracle};
use super::solver::{solve_nash, SolveMethod, SolverConfig};
use super::tensor::MixedProfile;
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsroConfig {
    pub epochs: usize,
    pub episodes_per_oracle: usize,
    pub runs_per_cell: usize,
    pub final_eval_runs: usize,
    pub solver: SolverConfig,
    /// Train the per-player oracles of an epoch concurrently.
    pub parallel_oracles: bool,
    pub seed: u64,
}

impl Default for PsroConfig {
    fn default() -> Self {
        Self {
            epochs: 8,
            episodes_per_oracle: 100,
            runs_per_cell: 10,
            final_eval_runs: 100,
            solver: SolverConfig::default(),
            parallel_oracles: true,
            seed: 0,
        }
    }
}

impl PsroConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, n) in [
            ("psro.epochs", self.epochs),
            ("psro.episodes_per_oracle", self.episodes_per_oracle),
            ("psro.runs_per_cell", self.runs_per_cell),
            ("psro.final_eval_runs", self.final_eval_runs),
        ] {
            if n == 0 {
                return Err(Error::config(field, "must be positive"));
            }
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochDiagnostics {
    pub epoch: usize,
    pub set_sizes: Vec<usize>,
    /// Cells simulated during this epoch.
    pub new_cells: usize,
    pub total_cells: usize,
    pub solver_regret: f64,
    pub approximate: bool,
    pub method: SolveMethod,
    pub profile: MixedProfile,
}

/// Everything needed to continue a PSRO run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsroState<S> {
    pub game: EmpiricalGame<S>,
    pub profile: MixedProfile,
    /// Last completed epoch; 0 after initialization.
    pub epoch: usize,
    pub diagnostics: Vec<EpochDiagnostics>,
}

/// Simulate the initial profile and set the meta-strategy to it.
pub fn psro_init<O: GameOracle>(
    oracle: &O,
    initial: Vec<O::Strategy>,
    config: &PsroConfig,
) -> Result<PsroState<O::Strategy>> {
    config.validate()?;
    if initial.len() != oracle.players() {
        return Err(Error::contract("one initial strategy per player required"));
    }
    let mut game = EmpiricalGame::new(initial, config.runs_per_cell, config.seed);
    let new_cells = game.expand(oracle)?;
    let dims = game.dims();
    let profile = MixedProfile::pure(&dims, &vec![0; dims.len()]);
    let diag = EpochDiagnostics {
        epoch: 0,
        set_sizes: dims,
        new_cells,
        total_cells: game.cell_count(),
        solver_regret: 0.0,
        approximate: false,
        method: SolveMethod::Pure,
        profile: profile.clone(),
    };
    Ok(PsroState {
        game,
        profile,
        epoch: 0,
        diagnostics: vec![diag],
    })
}

/// One epoch: a best response per player against the current meta-strategy,
/// expansion of the empirical game, and a new equilibrium.
pub fn psro_epoch<O: GameOracle>(
    oracle: &O,
    state: &mut PsroState<O::Strategy>,
    config: &PsroConfig,
) -> Result<()> {
    let epoch = state.epoch + 1;
    let sets = &state.game.strategy_sets;
    let sigma = &state.profile;
    let train = |i: usize| {
        let seed = seeding::mix(&[tag::ORACLE, config.seed, epoch as u64, i as u64]);
        oracle.best_response(i, epoch, sets, sigma, seed)
    };
    let players: Vec<usize> = (0..oracle.players()).collect();
    let responses: Vec<O::Strategy> = if config.parallel_oracles {
        players.par_iter().map(|&i| train(i)).collect::<Result<_>>()?
    } else {
        players.iter().map(|&i| train(i)).collect::<Result<_>>()?
    };
    state
        .game
        .add_strategies(responses.into_iter().map(|s| vec![s]).collect())?;
    let new_cells = state.game.expand(oracle)?;
    let tensor = state.game.payoffs()?;
    let solver = SolverConfig {
        seed: seeding::mix(&[config.solver.seed, epoch as u64]),
        ..config.solver.clone()
    };
    let solution = solve_nash(&tensor, &solver)?;
    state.profile = solution.profile.clone();
    state.epoch = epoch;
    state.diagnostics.push(EpochDiagnostics {
        epoch,
        set_sizes: state.game.dims(),
        new_cells,
        total_cells: state.game.cell_count(),
        solver_regret: solution.regret,
        approximate: solution.approximate,
        method: solution.method,
        profile: solution.profile,
    });
    Ok(())
}

/// Run epochs until `config.epochs` are complete, calling `on_epoch` after
/// initialization and after each epoch (for persistence).
pub fn resume_psro<O: GameOracle>(
    oracle: &O,
    mut state: PsroState<O::Strategy>,
    config: &PsroConfig,
    mut on_epoch: impl FnMut(&PsroState<O::Strategy>) -> Result<()>,
) -> Result<PsroState<O::Strategy>> {
    config.validate()?;
    while state.epoch < config.epochs {
        psro_epoch(oracle, &mut state, config)?;
        on_epoch(&state)?;
    }
    Ok(state)
}

pub fn run_psro<O: GameOracle>(
    oracle: &O,
    initial: Vec<O::Strategy>,
    config: &PsroConfig,
    mut on_epoch: impl FnMut(&PsroState<O::Strategy>) -> Result<()>,
) -> Result<PsroState<O::Strategy>> {
    let state = psro_init(oracle, initial, config)?;
    on_epoch(&state)?;
    resume_psro(oracle, state, config, on_epoch)
}
