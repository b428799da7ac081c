//! Empirical game-theoretic analysis: simulated utility tensors over
//! strategy sets, a Nash meta-solver, the policy-space response-oracle loop
//! and regret against pooled deviation sets.

mod game;
mod macro_game;
mod matrix;
mod psro;
mod regret;
mod solver;
mod tensor;

pub use game::{cell_seed, estimate_utilities, expand_empirical_game, EmpiricalGame, GameOracle};
pub use macro_game::{MacroGame, OracleRun, PLAYER_NAMES};
pub use matrix::MatrixGame;
pub use psro::{
    psro_epoch, psro_init, resume_psro, run_psro, EpochDiagnostics, PsroConfig, PsroState,
};
pub use regret::{compute_regret, regret_table, RegretReport, PERCENT_EPSILON};
pub use solver::{
    newton_on_support, pure_equilibrium, solve_nash, support_enumeration, NashSolution,
    SolveMethod, SolverConfig,
};
pub use tensor::{flatten, strides, unflatten, MixedProfile, PayoffTensor};
