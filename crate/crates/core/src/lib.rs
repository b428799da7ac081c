//! Multi-agent macroeconomic simulation with reinforcement-learning oracles
//! and empirical game-theoretic analysis.
//!
//! The crate is layered bottom-up:
//!
//! - [`econ`]: dynamics and reward functions for households, firms, the
//!   central bank and the government.
//! - [`env`]: the episodic environment built on top of them.
//! - [`policy`]: per-type stochastic MLP policies with analytic gradients.
//! - [`ppo`]: rollouts, advantage estimation, clipped-surrogate updates,
//!   best-response and independent-learning trainers.
//! - [`egta`]: empirical games, the Nash meta-solver, the PSRO loop and
//!   regret reports.
//! - [`harness`]: config files, logs, manifests and stylized-fact checks.

pub mod econ;
pub mod egta;
pub mod env;
pub mod error;
pub mod harness;
pub mod policy;
pub mod ppo;
pub mod seeding;

pub use error::{Error, Result};
