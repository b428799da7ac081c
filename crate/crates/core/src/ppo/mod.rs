//! Proximal policy optimization used as the best-response oracle and for
//! independent multi-agent training.

mod config;
mod gae;
mod rollout;
mod train;
mod update;

pub use config::{LearningRates, OptimizerKind, TrainConfig, LEARNING_RATE_GRID};
pub use gae::{compute_advantages, standardize};
pub use rollout::{
    agent_discount, per_agent_from_flat, run_episode, run_episode_observed, AgentTrajectory, EnvStep, Episode, MacroEnv,
    PolicySet, TrainEnv,
};
pub use train::{
    initial_policies, moving_average, train_best_response, train_imarl, BestResponse, ImarlOutcome,
    Learner, OpponentSampler, TrainingCurve, MOVING_AVERAGE_WINDOW,
};
pub use update::{loss_and_gradient, ppo_update, Batch, LossTerms, Optimizer, UpdateStats};
