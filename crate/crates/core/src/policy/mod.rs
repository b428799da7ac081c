//! Per-agent-type stochastic policies.
//!
//! One network per agent type; agents of the same type share it and are
//! told apart by the heterogeneity parameters appended to their input.

mod checkpoint;
pub mod features;
mod network;
mod spec;

pub use checkpoint::{load_policy, load_policy_for, save_policy};
pub use network::{
    ActionSample, BatchEvaluation, Evaluation, Forward, OutputGrad, PolicyParams, SampleMode,
};
pub use spec::{Activation, LayerShape, PolicySpec, DEFAULT_HIDDEN};
