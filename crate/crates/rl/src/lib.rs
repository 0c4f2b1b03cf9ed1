//! RL layer: a from-scratch MLP with analytic gradients, a component-aware
//! replay buffer, TD3, and the closed-loop episode machinery tying the
//! policy to the controller bank and the simulated sea.

pub mod env;
pub mod mlp;
pub mod replay;
pub mod rollout;
pub mod td3;
pub mod train;

pub use env::{ControlMode, Episode, StepOutcome, TaskSpec, WorldSpec};
pub use mlp::{Adam, Mlp, OutputActivation};
pub use replay::{compute_reward, ReplayBuffer, RewardWeights, Transition};
pub use td3::{Td3Agent, Td3Config};
pub use train::{train, Checkpoint, PolicyBundle, TrainConfig, TrainOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RlError {
    #[error("observation width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("length mismatch: weights {weights}, components {components}")]
    LengthMismatch { weights: usize, components: usize },
    #[error("non-finite loss at update {update}: {detail}")]
    NonFiniteLoss { update: u64, detail: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Dynamics(#[from] auv_core::DynamicsError),
    #[error(transparent)]
    Ocean(#[from] auv_core::OceanError),
    #[error(transparent)]
    Task(#[from] auv_core::tasks::TaskError),
    #[error(transparent)]
    Perception(#[from] auv_core::perception::PerceptionError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}
