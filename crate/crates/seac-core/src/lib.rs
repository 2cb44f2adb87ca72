//! Soft Elastic Actor-Critic: continuous control where the policy picks both
//! the force to apply and the duration of the next time step, trained with
//! SAC against a 2D Newtonian point-mass navigation task, alongside a
//! fixed-rate SAC baseline and a deterministic experiment harness.

pub mod agent;
pub mod env;
pub mod harness;
pub mod nn;
pub mod reward;
pub mod rng;
pub mod vec2;

pub use agent::{Actor, Algo, EpisodeRecord, ReplayBuffer, SacConfig, Trainer, Transition};
pub use env::{
    ElasticAction, EnvConfig, EnvState, Observation, PointMassEnv, StepOutcome, Termination,
    OBS_DIM,
};
pub use harness::{RunConfig, StepTrace};
pub use nn::TimeActivation;
pub use reward::{compute_reward, RewardBreakdown, RewardWeights};
pub use vec2::Vec2;
