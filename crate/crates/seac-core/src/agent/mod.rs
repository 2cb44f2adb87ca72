//! Soft actor-critic with twin critics and an elastic-duration action head,
//! plus the fixed-rate baseline mode.

pub mod actor;
pub mod checkpoint;
pub mod losses;
pub mod replay;
pub mod trainer;

pub use actor::{Actor, Algo};
pub use checkpoint::{load_policy, PolicySnapshot};
pub use replay::{ReplayBuffer, Transition, ACTION_DIM};
pub use trainer::{EpisodeRecord, SacConfig, Trainer, TrainerError};
