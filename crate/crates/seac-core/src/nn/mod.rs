//! Trainable-network substrate: matrices, fully connected nets with exact
//! backprop, Adam, squashed-Gaussian heads, gradient checking, snapshots.

pub mod adam;
pub mod checkpoint;
pub mod gradcheck;
pub mod mat;
pub mod mlp;
pub mod squash;

pub use adam::{AdamParams, AdamState, ScalarAdam};
pub use checkpoint::CheckpointError;
pub use mat::{Mat, Scalar};
pub use mlp::{Activation, ForwardCache, Linear, Mlp, MlpGrads};
pub use squash::{
    sample_dim, DimSample, Squash, TimeActivation, LOG_STD_MAX, LOG_STD_MIN, SQUASH_STABILIZER,
};
