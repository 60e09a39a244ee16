//! Residual-MLP vector fields with reverse-mode gradients, the conditional
//! flow matching training loops, AdamW, Euler sampling on Euclidean space
//! and the Stiefel manifold, and bit-exact checkpoints.

mod checkpoint;
mod loss;
mod net;
mod optim;
mod sample;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use loss::{cfm_loss_euclidean, cfm_loss_stiefel, euclidean_target};
pub use net::{ForwardCache, GradientSet, NetMeta, TensorSpec, VectorFieldNet};
pub use optim::{adamw_step, AdamWState};
pub use sample::{euler_sample_euclidean, euler_sample_stiefel, sfmg_sample, GeneratorSet};
pub use train::{
    loss_window_means, noise_fm_baseline, train_eigenvalues, train_eigenvectors,
    train_postprocess, TrainConfig, TrainResult,
};
