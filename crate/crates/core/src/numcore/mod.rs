//! Dense numeric core: matrices, fully-connected layers with exact gradients,
//! activations, losses, Adam and finite-difference gradient checking.

pub mod activation;
pub mod adam;
pub mod checkpoint;
pub mod dense;
pub mod gradcheck;
pub mod loss;
pub mod matrix;
pub mod params;
pub mod scalar;

pub use activation::{relu, relu_backward, sigmoid, sigmoid_scalar, softmax, softplus};
pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{read_checkpoint, write_checkpoint, NamedTensor};
pub use dense::DenseLayer;
pub use gradcheck::{grad_check, GradCheckReport};
pub use loss::{bce, bce_with_logit, smooth_l1, smooth_l1_grad};
pub use matrix::Matrix;
pub use params::ParamSet;
pub use scalar::Scalar;
