//! The alignment network (projections, multi-modal processing units, head),
//! the actionness generator, their losses and training loops.

pub mod acl;
pub mod actionness;
pub mod config;
pub mod gradcheck;
pub mod inputs;
pub mod losses;
pub mod mpu;
pub mod train;

pub use acl::{AclOutput, AclParams, BatchLoss, Branch, ClipInput, QueryInput};
pub use actionness::{bce_loss, ActionnessParams};
pub use gradcheck::{acl_gradcheck, GradCheckConfig};
pub use config::{ActionnessConfig, BranchSpec, Fusion, ModelDims, QuerySource, TrainConfig, Variant, VideoSource, Width};
pub use inputs::{clip_input, model_dims, prepare_query, vo_dim, PreparedQuery};
pub use losses::{alignment_grad, alignment_loss, regression_grad, regression_loss, total_loss, RegressionLoss};
pub use mpu::{mpu, mpu_backward};
pub use train::{
    train_acl, train_actionness, write_log_csv, AclTraining, ActionnessSet, ActionnessTraining, AlignedSet, LogRow,
};
