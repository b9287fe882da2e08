//! Activity-concept-based temporal localization of natural-language queries
//! in untrimmed video.

pub mod concepts;
pub mod datastore;
pub mod error;
pub mod eval;
pub mod localize;
pub mod model;
pub mod numcore;
pub mod synth;
pub mod temporal;

pub use error::{Error, ErrorKind, Result};

pub type Matrix32 = numcore::Matrix<f32>;
pub type Matrix64 = numcore::Matrix<f64>;
pub type AclParams32 = model::AclParams<f32>;
pub type AclParams64 = model::AclParams<f64>;
pub type ActionnessParams32 = model::ActionnessParams<f32>;
pub type ActionnessParams64 = model::ActionnessParams<f64>;
