//! Interval arithmetic, sliding windows, clip pooling, training-sample
//! collection and actionness labels.

pub mod interval;
pub mod pooling;
pub mod samples;
pub mod windows;

pub use interval::{tiou, Interval};
pub use pooling::{clip_concept, clip_feature};
pub use samples::{
    actionness_labels, apply_offsets, collect_training_samples, regression_targets, SampleSet, TrainingSample,
};
pub use windows::{sliding_windows, write_windows_csv, ClipSpec};
