//! Inference: window scoring, actionness fusion, boundary refinement,
//! ranking and the activity-label late fusion.

pub mod fusion;
pub mod output;
pub mod run;
pub mod score;

pub use fusion::{late_fusion, LateFusion};
pub use output::{group_by_query, load_predictions, prediction_rows, save_predictions, write_predictions, PredictionRow};
pub use run::{localize_dataset, video_windows, LocalizeConfig, QueryPredictions};
pub use score::{fuse, rank_order, score_query, Prediction, QueryContext, ScoreMode, DEFAULT_PROP_KEEP};
