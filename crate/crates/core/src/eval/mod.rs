//! Metrics (R@n,IoU=m and the average recall–frequency curve) and report files.

pub mod metrics;
pub mod report;
pub mod scoring;

pub use metrics::{
    ar_f, query_hit, recall_at, windows_kept, ArfItem, ArfPoint, EvalReport, RankedQuery, RecallEntry, DEFAULT_MS,
    DEFAULT_NS,
};
pub use report::{emit_arf, emit_report, parse_arf, parse_report, render_arf, render_report, ReportLayout};
pub use scoring::{scored_set, ScoredSet, DEFAULT_FREQUENCIES};
