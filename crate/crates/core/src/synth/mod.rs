//! Deterministic synthetic benchmark: planted activity segments over a
//! background cluster, a matching word table and lexicons, plus the
//! concept oracle and the random-ranking baseline.

pub mod config;
pub mod generate;
pub mod oracle;

pub use config::{SynthConfig, VOCABULARY};
pub use generate::{generate, load_truth, Segment, SynthSummary, Truth, TEST_MANIFEST, TRAIN_MANIFEST, TRUTH_FILE};
pub use oracle::{oracle_localize, oracle_report, random_baseline, OracleAnswer};
