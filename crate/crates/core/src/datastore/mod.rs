//! Dataset model and ingestion: manifests, unit feature/concept files,
//! word-embedding tables and the bag-of-embeddings sentence fallback.

pub mod dataset;
pub mod embedding;
pub mod manifest;
pub mod sentence;
pub mod unitfile;

pub use dataset::{Dataset, Resources};
pub use embedding::{EmbeddingTable, WORD_DIM};
pub use manifest::{
    load_manifest, save_manifest, DatasetManifest, ManifestFile, QueryEntry, QueryRecord, VideoEntry, VideoRecord,
};
pub use sentence::{encode_sentence_fallback, SentenceEncoding};
pub use unitfile::{load_unit_matrix, read_unit_matrix, save_unit_matrix};

/// Unit index containing time `t_sec`: `floor(t · fps / unit_frames)`.
pub fn unit_index(t_sec: f64, fps: f64, unit_frames: usize) -> usize {
    (t_sec * fps / unit_frames as f64).floor().max(0.0) as usize
}
