//! Semantic activity concepts: verb-object extraction, lemmatization, VO
//! embeddings and activity-label matching.

pub mod labels;
pub mod lemma;
pub mod pos;
pub mod vo;

pub use labels::{best_label_match, cosine, ActivityLabel, LabelLexicon, LabelMatch};
pub use lemma::{lemmatize, Lemmatizer};
pub use pos::{PosLexicon, PosTag};
pub use vo::{extract_vo, resolve_vo, vo_embedding, VoPair};
