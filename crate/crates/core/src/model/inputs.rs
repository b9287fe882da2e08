use crate::concepts::{resolve_vo, vo_embedding, VoPair};
use crate::datastore::{encode_sentence_fallback, Dataset, WORD_DIM};
use crate::error::{Error, Result};
use crate::model::acl::{ClipInput, QueryInput};
use crate::model::config::ModelDims;
use crate::numcore::Scalar;
use crate::temporal::{clip_concept, clip_feature, ClipSpec};

/// Width of the VO embedding: two word vectors.
pub fn vo_dim(ds: &Dataset) -> usize {
    2 * ds.resources.embeddings.as_ref().map_or(WORD_DIM, |t| t.dim())
}

/// Input widths implied by a dataset, with default layer widths.
pub fn model_dims(ds: &Dataset) -> ModelDims {
    ModelDims::new(3 * ds.manifest.feature_dim(), ds.manifest.concept_dim(), ds.manifest.sentence_dim(), vo_dim(ds))
}

pub fn clip_input<T: Scalar>(ds: &Dataset, video_index: usize, clip: &ClipSpec) -> ClipInput<T> {
    ClipInput {
        feature: clip_feature(&ds.features[video_index], clip),
        concept: clip_concept(&ds.concepts[video_index], clip),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedQuery<T> {
    pub input: QueryInput<T>,
    pub vo: Option<VoPair>,
    /// False when the VO vector is the all-zero fallback.
    pub has_vo_embedding: bool,
}

/// Sentence vector (precomputed, else the bag-of-embeddings fallback) and VO
/// embedding of one query.
pub fn prepare_query<T: Scalar>(ds: &Dataset, query_index: usize) -> Result<PreparedQuery<T>> {
    let q = &ds.manifest.queries[query_index];
    let table = ds.resources.embeddings.as_ref();
    let sentence = match (&ds.sentence_embeddings[query_index], table) {
        (Some(v), _) => v.iter().map(|&x| T::widen(x)).collect(),
        (None, Some(t)) => encode_sentence_fallback(&q.tokens, t, ds.manifest.sentence_dim()).vector,
        (None, None) => {
            return Err(Error::validation(
                &q.id,
                "no precomputed sentence embedding and the manifest names no word embeddings",
            ))
        }
    };
    let vo = resolve_vo(q, ds.resources.pos.as_ref());
    let vo_vec = match table {
        Some(t) => vo_embedding(vo.as_ref(), t),
        None => vec![T::zero(); vo_dim(ds)],
    };
    let has_vo_embedding = vo_vec.iter().any(|v| *v != T::zero());
    Ok(PreparedQuery {
        input: QueryInput { sentence, vo: vo_vec },
        vo,
        has_vo_embedding,
    })
}
