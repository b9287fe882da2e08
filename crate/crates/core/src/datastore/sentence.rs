use crate::datastore::EmbeddingTable;
use crate::numcore::Scalar;

/// Bag-of-embeddings sentence vector used when no precomputed sentence
/// embedding is available.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEncoding<T> {
    pub vector: Vec<T>,
    /// Set when no token had an embedding and the vector is all zeros.
    pub no_known_words: bool,
}

/// Mean of the embeddings of tokens present in `table`, tiled to fill
/// `target_dim` with whole copies and zero-padded in the remainder (or
/// truncated when `target_dim` is smaller than the table dimension).
///
/// Tokens are summed in sorted order so the result is exactly invariant to
/// token permutation.
pub fn encode_sentence_fallback<T: Scalar>(tokens: &[String], table: &EmbeddingTable, target_dim: usize) -> SentenceEncoding<T> {
    let dim = table.dim();
    let present: Vec<&[f32]> = {
        let mut sorted: Vec<&String> = tokens.iter().collect();
        sorted.sort();
        sorted.into_iter().filter_map(|t| table.lookup(t)).collect()
    };
    if present.is_empty() {
        return SentenceEncoding {
            vector: vec![T::zero(); target_dim],
            no_known_words: true,
        };
    }
    let mut mean = vec![T::zero(); dim];
    for v in &present {
        for (m, &x) in mean.iter_mut().zip(v.iter()) {
            *m += T::widen(x);
        }
    }
    let n = T::lit(present.len() as f64);
    mean.iter_mut().for_each(|m| *m /= n);

    let mut vector = Vec::with_capacity(target_dim);
    while vector.len() + dim <= target_dim {
        vector.extend_from_slice(&mean);
    }
    if vector.is_empty() {
        vector.extend_from_slice(&mean[..target_dim]);
    }
    vector.resize(target_dim, T::zero());
    SentenceEncoding {
        vector,
        no_known_words: false,
    }
}
