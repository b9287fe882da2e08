use crate::concepts::{LabelLexicon, VoPair};
use crate::datastore::EmbeddingTable;
use crate::error::{Error, Result};
use crate::localize::score::{rank_order, Prediction};
use crate::numcore::{softmax, Matrix};
use crate::temporal::clip_concept;

/// What late fusion did for one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateFusion {
    pub label: Option<usize>,
    pub similarity: f64,
    pub applied: bool,
}

/// Re-scores a query's predictions with activity-label probabilities.
///
/// The VO pair is matched against the label lexicon; when the best cosine
/// similarity exceeds `theta`, each ξ is multiplied by the softmax of its
/// clip's pooled concept vector at that label, and the list is re-ranked.
pub fn late_fusion(
    predictions: &mut [Prediction],
    concepts: &Matrix<f32>,
    vo: Option<&VoPair>,
    lexicon: &LabelLexicon,
    table: &EmbeddingTable,
    theta: f64,
) -> Result<LateFusion> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Config(format!("late-fusion threshold must be in [0, 1], got {theta}")));
    }
    let m = lexicon.best_match(vo, table);
    let mut outcome = LateFusion {
        label: m.index,
        similarity: m.similarity,
        applied: false,
    };
    let Some(k) = m.index.filter(|_| m.similarity > theta) else {
        return Ok(outcome);
    };
    if k >= concepts.cols() {
        return Err(Error::validation(
            "label lexicon",
            format!("label index {k} outside the {}-dim concept space", concepts.cols()),
        ));
    }
    for p in predictions.iter_mut() {
        let probs = softmax(&clip_concept::<f64>(concepts, &p.clip));
        p.xi *= probs[k];
    }
    predictions.sort_by(rank_order);
    outcome.applied = true;
    Ok(outcome)
}
