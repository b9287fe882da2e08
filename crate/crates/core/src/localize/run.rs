use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concepts::VoPair;
use crate::datastore::Dataset;
use crate::error::{Error, Result};
use crate::localize::fusion::{late_fusion, LateFusion};
use crate::localize::score::{score_query, Prediction, QueryContext, ScoreMode, DEFAULT_PROP_KEEP};
use crate::model::{model_dims, prepare_query, AclParams, ActionnessParams};
use crate::numcore::Scalar;
use crate::temporal::{sliding_windows, ClipSpec};

/// Test-time window grid and fusion settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizeConfig {
    pub lengths_frames: Vec<usize>,
    pub overlap: f64,
    pub context_frames: usize,
    pub prop_keep: f64,
    /// Late-fusion threshold θ; `None` disables late fusion.
    pub late_fusion: Option<f64>,
}

impl Default for LocalizeConfig {
    fn default() -> Self {
        Self {
            lengths_frames: vec![128, 256],
            overlap: 0.75,
            context_frames: 128,
            prop_keep: DEFAULT_PROP_KEEP,
            late_fusion: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryPredictions {
    pub query_index: usize,
    pub vo: Option<VoPair>,
    pub has_vo_embedding: bool,
    pub predictions: Vec<Prediction>,
    pub fusion: Option<LateFusion>,
}

/// Test windows of every video.
pub fn video_windows(ds: &Dataset, cfg: &LocalizeConfig) -> Result<Vec<Vec<ClipSpec>>> {
    let l_u = ds.manifest.unit_frames();
    ds.manifest
        .videos
        .iter()
        .map(|v| sliding_windows(v.num_units, l_u, &cfg.lengths_frames, cfg.overlap, cfg.context_frames))
        .collect()
}

fn check_dims<T: Scalar>(acl: &AclParams<T>, actionness: Option<&ActionnessParams<T>>, ds: &Dataset) -> Result<()> {
    let want = model_dims(ds);
    let have = acl.dims();
    let inputs = |d: &crate::model::ModelDims| (d.clip_dim, d.concept_dim, d.sentence_dim, d.vo_dim);
    if inputs(have) != inputs(&want) {
        return Err(Error::validation(
            "alignment checkpoint",
            format!("input dims {:?} do not match the dataset's {:?}", inputs(have), inputs(&want)),
        ));
    }
    if let Some(a) = actionness {
        if a.input_dim() != want.clip_dim {
            return Err(Error::validation(
                "actionness checkpoint",
                format!("input dim {} does not match the dataset's {}", a.input_dim(), want.clip_dim),
            ));
        }
    }
    Ok(())
}

/// Scores every query of `ds` against its video's windows. Queries run in
/// parallel on the current rayon pool; the output is in query order.
pub fn localize_dataset<T: Scalar>(
    acl: &AclParams<T>,
    actionness: Option<&ActionnessParams<T>>,
    ds: &Dataset,
    mode: ScoreMode,
    cfg: &LocalizeConfig,
) -> Result<Vec<QueryPredictions>> {
    check_dims(acl, actionness, ds)?;
    let windows = video_windows(ds, cfg)?;
    let fusion_inputs = match cfg.late_fusion {
        None => None,
        Some(theta) => match (&ds.resources.labels, &ds.resources.embeddings) {
            (Some(l), Some(t)) => Some((theta, l, t)),
            _ => {
                return Err(Error::Config(
                    "late fusion needs a manifest with a label lexicon and word embeddings".into(),
                ))
            }
        },
    };
    (0..ds.manifest.queries.len())
        .into_par_iter()
        .map(|qi| {
            let q = &ds.manifest.queries[qi];
            let vi = q.video_index;
            let video = &ds.manifest.videos[vi];
            let prepared = prepare_query::<T>(ds, qi)?;
            let ctx = QueryContext {
                query_index: qi,
                query: &prepared.input,
                features: &ds.features[vi],
                concepts: &ds.concepts[vi],
                video_frames: video.frames,
                unit_frames: ds.manifest.unit_frames(),
            };
            let mut predictions = score_query(acl, actionness, &ctx, &windows[vi], mode, cfg.prop_keep)?;
            let fusion = match fusion_inputs {
                Some((theta, lex, table)) => Some(late_fusion(
                    &mut predictions,
                    &ds.concepts[vi],
                    prepared.vo.as_ref(),
                    lex,
                    table,
                    theta,
                )?),
                None => None,
            };
            if predictions.iter().any(|p| !p.xi.is_finite()) {
                return Err(Error::Numeric(format!("non-finite score for query {}", q.id)));
            }
            Ok(QueryPredictions {
                query_index: qi,
                vo: prepared.vo,
                has_vo_embedding: prepared.has_vo_embedding,
                predictions,
                fusion,
            })
        })
        .collect()
}
