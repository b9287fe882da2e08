use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AclParams, ActionnessParams, ClipInput, QueryInput};
use crate::numcore::{sigmoid_scalar, Matrix, Scalar};
use crate::temporal::{apply_offsets, clip_concept, clip_feature, ClipSpec, Interval};

/// How window scores are fused and which windows are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMode {
    /// `ξ = δ` over the raw sliding windows.
    Swin,
    /// `ξ = σ(δ)·η` over the raw sliding windows.
    SwinScore,
    /// Top windows by η, refined once by the regression head, then scored as `SwinScore`.
    PropScore,
}

impl ScoreMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreMode::Swin => "swin",
            ScoreMode::SwinScore => "swin-score",
            ScoreMode::PropScore => "prop-score",
        }
    }

    pub fn needs_actionness(self) -> bool {
        self != ScoreMode::Swin
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swin" => Ok(ScoreMode::Swin),
            "swin-score" => Ok(ScoreMode::SwinScore),
            "prop-score" => Ok(ScoreMode::PropScore),
            other => Err(Error::Config(format!("unknown mode '{other}' (swin|swin-score|prop-score)"))),
        }
    }
}

/// One scored candidate for a query.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub query_index: usize,
    /// The scored clip (a raw window, or a refined proposal under `PropScore`).
    pub clip: ClipSpec,
    pub window: Interval,
    pub delta: f64,
    pub eta: f64,
    pub xi: f64,
    /// `window` shifted by the regressed offsets.
    pub refined: Interval,
}

/// Descending ξ, ties by earlier window start, then earlier end.
pub fn rank_order(a: &Prediction, b: &Prediction) -> Ordering {
    b.xi.total_cmp(&a.xi)
        .then(a.window.start.total_cmp(&b.window.start))
        .then(a.window.end.total_cmp(&b.window.end))
}

pub fn fuse(mode: ScoreMode, delta: f64, eta: f64) -> f64 {
    match mode {
        ScoreMode::Swin => delta,
        ScoreMode::SwinScore | ScoreMode::PropScore => sigmoid_scalar(delta) * eta,
    }
}

/// One query and the unit matrices of its video.
pub struct QueryContext<'a, T> {
    pub query_index: usize,
    pub query: &'a QueryInput<T>,
    pub features: &'a Matrix<f32>,
    pub concepts: &'a Matrix<f32>,
    pub video_frames: u64,
    pub unit_frames: usize,
}

impl<T: Scalar> QueryContext<'_, T> {
    pub fn clip_input(&self, clip: &ClipSpec) -> ClipInput<T> {
        ClipInput {
            feature: clip_feature(self.features, clip),
            concept: clip_concept(self.concepts, clip),
        }
    }
}

/// Fraction of windows kept by `PropScore` before refinement.
pub const DEFAULT_PROP_KEEP: f64 = 0.5;

/// Scores and ranks `windows` for one query. `actionness` is needed for the
/// fused modes; under `Swin` it only fills the η column (1.0 when absent).
pub fn score_query<T: Scalar>(
    acl: &AclParams<T>,
    actionness: Option<&ActionnessParams<T>>,
    ctx: &QueryContext<'_, T>,
    windows: &[ClipSpec],
    mode: ScoreMode,
    prop_keep: f64,
) -> Result<Vec<Prediction>> {
    if windows.is_empty() {
        return Ok(Vec::new());
    }
    if mode.needs_actionness() && actionness.is_none() {
        return Err(Error::Config(format!("mode {mode} needs an actionness checkpoint")));
    }
    let eta_of = |c: &ClipInput<T>| -> Result<f64> { actionness.map_or(Ok(1.0), |a| a.forward(&c.feature).map(|v| v.as_f64())) };
    let clips: Vec<ClipSpec> = match mode {
        ScoreMode::Swin | ScoreMode::SwinScore => windows.to_vec(),
        ScoreMode::PropScore => proposals(acl, ctx, windows, prop_keep, &eta_of)?,
    };
    let q = acl.project_query(ctx.query)?;
    let vf = ctx.video_frames as f64;
    let mut out = Vec::with_capacity(clips.len());
    for clip in clips {
        let input = ctx.clip_input(&clip);
        let o = acl.forward_projected(&acl.project_clip(&input)?, &q)?;
        let eta = eta_of(&input)?;
        let delta = o.delta.as_f64();
        let window = clip.interval(ctx.unit_frames, ctx.video_frames);
        out.push(Prediction {
            query_index: ctx.query_index,
            clip,
            window,
            delta,
            eta,
            xi: fuse(mode, delta, eta),
            refined: apply_offsets(window, o.start_offset.as_f64(), o.end_offset.as_f64(), ctx.unit_frames, vf),
        });
    }
    out.sort_by(rank_order);
    Ok(out)
}

/// The `ceil(keep·|windows|)` windows with the highest η, each moved by the
/// regression head and snapped back to whole units. Duplicates after
/// snapping keep their first (highest-η) occurrence.
fn proposals<T: Scalar>(
    acl: &AclParams<T>,
    ctx: &QueryContext<'_, T>,
    windows: &[ClipSpec],
    keep: f64,
    eta_of: &dyn Fn(&ClipInput<T>) -> Result<f64>,
) -> Result<Vec<ClipSpec>> {
    if !(keep > 0.0 && keep <= 1.0) {
        return Err(Error::Config(format!("prop_keep must be in (0, 1], got {keep}")));
    }
    let inputs: Vec<ClipInput<T>> = windows.iter().map(|c| ctx.clip_input(c)).collect();
    let mut by_eta: Vec<(f64, usize)> = inputs.iter().map(eta_of).collect::<Result<Vec<_>>>()?.into_iter().zip(0..).collect();
    by_eta.sort_by(|a, b| b.0.total_cmp(&a.0).then(windows[a.1].cmp(&windows[b.1])));
    let k = ((keep * windows.len() as f64).ceil() as usize).clamp(1, windows.len());
    let q = acl.project_query(ctx.query)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(k);
    for &(_, i) in &by_eta[..k] {
        let o = acl.forward_projected(&acl.project_clip(&inputs[i])?, &q)?;
        let window = windows[i].interval(ctx.unit_frames, ctx.video_frames);
        let moved = apply_offsets(
            window,
            o.start_offset.as_f64(),
            o.end_offset.as_f64(),
            ctx.unit_frames,
            ctx.video_frames as f64,
        );
        let snapped = ClipSpec::from_interval(moved, ctx.unit_frames, ctx.features.rows(), windows[i].context_units);
        if seen.insert(snapped) {
            out.push(snapped);
        }
    }
    Ok(out)
}
