use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{AclParams, ClipInput, ModelDims, QueryInput, Variant};
use crate::numcore::params::{assign_flat, flatten};
use crate::numcore::{grad_check, GradCheckReport};

/// Finite-difference check of the full batch loss on random inputs, in f64.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradCheckConfig {
    pub variant: Variant,
    pub clip_dim: usize,
    pub concept_dim: usize,
    pub sentence_dim: usize,
    pub vo_dim: usize,
    pub text_dim: usize,
    pub concept_proj_dim: usize,
    pub hidden: usize,
    pub batch_size: usize,
    pub eps: f64,
    pub gamma: f64,
    pub beta: f64,
    pub seed: u64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Full,
            clip_dim: 24,
            concept_dim: 8,
            sentence_dim: 20,
            vo_dim: 12,
            text_dim: 32,
            concept_proj_dim: 16,
            hidden: 32,
            batch_size: 4,
            eps: 1e-5,
            gamma: 1.0,
            beta: 0.01,
            seed: 0,
        }
    }
}

pub fn acl_gradcheck(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    let dims = ModelDims::new(cfg.clip_dim, cfg.concept_dim, cfg.sentence_dim, cfg.vo_dim).with_widths(
        cfg.text_dim,
        cfg.concept_proj_dim,
        cfg.hidden,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let params = AclParams::<f64>::init(cfg.variant, dims, &mut rng)?;
    let mut vec = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };
    let n = cfg.batch_size;
    let clips: Vec<ClipInput<f64>> = (0..n)
        .map(|_| ClipInput {
            feature: vec(cfg.clip_dim),
            concept: vec(cfg.concept_dim),
        })
        .collect();
    let queries: Vec<QueryInput<f64>> = (0..n)
        .map(|_| QueryInput {
            sentence: vec(cfg.sentence_dim),
            vo: vec(cfg.vo_dim),
        })
        .collect();
    let targets: Vec<(f64, f64)> = (0..n).map(|_| (2.0 * vec(1)[0], 2.0 * vec(1)[0])).collect();
    let cr: Vec<&ClipInput<f64>> = clips.iter().collect();
    let qr: Vec<&QueryInput<f64>> = queries.iter().collect();

    let mut grads = params.zeros_like();
    params.batch_loss(&cr, &qr, &targets, cfg.gamma, cfg.beta, Some(&mut grads))?;
    let mut probe = params.clone();
    grad_check(
        |x| {
            assign_flat(&mut probe, x).expect("same parameter count");
            probe
                .batch_loss(&cr, &qr, &targets, cfg.gamma, cfg.beta, None)
                .map(|l| l.total)
                .unwrap_or(f64::NAN)
        },
        &flatten(&params),
        &flatten(&grads),
        cfg.eps,
        None,
    )
}
