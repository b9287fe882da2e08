use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datastore::Dataset;
use crate::error::{Error, Result};
use crate::model::acl::{AclParams, ClipInput, QueryInput};
use crate::model::actionness::ActionnessParams;
use crate::model::config::{ActionnessConfig, ModelDims, TrainConfig, Variant};
use crate::model::inputs::{clip_input, prepare_query};
use crate::numcore::{AdamConfig, AdamState, Scalar};
use crate::temporal::{actionness_labels, clip_feature, sliding_windows, TrainingSample};

/// One optimisation step of the alignment network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub step: usize,
    pub alignment: f64,
    pub regression: f64,
    pub total: f64,
}

pub fn write_log_csv<W: Write>(w: &mut W, rows: &[LogRow]) -> std::io::Result<()> {
    writeln!(w, "step,L_aln,L_rgr,L_loc")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.step, r.alignment, r.regression, r.total)?;
    }
    Ok(())
}

/// Aligned clip/query pairs ready for batching. `pairs[k] = (clip, query, targets)`
/// indexes into `clips` and `queries`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSet<T> {
    pub clips: Vec<ClipInput<T>>,
    pub queries: Vec<QueryInput<T>>,
    pub pairs: Vec<(usize, usize, (T, T))>,
}

impl<T: Scalar> AlignedSet<T> {
    pub fn from_samples(ds: &Dataset, samples: &[TrainingSample]) -> Result<Self> {
        let mut query_slot: HashMap<usize, usize> = HashMap::new();
        let mut set = AlignedSet {
            clips: Vec::with_capacity(samples.len()),
            queries: Vec::new(),
            pairs: Vec::with_capacity(samples.len()),
        };
        for s in samples {
            let slot = match query_slot.get(&s.query_index) {
                Some(&k) => k,
                None => {
                    set.queries.push(prepare_query(ds, s.query_index)?.input);
                    query_slot.insert(s.query_index, set.queries.len() - 1);
                    set.queries.len() - 1
                }
            };
            set.clips.push(clip_input(ds, s.video_index, &s.clip));
            set.pairs
                .push((set.clips.len() - 1, slot, (T::lit(s.targets.0), T::lit(s.targets.1))));
        }
        Ok(set)
    }
}

#[derive(Debug, Clone)]
pub struct AclTraining<T> {
    pub params: AclParams<T>,
    pub log: Vec<LogRow>,
}

fn adam(lr: f64) -> AdamConfig {
    AdamConfig {
        lr,
        ..AdamConfig::default()
    }
}

/// Trains the alignment network on shuffled batches of `cfg.batch_size`
/// aligned pairs; every batch scores all `N×N` cross pairs. A trailing
/// partial batch is dropped. Bit-deterministic for a given seed.
pub fn train_acl<T: Scalar>(set: &AlignedSet<T>, variant: Variant, dims: ModelDims, cfg: &TrainConfig) -> Result<AclTraining<T>> {
    cfg.validate()?;
    let n = cfg.batch_size;
    if set.pairs.len() < n {
        return Err(Error::validation(
            "training set",
            format!("{} aligned samples, fewer than the batch size {n}", set.pairs.len()),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = AclParams::init(variant, dims, &mut rng)?;
    let mut opt = AdamState::for_params(&params, adam(cfg.lr));
    let (gamma, beta) = (T::lit(cfg.gamma), T::lit(cfg.beta));
    let mut order: Vec<usize> = (0..set.pairs.len()).collect();
    let mut log = Vec::new();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks_exact(n) {
            let clips: Vec<&ClipInput<T>> = batch.iter().map(|&k| &set.clips[set.pairs[k].0]).collect();
            let queries: Vec<&QueryInput<T>> = batch.iter().map(|&k| &set.queries[set.pairs[k].1]).collect();
            let targets: Vec<(T, T)> = batch.iter().map(|&k| set.pairs[k].2).collect();
            let mut grads = params.zeros_like();
            let loss = params.batch_loss(&clips, &queries, &targets, gamma, beta, Some(&mut grads))?;
            let step = log.len();
            if !loss.total.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss at step {step}: L_aln={} L_rgr={}",
                    loss.alignment, loss.regression
                )));
            }
            opt.step_set(&mut params, &grads)?;
            log.push(LogRow {
                step,
                alignment: loss.alignment.as_f64(),
                regression: loss.regression.as_f64(),
                total: loss.total.as_f64(),
            });
        }
    }
    Ok(AclTraining { params, log })
}

/// Pooled window features with foreground/background labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionnessSet<T> {
    pub features: Vec<Vec<T>>,
    pub labels: Vec<bool>,
}

impl<T: Scalar> ActionnessSet<T> {
    /// Every window of every video at `scales_frames`, labelled against all of
    /// the video's ground-truth segments; windows in the ignore band are dropped.
    pub fn from_dataset(
        ds: &Dataset,
        scales_frames: &[usize],
        overlap: f64,
        context_frames: usize,
        pos_tiou: f64,
        neg_tiou: f64,
    ) -> Result<Self> {
        let m = &ds.manifest;
        let l_u = m.unit_frames();
        let by_video = m.queries_by_video();
        let mut set = ActionnessSet {
            features: Vec::new(),
            labels: Vec::new(),
        };
        for (vi, video) in m.videos.iter().enumerate() {
            let windows = sliding_windows(video.num_units, l_u, scales_frames, overlap, context_frames)?;
            let intervals: Vec<_> = windows.iter().map(|c| c.interval(l_u, video.frames)).collect();
            let gts: Vec<_> = by_video[vi].iter().map(|&q| m.queries[q].ground_truth(m.fps())).collect();
            for (clip, label) in windows.iter().zip(actionness_labels(&intervals, &gts, pos_tiou, neg_tiou)?) {
                if let Some(y) = label {
                    set.features.push(clip_feature(&ds.features[vi], clip));
                    set.labels.push(y);
                }
            }
        }
        Ok(set)
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }
}

#[derive(Debug, Clone)]
pub struct ActionnessTraining<T> {
    pub params: ActionnessParams<T>,
    /// `(step, mean BCE)` per batch.
    pub log: Vec<(usize, f64)>,
}

/// Class-balanced epoch order: every majority sample once and the minority
/// class oversampled (cycling through reshuffled copies) to the same count.
fn balanced_order(labels: &[bool], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let (mut pos, mut neg): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| labels[i]);
    pos.shuffle(rng);
    neg.shuffle(rng);
    let (major, minor) = if pos.len() >= neg.len() { (pos, neg) } else { (neg, pos) };
    let mut order = major.clone();
    let mut pool = minor.clone();
    let mut k = 0;
    for _ in 0..major.len() {
        if k == pool.len() {
            pool.shuffle(rng);
            k = 0;
        }
        order.push(pool[k]);
        k += 1;
    }
    order.shuffle(rng);
    order
}

pub fn train_actionness<T: Scalar>(set: &ActionnessSet<T>, cfg: &ActionnessConfig) -> Result<ActionnessTraining<T>> {
    cfg.validate()?;
    let pos = set.positives();
    if pos == 0 || pos == set.labels.len() {
        return Err(Error::validation(
            "actionness training set",
            format!("needs both classes, found {pos} foreground of {}", set.labels.len()),
        ));
    }
    let dim = set.features[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ActionnessParams::init(dim, cfg.hidden, &mut rng);
    let mut opt = AdamState::for_params(&params, adam(cfg.lr));
    let mut log = Vec::new();
    for _ in 0..cfg.epochs {
        let order = balanced_order(&set.labels, &mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let xs: Vec<&[T]> = batch.iter().map(|&i| set.features[i].as_slice()).collect();
            let ys: Vec<bool> = batch.iter().map(|&i| set.labels[i]).collect();
            let mut grads = params.zeros_like();
            let loss = params.batch_loss(&xs, &ys, Some(&mut grads))?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!("non-finite actionness loss at step {}", log.len())));
            }
            opt.step_set(&mut params, &grads)?;
            log.push((log.len(), loss.as_f64()));
        }
    }
    Ok(ActionnessTraining { params, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn tiny_set(rng: &mut ChaCha8Rng, d: &ModelDims, n: usize) -> AlignedSet<f64> {
        let v = |rng: &mut ChaCha8Rng, k: usize| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        AlignedSet {
            clips: (0..n)
                .map(|_| ClipInput {
                    feature: v(rng, d.clip_dim),
                    concept: v(rng, d.concept_dim),
                })
                .collect(),
            queries: (0..n)
                .map(|_| QueryInput {
                    sentence: v(rng, d.sentence_dim),
                    vo: v(rng, d.vo_dim),
                })
                .collect(),
            pairs: (0..n).map(|i| (i, i, (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))).collect(),
        }
    }

    fn dims() -> ModelDims {
        ModelDims::new(12, 5, 7, 8).with_widths(8, 4, 16)
    }

    #[test]
    fn fixed_batch_loss_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = tiny_set(&mut rng, &dims(), 4);
        let cfg = TrainConfig {
            batch_size: 4,
            epochs: 10,
            ..TrainConfig::default()
        };
        let run = train_acl(&set, Variant::Full, dims(), &cfg).unwrap();
        assert_eq!(run.log.len(), 10);
        for w in run.log.windows(2) {
            assert!(w[1].total < w[0].total, "{:?}", run.log);
        }
    }

    #[test]
    fn equal_seeds_are_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let set = tiny_set(&mut rng, &dims(), 9);
        let cfg = TrainConfig {
            batch_size: 3,
            epochs: 2,
            seed: 5,
            ..TrainConfig::default()
        };
        let a = train_acl(&set, Variant::Concat, dims(), &cfg).unwrap();
        let b = train_acl(&set, Variant::Concat, dims(), &cfg).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.log, b.log);
        let c = train_acl(&set, Variant::Concat, dims(), &TrainConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a.params, c.params);
    }

    #[test]
    fn too_few_samples_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = tiny_set(&mut rng, &dims(), 3);
        assert!(train_acl(&set, Variant::Full, dims(), &TrainConfig::default()).is_err());
    }

    #[test]
    fn log_csv_header() {
        let mut out = Vec::new();
        write_log_csv(
            &mut out,
            &[LogRow {
                step: 0,
                alignment: 1.5,
                regression: 0.25,
                total: 1.5025,
            }],
        )
        .unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "step,L_aln,L_rgr,L_loc\n0,1.5,0.25,1.5025\n");
    }

    fn separable(rng: &mut ChaCha8Rng, n: usize) -> ActionnessSet<f64> {
        let mut set = ActionnessSet {
            features: Vec::new(),
            labels: Vec::new(),
        };
        for i in 0..n {
            // 1 in 4 positive, separated along the first axis
            let y = i % 4 == 0;
            let mut x: Vec<f64> = (0..6).map(|_| rng.random_range(-0.3..0.3)).collect();
            x[0] += if y { 1.0 } else { -1.0 };
            set.features.push(x);
            set.labels.push(y);
        }
        set
    }

    fn auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let (mut rank_sum, mut pos) = (0.0, 0.0);
        for (r, &i) in idx.iter().enumerate() {
            if labels[i] {
                rank_sum += (r + 1) as f64;
                pos += 1.0;
            }
        }
        let neg = scores.len() as f64 - pos;
        (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg)
    }

    #[test]
    fn actionness_learns_separable_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let train = separable(&mut rng, 400);
        let test = separable(&mut rng, 200);
        let cfg = ActionnessConfig {
            hidden: 16,
            batch_size: 32,
            epochs: 8,
            ..ActionnessConfig::default()
        };
        let run = train_actionness(&train, &cfg).unwrap();
        assert!(run.log.len() <= 200);
        let acc = train
            .features
            .iter()
            .zip(&train.labels)
            .filter(|(x, &y)| (run.params.forward(x).unwrap() > 0.5) == y)
            .count() as f64
            / train.labels.len() as f64;
        assert!(acc > 0.95, "accuracy {acc}");
        let scores: Vec<f64> = test.features.iter().map(|x| run.params.forward(x).unwrap()).collect();
        assert!(auc(&scores, &test.labels) > 0.5);
        let again = train_actionness(&train, &cfg).unwrap();
        assert_eq!(again.params, run.params);
    }

    #[test]
    fn single_class_rejected() {
        let set = ActionnessSet {
            features: vec![vec![0.0; 3]; 4],
            labels: vec![false; 4],
        };
        assert!(train_actionness(&set, &ActionnessConfig::default()).is_err());
    }

    #[test]
    fn balanced_order_counts() {
        let labels: Vec<bool> = (0..10).map(|i| i < 3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let order = balanced_order(&labels, &mut rng);
        assert_eq!(order.len(), 14);
        assert_eq!(order.iter().filter(|&&i| labels[i]).count(), 7);
    }
}
