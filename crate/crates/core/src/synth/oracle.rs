use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datastore::Dataset;
use crate::error::{Error, Result};
use crate::eval::{EvalReport, RankedQuery};
use crate::synth::generate::Truth;
use crate::temporal::{ClipSpec, Interval};

/// The oracle's pick for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAnswer {
    pub query_index: usize,
    pub class: usize,
    pub window: ClipSpec,
    /// tIoU of the picked window with the ground truth.
    pub tiou: f64,
    /// Best tIoU any window of the grid reaches.
    pub ceiling: f64,
    /// All windows of the video, best oracle score first.
    pub ranked: Vec<Interval>,
}

fn class_of(ds: &Dataset, truth: &Truth, qi: usize) -> Result<usize> {
    let q = &ds.manifest.queries[qi];
    let class = *truth
        .query_class
        .get(&q.id)
        .ok_or_else(|| Error::validation(&q.id, "query missing from the truth file"))?;
    if class >= ds.manifest.concept_dim() {
        return Err(Error::validation(&q.id, format!("class {class} outside the concept dimension")));
    }
    Ok(class)
}

/// Scores every window of the query's video by the mean, over its central
/// units, of the cosine between the unit's concept vector and the one-hot of
/// the query's class, and ranks them.
/// Ties keep window order.
pub fn oracle_localize(ds: &Dataset, truth: &Truth, windows: &[Vec<ClipSpec>]) -> Result<Vec<OracleAnswer>> {
    let l_u = ds.manifest.unit_frames();
    let fps = ds.manifest.fps();
    let mut out = Vec::with_capacity(ds.manifest.queries.len());
    for (qi, q) in ds.manifest.queries.iter().enumerate() {
        let class = class_of(ds, truth, qi)?;
        let video = &ds.manifest.videos[q.video_index];
        let wins = &windows[q.video_index];
        if wins.is_empty() {
            return Err(Error::validation(&q.id, "video has no windows"));
        }
        let gt = q.ground_truth(fps);
        let concepts = &ds.concepts[q.video_index];
        let unit_cos: Vec<f64> = (0..concepts.rows())
            .map(|u| {
                let row = concepts.row(u);
                let norm = row.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
                if norm > 0.0 {
                    f64::from(row[class]) / norm
                } else {
                    0.0
                }
            })
            .collect();
        let mut scored: Vec<(f64, usize)> = wins
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let units = &unit_cos[w.start_unit..w.end_unit().min(unit_cos.len())];
                (units.iter().sum::<f64>() / units.len().max(1) as f64, i)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let ranked: Vec<Interval> = scored.iter().map(|&(_, i)| wins[i].interval(l_u, video.frames)).collect();
        let ceiling = ranked.iter().map(|w| w.tiou(gt)).fold(0.0, f64::max);
        out.push(OracleAnswer {
            query_index: qi,
            class,
            window: wins[scored[0].1],
            tiou: ranked[0].tiou(gt),
            ceiling,
            ranked,
        });
    }
    Ok(out)
}

pub fn oracle_report(answers: &[OracleAnswer], ds: &Dataset, ns: &[usize], ms: &[f64]) -> EvalReport {
    let fps = ds.manifest.fps();
    let queries: Vec<RankedQuery> = answers
        .iter()
        .map(|a| RankedQuery {
            ranked: a.ranked.clone(),
            gts: vec![ds.manifest.queries[a.query_index].ground_truth(fps)],
        })
        .collect();
    EvalReport::evaluate("oracle", &queries, ns, ms)
}

/// Recall of uniformly random rankings, averaged over `trials` shuffles.
pub fn random_baseline(
    ds: &Dataset,
    windows: &[Vec<ClipSpec>],
    seed: u64,
    trials: usize,
    ns: &[usize],
    ms: &[f64],
) -> Result<EvalReport> {
    if trials < 100 {
        return Err(Error::Config(format!("random baseline needs at least 100 trials, got {trials}")));
    }
    let l_u = ds.manifest.unit_frames();
    let fps = ds.manifest.fps();
    let mut queries: Vec<RankedQuery> = ds
        .manifest
        .queries
        .iter()
        .map(|q| {
            let frames = ds.manifest.videos[q.video_index].frames;
            RankedQuery {
                ranked: windows[q.video_index].iter().map(|w| w.interval(l_u, frames)).collect(),
                gts: vec![q.ground_truth(fps)],
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![0.0; ns.len() * ms.len()];
    for _ in 0..trials {
        queries.iter_mut().for_each(|q| q.ranked.shuffle(&mut rng));
        let r = EvalReport::evaluate("random", &queries, ns, ms);
        sums.iter_mut().zip(&r.recalls).for_each(|(s, e)| *s += e.value);
    }
    let mut report = EvalReport::evaluate("random", &queries, ns, ms);
    report.recalls.iter_mut().zip(&sums).for_each(|(e, s)| e.value = s / trials as f64);
    Ok(report)
}
