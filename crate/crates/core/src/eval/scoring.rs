use std::collections::HashMap;

use crate::datastore::DatasetManifest;
use crate::error::{Error, Result};
use crate::eval::metrics::{ArfItem, RankedQuery};
use crate::localize::{group_by_query, PredictionRow};
use crate::temporal::Interval;

/// Frequencies (windows per second) at which AR-F is reported by default.
pub const DEFAULT_FREQUENCIES: [f64; 7] = [0.0125, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15];

/// Per-query ranked intervals and AR-F items built from a prediction file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSet {
    pub queries: Vec<RankedQuery>,
    pub arf_items: Vec<ArfItem>,
}

/// Matches prediction rows to the manifest's queries. A query without rows
/// counts as a miss; rows naming an unknown query or repeating a rank are
/// rejected.
pub fn scored_set(manifest: &DatasetManifest, rows: Vec<PredictionRow>) -> Result<ScoredSet> {
    let fps = manifest.fps();
    let index: HashMap<&str, usize> = manifest.queries.iter().enumerate().map(|(i, q)| (q.id.as_str(), i)).collect();
    let mut ranked: Vec<Vec<Interval>> = vec![Vec::new(); manifest.queries.len()];
    for (id, group) in group_by_query(rows) {
        let &qi = index
            .get(id.as_str())
            .ok_or_else(|| Error::validation(&id, "prediction for a query not in the manifest"))?;
        if group.windows(2).any(|w| w[0].rank == w[1].rank) {
            return Err(Error::validation(&id, "repeated rank"));
        }
        ranked[qi] = group.iter().map(|r| Interval::from_seconds(r.start_sec, r.end_sec, fps)).collect();
    }
    let mut out = ScoredSet {
        queries: Vec::with_capacity(ranked.len()),
        arf_items: Vec::with_capacity(ranked.len()),
    };
    for (q, r) in manifest.queries.iter().zip(ranked) {
        let gts = vec![q.ground_truth(fps)];
        out.arf_items.push(ArfItem {
            duration_sec: manifest.videos[q.video_index].duration_sec(),
            ranked: r.clone(),
            gts: gts.clone(),
        });
        out.queries.push(RankedQuery { ranked: r, gts });
    }
    Ok(out)
}
