use crate::temporal::Interval;

/// One query's ranked candidates and its ground-truth segment(s).
#[derive(Debug, Clone, PartialEq)]
pub struct RankedQuery {
    pub ranked: Vec<Interval>,
    pub gts: Vec<Interval>,
}

/// `r(n, m, q)`: whether any of the top `n` candidates reaches tIoU `m`
/// with any ground-truth segment.
pub fn query_hit(q: &RankedQuery, n: usize, m: f64) -> bool {
    q.ranked.iter().take(n).any(|p| q.gts.iter().any(|g| p.tiou(*g) >= m))
}

/// R@n,IoU=m averaged over queries; a query without candidates scores 0.
pub fn recall_at(queries: &[RankedQuery], n: usize, m: f64) -> f64 {
    if queries.is_empty() {
        return 0.0;
    }
    queries.iter().filter(|q| query_hit(q, n, m)).count() as f64 / queries.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecallEntry {
    pub n: usize,
    pub m: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArfPoint {
    pub frequency: f64,
    pub avg_recall: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub num_queries: usize,
    pub recalls: Vec<RecallEntry>,
    pub arf: Vec<ArfPoint>,
}

pub const DEFAULT_NS: [usize; 2] = [1, 5];
pub const DEFAULT_MS: [f64; 4] = [0.1, 0.3, 0.5, 0.7];

impl EvalReport {
    pub fn evaluate(method: &str, queries: &[RankedQuery], ns: &[usize], ms: &[f64]) -> Self {
        let recalls = ns
            .iter()
            .flat_map(|&n| {
                ms.iter().map(move |&m| RecallEntry {
                    n,
                    m,
                    value: recall_at(queries, n, m),
                })
            })
            .collect();
        Self {
            method: method.to_owned(),
            num_queries: queries.len(),
            recalls,
            arf: Vec::new(),
        }
    }

    pub fn get(&self, n: usize, m: f64) -> Option<f64> {
        self.recalls.iter().find(|r| r.n == n && (r.m - m).abs() < 1e-12).map(|r| r.value)
    }
}

/// Ranked windows of one AR-F item (a video or a query) with its segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ArfItem {
    pub duration_sec: f64,
    pub ranked: Vec<Interval>,
    pub gts: Vec<Interval>,
}

/// Number of windows kept at `frequency` windows per second.
pub fn windows_kept(frequency: f64, duration_sec: f64) -> usize {
    // guard against products like 0.1·30 = 3.0000000000000004
    (frequency * duration_sec - 1e-9).ceil().max(0.0) as usize
}

/// Average recall–frequency curve: for each frequency keep the top
/// `ceil(F·duration)` windows of every item, take the fraction of its
/// segments matched at `iou`, and average over items with segments.
pub fn ar_f(items: &[ArfItem], iou: f64, frequencies: &[f64]) -> Vec<ArfPoint> {
    let scored: Vec<&ArfItem> = items.iter().filter(|i| !i.gts.is_empty()).collect();
    frequencies
        .iter()
        .map(|&f| {
            let total: f64 = scored
                .iter()
                .map(|item| {
                    let kept = &item.ranked[..windows_kept(f, item.duration_sec).min(item.ranked.len())];
                    let hit = item.gts.iter().filter(|g| kept.iter().any(|w| w.tiou(**g) >= iou)).count();
                    hit as f64 / item.gts.len() as f64
                })
                .sum();
            ArfPoint {
                frequency: f,
                avg_recall: if scored.is_empty() { 0.0 } else { total / scored.len() as f64 },
            }
        })
        .collect()
}
