use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datastore::DatasetManifest;
use crate::error::{Error, Result};
use crate::localize::run::QueryPredictions;

/// One line of a prediction file; boundaries are the refined interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub query_id: String,
    pub rank: usize,
    pub start_sec: f64,
    pub end_sec: f64,
    pub delta: f64,
    pub eta: f64,
    pub xi: f64,
}

pub fn prediction_rows(manifest: &DatasetManifest, results: &[QueryPredictions]) -> Vec<PredictionRow> {
    let fps = manifest.fps();
    results
        .iter()
        .flat_map(|r| {
            let id = &manifest.queries[r.query_index].id;
            r.predictions.iter().enumerate().map(move |(k, p)| {
                let (start_sec, end_sec) = p.refined.to_seconds(fps);
                PredictionRow {
                    query_id: id.clone(),
                    rank: k + 1,
                    start_sec,
                    end_sec,
                    delta: p.delta,
                    eta: p.eta,
                    xi: p.xi,
                }
            })
        })
        .collect()
}

/// CSV with header `query_id,rank,start_sec,end_sec,delta,eta,xi`.
pub fn write_predictions<W: Write>(w: W, rows: &[PredictionRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| Error::Numeric(format!("writing predictions: {e}")))?;
    }
    if rows.is_empty() {
        out.write_record(["query_id", "rank", "start_sec", "end_sec", "delta", "eta", "xi"])
            .map_err(|e| Error::Numeric(format!("writing predictions: {e}")))?;
    }
    out.flush().map_err(|e| Error::io(Path::new("<predictions>"), e))
}

pub fn save_predictions(path: &Path, rows: &[PredictionRow]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_predictions(std::io::BufWriter::new(f), rows)
}

pub fn parse_predictions(text: &str, path: &Path) -> Result<Vec<PredictionRow>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd
        .headers()
        .map_err(|e| Error::format("prediction file", path, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != ["query_id", "rank", "start_sec", "end_sec", "delta", "eta", "xi"] {
        return Err(Error::format("prediction file", path, format!("unexpected header {:?}", header)));
    }
    let mut rows = Vec::new();
    for rec in rd.deserialize() {
        let row: PredictionRow = rec.map_err(|e| Error::format("prediction file", path, e.to_string()))?;
        if !(row.start_sec < row.end_sec) || row.rank == 0 {
            return Err(Error::validation(&row.query_id, format!("bad prediction row at rank {}", row.rank)));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, path)
}

/// Rows grouped per query id and sorted by rank.
pub fn group_by_query(rows: Vec<PredictionRow>) -> BTreeMap<String, Vec<PredictionRow>> {
    let mut map: BTreeMap<String, Vec<PredictionRow>> = BTreeMap::new();
    for r in rows {
        map.entry(r.query_id.clone()).or_default().push(r);
    }
    for v in map.values_mut() {
        v.sort_by_key(|r| r.rank);
    }
    map
}
