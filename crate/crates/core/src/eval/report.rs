use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::metrics::{ArfPoint, EvalReport};

/// Column layout of the recall table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportLayout {
    /// R@{1,5} at IoU {0.7, 0.5}.
    Charades,
    /// R@{1,5} at IoU {0.5, 0.3, 0.1}.
    Tacos,
}

impl ReportLayout {
    pub fn columns(self) -> Vec<(usize, f64)> {
        let ms: &[f64] = match self {
            ReportLayout::Charades => &[0.7, 0.5],
            ReportLayout::Tacos => &[0.5, 0.3, 0.1],
        };
        [1, 5].iter().flat_map(|&n| ms.iter().map(move |&m| (n, m))).collect()
    }

    pub fn header(self) -> String {
        let mut h = String::from("method");
        for (n, m) in self.columns() {
            h.push_str(&format!(",R@{n}_{m}"));
        }
        h
    }
}

impl std::str::FromStr for ReportLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "charades" => Ok(ReportLayout::Charades),
            "tacos" => Ok(ReportLayout::Tacos),
            other => Err(Error::Config(format!("unknown report layout '{other}' (charades|tacos)"))),
        }
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::format("report", path, e.to_string())
}

pub fn render_report(reports: &[EvalReport], layout: ReportLayout) -> Result<String> {
    let path = Path::new("<report>");
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = layout.header();
    w.write_record(header.split(',')).map_err(|e| csv_err(path, e))?;
    for r in reports {
        let mut rec = vec![r.method.clone()];
        for (n, m) in layout.columns() {
            let v = r
                .get(n, m)
                .ok_or_else(|| Error::Config(format!("report for {} lacks R@{n} at IoU {m}", r.method)))?;
            rec.push(v.to_string());
        }
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes the recall table to `path`.
pub fn emit_report(reports: &[EvalReport], layout: ReportLayout, path: &Path) -> Result<()> {
    std::fs::write(path, render_report(reports, layout)?).map_err(|e| Error::io(path, e))
}

/// `(method, values in column order)` rows of a recall table.
pub fn parse_report(text: &str, path: &Path) -> Result<(ReportLayout, Vec<(String, Vec<f64>)>)> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| csv_err(path, e))?.iter().collect::<Vec<_>>().join(",");
    let layout = [ReportLayout::Charades, ReportLayout::Tacos]
        .into_iter()
        .find(|l| l.header() == header)
        .ok_or_else(|| Error::format("report", path, format!("unknown header '{header}'")))?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let values = rec
            .iter()
            .skip(1)
            .map(|v| v.parse::<f64>().map_err(|e| Error::format("report", path, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        rows.push((rec[0].to_owned(), values));
    }
    Ok((layout, rows))
}

pub fn render_arf(curve: &[ArfPoint]) -> String {
    let mut s = String::from("frequency,avg_recall\n");
    for p in curve {
        s.push_str(&format!("{},{}\n", p.frequency, p.avg_recall));
    }
    s
}

pub fn emit_arf(curve: &[ArfPoint], path: &Path) -> Result<()> {
    std::fs::write(path, render_arf(curve)).map_err(|e| Error::io(path, e))
}

pub fn parse_arf(text: &str, path: &Path) -> Result<Vec<ArfPoint>> {
    let mut lines = text.lines();
    if lines.next() != Some("frequency,avg_recall") {
        return Err(Error::format("AR-F file", path, "expected header 'frequency,avg_recall'"));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (f, r) = l
                .split_once(',')
                .ok_or_else(|| Error::format("AR-F file", path, format!("bad row '{l}'")))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::format("AR-F file", path, e.to_string()));
            Ok(ArfPoint {
                frequency: parse(f)?,
                avg_recall: parse(r)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::metrics::{RankedQuery, DEFAULT_MS, DEFAULT_NS};
    use crate::temporal::Interval;

    fn report() -> EvalReport {
        let q = RankedQuery {
            ranked: vec![Interval::new(0.0, 7.0).unwrap()],
            gts: vec![Interval::new(0.0, 10.0).unwrap()],
        };
        EvalReport::evaluate("ACL", &[q], &DEFAULT_NS, &DEFAULT_MS)
    }

    #[test]
    fn golden_headers() {
        assert_eq!(ReportLayout::Charades.header(), "method,R@1_0.7,R@1_0.5,R@5_0.7,R@5_0.5");
        assert_eq!(ReportLayout::Tacos.header(), "method,R@1_0.5,R@1_0.3,R@1_0.1,R@5_0.5,R@5_0.3,R@5_0.1");
    }

    #[test]
    fn one_method_one_row_round_trip() {
        let r = report();
        let text = render_report(std::slice::from_ref(&r), ReportLayout::Tacos).unwrap();
        assert_eq!(text, "method,R@1_0.5,R@1_0.3,R@1_0.1,R@5_0.5,R@5_0.3,R@5_0.1\nACL,1,1,1,1,1,1\n");
        let (layout, rows) = parse_report(&text, Path::new("r.csv")).unwrap();
        assert_eq!(layout, ReportLayout::Tacos);
        assert_eq!(rows.len(), 1);
        for ((n, m), v) in layout.columns().into_iter().zip(&rows[0].1) {
            assert!((r.get(n, m).unwrap() - v).abs() < 1e-9);
        }
        let text = render_report(&[r], ReportLayout::Charades).unwrap();
        assert!(text.ends_with("ACL,1,1,1,1\n"));
    }

    #[test]
    fn arf_round_trip() {
        let c = vec![
            ArfPoint {
                frequency: 0.05,
                avg_recall: 1.0 / 3.0,
            },
            ArfPoint {
                frequency: 0.1,
                avg_recall: 0.75,
            },
        ];
        let back = parse_arf(&render_arf(&c), Path::new("a.csv")).unwrap();
        assert_eq!(back, c);
        assert!(parse_arf("x,y\n", Path::new("a.csv")).is_err());
    }
}
