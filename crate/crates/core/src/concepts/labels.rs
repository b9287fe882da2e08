use std::fs;
use std::path::Path;

use crate::concepts::VoPair;
use crate::datastore::EmbeddingTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityLabel {
    pub index: usize,
    pub words: Vec<String>,
    /// Mean embedding of the label's words that have one; zeros otherwise.
    pub embedding: Vec<f64>,
}

/// Pre-defined activity labels with word-level embeddings, read from
/// `index<TAB>label words` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelLexicon {
    labels: Vec<ActivityLabel>,
}

fn mean_embedding<'a>(words: impl Iterator<Item = &'a str>, table: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; table.dim()];
    let mut n = 0usize;
    for w in words {
        if let Some(v) = table.lookup(w) {
            n += 1;
            for (s, &x) in sum.iter_mut().zip(v) {
                *s += x as f64;
            }
        }
    }
    (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Best-matching label for a VO pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelMatch {
    pub index: Option<usize>,
    pub similarity: f64,
}

impl LabelLexicon {
    pub fn from_labels(entries: Vec<(usize, Vec<String>)>, table: &EmbeddingTable) -> Result<Self> {
        let mut labels: Vec<ActivityLabel> = entries
            .into_iter()
            .map(|(index, words)| {
                let embedding =
                    mean_embedding(words.iter().map(String::as_str), table).unwrap_or_else(|| vec![0.0; table.dim()]);
                ActivityLabel { index, words, embedding }
            })
            .collect();
        labels.sort_by_key(|l| l.index);
        if labels.windows(2).any(|p| p[0].index == p[1].index) {
            return Err(Error::validation("label lexicon", "duplicate label index"));
        }
        Ok(Self { labels })
    }

    pub fn parse(text: &str, path: &Path, table: &EmbeddingTable) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (index, words) = line
                .split_once('\t')
                .ok_or_else(|| Error::format("label lexicon", path, format!("line {}: expected index<TAB>words", i + 1)))?;
            let index: usize = index
                .trim()
                .parse()
                .map_err(|e| Error::format("label lexicon", path, format!("line {}: {e}", i + 1)))?;
            entries.push((index, words.split_whitespace().map(str::to_lowercase).collect()));
        }
        Self::from_labels(entries, table)
    }

    pub fn load(path: &Path, table: &EmbeddingTable) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path, table)
    }

    pub fn labels(&self) -> &[ActivityLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.labels.iter().map(|l| format!("{}\t{}\n", l.index, l.words.join(" "))).collect()
    }

    /// Highest cosine similarity between the mean of the VO word vectors and
    /// each label embedding; ties go to the lowest index.
    pub fn best_match(&self, vo: Option<&VoPair>, table: &EmbeddingTable) -> LabelMatch {
        let none = LabelMatch {
            index: None,
            similarity: 0.0,
        };
        let Some(vo) = vo else { return none };
        let Some(query) = mean_embedding([vo.verb.as_str(), vo.object.as_str()].into_iter(), table) else {
            return none;
        };
        let mut best = none;
        for label in &self.labels {
            let s = cosine(&query, &label.embedding);
            if best.index.is_none() || s > best.similarity {
                best = LabelMatch {
                    index: Some(label.index),
                    similarity: s,
                };
            }
        }
        best
    }
}

pub fn best_label_match(vo: Option<&VoPair>, lexicon: &LabelLexicon, table: &EmbeddingTable) -> LabelMatch {
    lexicon.best_match(vo, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn exact_label_scores_one() {
        let mut t = EmbeddingTable::new(3);
        t.insert("open", &[1.0, 0.0, 0.0]).unwrap();
        t.insert("door", &[0.0, 1.0, 0.0]).unwrap();
        t.insert("swim", &[0.0, 0.0, 1.0]).unwrap();
        let lex = LabelLexicon::from_labels(vec![(0, words("swim")), (1, words("open door"))], &t).unwrap();
        let m = lex.best_match(VoPair::new("open", "door").as_ref(), &t);
        assert_eq!(m.index, Some(1));
        assert!((m.similarity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_scores_zero() {
        let mut t = EmbeddingTable::new(2);
        t.insert("a", &[1.0, 0.0]).unwrap();
        t.insert("b", &[0.0, 1.0]).unwrap();
        let lex = LabelLexicon::from_labels(vec![(0, words("b"))], &t).unwrap();
        let m = lex.best_match(VoPair::new("a", "a").as_ref(), &t);
        assert_eq!(m.index, Some(0));
        assert_eq!(m.similarity, 0.0);
        assert_eq!(lex.best_match(None, &t), LabelMatch { index: None, similarity: 0.0 });
    }

    #[test]
    fn matches_exhaustive_scan_and_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut t = EmbeddingTable::new(5);
        let vocab: Vec<String> = (0..12).map(|i| format!("w{i}")).collect();
        for w in &vocab {
            let v: Vec<f32> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            t.insert(w, &v).unwrap();
        }
        let entries: Vec<(usize, Vec<String>)> =
            (0..6).map(|i| (i, vec![vocab[2 * i].clone(), vocab[2 * i + 1].clone()])).collect();
        let lex = LabelLexicon::from_labels(entries.clone(), &t).unwrap();
        let vo = VoPair::new("w3", "w8").unwrap();

        // brute force: recompute every embedding and cosine independently
        let get = |w: &str| t.lookup(w).unwrap().iter().map(|&x| x as f64).collect::<Vec<f64>>();
        let q: Vec<f64> = get("w3").iter().zip(get("w8")).map(|(a, b)| (a + b) / 2.0).collect();
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for (idx, ws) in &entries {
            let e: Vec<f64> = get(&ws[0]).iter().zip(get(&ws[1])).map(|(a, b)| (a + b) / 2.0).collect();
            let c = q.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>()
                / (q.iter().map(|a| a * a).sum::<f64>().sqrt() * e.iter().map(|a| a * a).sum::<f64>().sqrt());
            if c > best.1 {
                best = (*idx, c);
            }
        }
        let m = lex.best_match(Some(&vo), &t);
        assert_eq!(m.index, Some(best.0));
        assert!((m.similarity - best.1).abs() < 1e-12);

        let mut scaled = t.clone();
        let v: Vec<f32> = t.lookup("w3").unwrap().iter().map(|x| x * 7.5).collect();
        scaled.insert("w3", &v).unwrap();
        for w in &vocab[..4] {
            let v: Vec<f32> = scaled.lookup(w).unwrap().iter().map(|x| x * 3.0).collect();
            scaled.insert(w, &v).unwrap();
        }
        let lex2 = LabelLexicon::from_labels(entries, &scaled).unwrap();
        let _ = lex2.best_match(Some(&vo), &scaled);
        // scaling a whole label embedding leaves its cosine unchanged
        let lex3 = LabelLexicon {
            labels: lex
                .labels()
                .iter()
                .map(|l| ActivityLabel {
                    embedding: l.embedding.iter().map(|x| x * (1.0 + l.index as f64)).collect(),
                    ..l.clone()
                })
                .collect(),
        };
        assert_eq!(lex3.best_match(Some(&vo), &t).index, m.index);
    }
}
