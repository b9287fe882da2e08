use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Word-embedding dimension of the GloVe tables the model is built around.
pub const WORD_DIM: usize = 300;

/// Word → vector lookup read from GloVe-style text. Lookups are case-folded
/// to lowercase; absent words yield `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        }
    }

    /// Inserts or replaces a word's vector.
    pub fn insert(&mut self, word: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::shape("EmbeddingTable::insert", format!("vector of dim {}", self.dim), vector.len()));
        }
        let key = word.to_lowercase();
        match self.index.get(&key) {
            Some(&i) => self.vectors[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(key.clone(), self.words.len());
                self.words.push(key);
                self.vectors.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn lookup(&self, word: &str) -> Option<&[f32]> {
        let i = match self.index.get(word) {
            Some(&i) => i,
            None => *self.index.get(&word.to_lowercase())?,
        };
        Some(&self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut table: Option<Self> = None;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let word = parts.next().unwrap_or_default();
            let values = parts
                .map(str::parse::<f32>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::format("embedding table", path, format!("line {}: {e}", lineno + 1)))?;
            if values.is_empty() {
                return Err(Error::format("embedding table", path, format!("line {}: no vector", lineno + 1)));
            }
            let t = table.get_or_insert_with(|| Self::new(values.len()));
            if values.len() != t.dim {
                return Err(Error::format(
                    "embedding table",
                    path,
                    format!("line {}: dimension {} differs from {}", lineno + 1, values.len(), t.dim),
                ));
            }
            t.insert(word, &values)?;
        }
        table.ok_or_else(|| Error::format("embedding table", path, "no entries"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        for (i, word) in self.words.iter().enumerate() {
            write!(w, "{word}").map_err(io)?;
            for v in &self.vectors[i * self.dim..(i + 1) * self.dim] {
                write!(w, " {v}").map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}
