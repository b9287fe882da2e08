use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Verb,
    Noun,
    Other,
}

impl PosTag {
    fn code(self) -> &'static str {
        match self {
            PosTag::Verb => "V",
            PosTag::Noun => "N",
            PosTag::Other => "O",
        }
    }
}

/// Word → coarse part-of-speech, read from `word<TAB>V|N|O` lines.
/// Unlisted words are tagged [`PosTag::Other`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PosLexicon {
    tags: HashMap<String, PosTag>,
    order: Vec<String>,
}

impl PosLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, tag: PosTag) {
        let w = word.to_lowercase();
        if self.tags.insert(w.clone(), tag).is_none() {
            self.order.push(w);
        }
    }

    pub fn tag(&self, word: &str) -> PosTag {
        self.tags.get(word).copied().unwrap_or(PosTag::Other)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lex = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| Error::format("POS lexicon", path, format!("line {}: expected word<TAB>tag", i + 1)))?;
            let tag = match tag.trim() {
                "V" => PosTag::Verb,
                "N" => PosTag::Noun,
                "O" => PosTag::Other,
                other => return Err(Error::format("POS lexicon", path, format!("line {}: unknown tag {other:?}", i + 1))),
            };
            lex.insert(word.trim(), tag);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        self.order.iter().map(|w| format!("{w}\t{}\n", self.tags[w].code())).collect()
    }
}
