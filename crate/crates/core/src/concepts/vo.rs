use crate::concepts::lemma::lemmatize;
use crate::concepts::{PosLexicon, PosTag};
use crate::datastore::{EmbeddingTable, QueryRecord};
use crate::numcore::Scalar;

/// Lemmatized verb-object pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VoPair {
    pub verb: String,
    pub object: String,
}

impl VoPair {
    /// Lowercases both words; `None` if either is empty.
    pub fn new(verb: &str, object: &str) -> Option<Self> {
        let (verb, object) = (verb.trim().to_lowercase(), object.trim().to_lowercase());
        (!verb.is_empty() && !object.is_empty()).then_some(Self { verb, object })
    }
}

fn normalize(token: &str) -> String {
    token.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

/// Heuristic direct-object extraction: the first verb followed (after any
/// non-noun, non-verb words such as determiners) by a noun. A second verb
/// before the noun takes over as the candidate verb, so "begins opening the
/// door" yields (open, door). Both words are lemmatized.
pub fn extract_vo(tokens: &[String], pos: &PosLexicon) -> Option<VoPair> {
    let words: Vec<String> = tokens.iter().map(|t| normalize(t)).filter(|t| !t.is_empty()).collect();
    let mut verb: Option<&str> = None;
    for w in &words {
        match (pos.tag(w), verb) {
            (PosTag::Verb, _) => verb = Some(w),
            (PosTag::Noun, Some(v)) => return VoPair::new(&lemmatize(v), &lemmatize(w)),
            _ => {}
        }
    }
    None
}

/// The query's VO pair: a pre-parsed pair wins over the heuristic.
pub fn resolve_vo(query: &QueryRecord, pos: Option<&PosLexicon>) -> Option<VoPair> {
    query.vo.clone().or_else(|| pos.and_then(|p| extract_vo(&query.tokens, p)))
}

/// `emb(verb) ∥ emb(object)`, or all zeros when the pair is missing or
/// either word has no embedding.
pub fn vo_embedding<T: Scalar>(vo: Option<&VoPair>, table: &EmbeddingTable) -> Vec<T> {
    let dim = table.dim();
    let mut out = vec![T::zero(); 2 * dim];
    if let Some(vo) = vo {
        if let (Some(v), Some(o)) = (table.lookup(&vo.verb), table.lookup(&vo.object)) {
            for (dst, &x) in out.iter_mut().zip(v.iter().chain(o)) {
                *dst = T::widen(x);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn lexicon() -> PosLexicon {
        let mut lex = PosLexicon::new();
        for w in ["person", "refrigerator", "shelf", "hands", "door"] {
            lex.insert(w, PosTag::Noun);
        }
        for w in ["opens", "is", "smiling", "washed", "begins", "opening"] {
            lex.insert(w, PosTag::Verb);
        }
        for w in ["the", "a", "her", "near"] {
            lex.insert(w, PosTag::Other);
        }
        lex
    }

    #[test]
    fn refrigerator_example() {
        let vo = extract_vo(&toks("person opens the refrigerator near the shelf."), &lexicon());
        assert_eq!(vo, VoPair::new("open", "refrigerator"));
    }

    #[test]
    fn no_object_after_verb() {
        assert_eq!(extract_vo(&toks("a person is smiling"), &lexicon()), None);
    }

    #[test]
    fn lemmatizes_both_words() {
        assert_eq!(extract_vo(&toks("she washed her hands"), &lexicon()), VoPair::new("wash", "hand"));
    }

    #[test]
    fn later_verb_takes_over() {
        assert_eq!(extract_vo(&toks("person begins opening the door"), &lexicon()), VoPair::new("open", "door"));
    }

    fn table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2);
        t.insert("open", &[1.0, 2.0]).unwrap();
        t.insert("door", &[3.0, 4.0]).unwrap();
        t
    }

    #[test]
    fn embedding_concatenates() {
        let e: Vec<f64> = vo_embedding(VoPair::new("open", "door").as_ref(), &table());
        assert_eq!(e, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn missing_pair_or_word_is_zero() {
        let none: Vec<f64> = vo_embedding(None, &table());
        assert_eq!(none, vec![0.0; 4]);
        let partial: Vec<f64> = vo_embedding(VoPair::new("open", "window").as_ref(), &table());
        assert_eq!(partial, vec![0.0; 4]);
    }

    #[test]
    fn full_size_zero_vector() {
        let t = EmbeddingTable::new(crate::datastore::WORD_DIM);
        let e: Vec<f32> = vo_embedding(None, &t);
        assert_eq!(e.len(), 600);
        assert!(e.iter().all(|v| *v == 0.0));
    }
}
