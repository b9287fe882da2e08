use std::collections::HashMap;
use std::sync::OnceLock;

/// What a suffix rule does on a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rewrite {
    /// Replace the suffix, keeping at least `min_stem` leading characters.
    Replace { with: &'static str, min_stem: usize, undouble: bool },
    /// Leave the word alone and stop.
    Keep,
}

/// Suffix-rule lemmatizer with an exception dictionary for irregular forms.
/// The first rule whose suffix matches is applied once.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    rules: Vec<(&'static str, Rewrite)>,
    exceptions: HashMap<&'static str, &'static str>,
}

const IRREGULAR: &[(&str, &str)] = &[
    ("ran", "run"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("being", "be"),
    ("am", "be"),
    ("has", "have"),
    ("had", "have"),
    ("having", "have"),
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("doing", "do"),
    ("goes", "go"),
    ("went", "go"),
    ("gone", "go"),
    ("took", "take"),
    ("taken", "take"),
    ("takes", "take"),
    ("taking", "take"),
    ("made", "make"),
    ("makes", "make"),
    ("making", "make"),
    ("sat", "sit"),
    ("ate", "eat"),
    ("eaten", "eat"),
    ("got", "get"),
    ("held", "hold"),
    ("threw", "throw"),
    ("thrown", "throw"),
    ("closes", "close"),
    ("closed", "close"),
    ("closing", "close"),
    ("uses", "use"),
    ("used", "use"),
    ("using", "use"),
    ("pours", "pour"),
    ("knives", "knife"),
    ("clothes", "clothes"),
    ("glasses", "glass"),
    ("dishes", "dish"),
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
];

impl Default for Lemmatizer {
    fn default() -> Self {
        use Rewrite::*;
        let replace = |with, min_stem| Replace { with, min_stem, undouble: false };
        let rules = vec![
            ("ies", replace("y", 2)),
            ("sses", replace("ss", 1)),
            ("shes", replace("sh", 1)),
            ("ches", replace("ch", 1)),
            ("xes", replace("x", 1)),
            ("zes", replace("z", 1)),
            ("ss", Keep),
            ("us", Keep),
            ("is", Keep),
            ("s", replace("", 3)),
            ("ing", Replace { with: "", min_stem: 3, undouble: true }),
            ("ed", Replace { with: "", min_stem: 3, undouble: true }),
        ];
        Self {
            rules,
            exceptions: IRREGULAR.iter().copied().collect(),
        }
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

impl Lemmatizer {
    pub fn shared() -> &'static Lemmatizer {
        static SHARED: OnceLock<Lemmatizer> = OnceLock::new();
        SHARED.get_or_init(Lemmatizer::default)
    }

    pub fn lemmatize(&self, word: &str) -> String {
        let word = word.to_lowercase();
        if let Some(lemma) = self.exceptions.get(word.as_str()) {
            return (*lemma).to_owned();
        }
        for &(suffix, rewrite) in &self.rules {
            let Some(stem) = word.strip_suffix(suffix) else {
                continue;
            };
            return match rewrite {
                Rewrite::Keep => word,
                Rewrite::Replace { with, min_stem, undouble } => {
                    if stem.chars().count() < min_stem {
                        return word;
                    }
                    let mut out = stem.to_owned();
                    if undouble {
                        let cs: Vec<char> = out.chars().collect();
                        if let [.., a, b] = cs[..] {
                            if a == b && !is_vowel(a) && !matches!(a, 'l' | 's' | 'z' | 'f') {
                                out.pop();
                            }
                        }
                    }
                    out.push_str(with);
                    out
                }
            };
        }
        word
    }
}

pub fn lemmatize(word: &str) -> String {
    Lemmatizer::shared().lemmatize(word)
}
