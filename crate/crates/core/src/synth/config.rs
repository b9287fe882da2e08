use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(verb lemma, third-person form, gerund, object)` per activity class.
pub const VOCABULARY: [(&str, &str, &str, &str); 16] = [
    ("open", "opens", "opening", "door"),
    ("wash", "washes", "washing", "dish"),
    ("pour", "pours", "pouring", "coffee"),
    ("cut", "cuts", "cutting", "bread"),
    ("throw", "throws", "throwing", "ball"),
    ("read", "reads", "reading", "book"),
    ("close", "closes", "closing", "window"),
    ("eat", "eats", "eating", "sandwich"),
    ("hold", "holds", "holding", "phone"),
    ("fold", "folds", "folding", "towel"),
    ("sweep", "sweeps", "sweeping", "floor"),
    ("drink", "drinks", "drinking", "tea"),
    ("carry", "carries", "carrying", "box"),
    ("watch", "watches", "watching", "television"),
    ("fix", "fixes", "fixing", "lamp"),
    ("push", "pushes", "pushing", "chair"),
];

/// Parameters of the synthetic benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub seed: u64,
    pub num_videos: usize,
    pub min_units: usize,
    pub max_units: usize,
    /// Activity classes `C`; also the concept dimension.
    pub num_classes: usize,
    /// Unit feature dimension `d_v`.
    pub feature_dim: usize,
    /// Feature noise σ_f: per-dimension standard deviation `σ_f/√d_v`.
    pub noise: f64,
    /// Concept noise standard deviation as a multiple of σ_f.
    pub concept_noise_scale: f64,
    /// Share of queries phrased with a verb-object pair.
    pub vo_coverage: f64,
    pub max_segments: usize,
    pub min_segment_units: usize,
    pub max_segment_units: usize,
    /// Minimum share of each video's units left as background.
    pub background_ratio: f64,
    pub test_fraction: f64,
    pub fps: f64,
    pub unit_frames: usize,
    pub word_dim: usize,
    /// Spread of class words around their cluster centre.
    pub word_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            num_videos: 200,
            min_units: 48,
            max_units: 96,
            num_classes: 8,
            feature_dim: 16,
            noise: 1.0,
            concept_noise_scale: 0.25,
            vo_coverage: 0.7,
            max_segments: 3,
            min_segment_units: 6,
            max_segment_units: 14,
            background_ratio: 0.5,
            test_fraction: 0.25,
            fps: 32.0,
            unit_frames: 16,
            word_dim: 300,
            word_noise: 0.3,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.num_classes < 2 {
            return fail(format!("num_classes must be at least 2, got {}", self.num_classes));
        }
        if self.num_classes > VOCABULARY.len() {
            return fail(format!("num_classes is limited to {} by the built-in vocabulary", VOCABULARY.len()));
        }
        if self.feature_dim < self.num_classes + 1 {
            return fail(format!(
                "feature_dim {} cannot hold {} orthogonal class and background means",
                self.feature_dim,
                self.num_classes + 1
            ));
        }
        if self.num_videos < 2 {
            return fail("num_videos must be at least 2 so both splits are non-empty".into());
        }
        if self.min_units == 0 || self.min_units > self.max_units {
            return fail(format!("need 0 < min_units <= max_units, got {}..{}", self.min_units, self.max_units));
        }
        if self.min_segment_units < 1 || self.min_segment_units > self.max_segment_units || self.max_segments == 0 {
            return fail("segment length range or count is empty".into());
        }
        for (name, v) in [
            ("vo_coverage", self.vo_coverage),
            ("background_ratio", self.background_ratio),
            ("test_fraction", self.test_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return fail("test_fraction must leave both splits non-empty".into());
        }
        for (name, v) in [("noise", self.noise), ("concept_noise_scale", self.concept_noise_scale), ("word_noise", self.word_noise)] {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if !(self.fps > 0.0) || self.unit_frames == 0 || self.word_dim == 0 {
            return fail("fps, unit_frames and word_dim must be positive".into());
        }
        let capacity = ((1.0 - self.background_ratio) * self.min_units as f64).floor() as usize;
        // a segment starts on an odd unit, so needs one unit of lead-in
        if self.min_segment_units > capacity || self.min_segment_units + 1 > self.min_units {
            return Err(Error::Config(format!(
                "infeasible packing: a {}-unit segment does not fit the foreground budget of a {}-unit video",
                self.min_segment_units, self.min_units
            )));
        }
        Ok(())
    }
}
