use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Network wiring. See [`Variant::branches`] for what each one feeds the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Full,
    #[serde(rename = "activity", alias = "activity-only")]
    ActivityOnly,
    WoSac,
    WoVac,
    Concat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VideoSource {
    ClipFeature,
    ClipConcept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuerySource {
    Sentence,
    VoEmbedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fusion {
    Mpu,
    Concat,
}

impl Fusion {
    pub fn width(self, d: usize) -> usize {
        match self {
            Fusion::Mpu => 4 * d,
            Fusion::Concat => 2 * d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Width {
    Text,
    Concept,
}

/// One video-side and one query-side projection combined by a fusion op.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchSpec {
    pub name: &'static str,
    pub video: VideoSource,
    pub query: QuerySource,
    pub width: Width,
    pub fusion: Fusion,
}

const TEXT: BranchSpec = BranchSpec {
    name: "text",
    video: VideoSource::ClipFeature,
    query: QuerySource::Sentence,
    width: Width::Text,
    fusion: Fusion::Mpu,
};

const CONCEPT: BranchSpec = BranchSpec {
    name: "concept",
    video: VideoSource::ClipConcept,
    query: QuerySource::VoEmbedding,
    width: Width::Concept,
    fusion: Fusion::Mpu,
};

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Full, Variant::ActivityOnly, Variant::WoSac, Variant::WoVac, Variant::Concat];

    pub fn branches(self) -> Vec<BranchSpec> {
        match self {
            Variant::Full => vec![TEXT, CONCEPT],
            Variant::ActivityOnly => vec![CONCEPT],
            // the concept MPU loses its semantic side: the sentence is projected to d_a instead
            Variant::WoSac => vec![
                TEXT,
                BranchSpec {
                    query: QuerySource::Sentence,
                    ..CONCEPT
                },
            ],
            // the concept MPU loses its visual side: the clip feature is projected to d_a instead
            Variant::WoVac => vec![
                TEXT,
                BranchSpec {
                    video: VideoSource::ClipFeature,
                    ..CONCEPT
                },
            ],
            Variant::Concat => vec![
                BranchSpec {
                    fusion: Fusion::Concat,
                    ..TEXT
                },
                BranchSpec {
                    fusion: Fusion::Concat,
                    ..CONCEPT
                },
            ],
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Variant::Full => 0,
            Variant::ActivityOnly => 1,
            Variant::WoSac => 2,
            Variant::WoVac => 3,
            Variant::Concat => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.code() == code)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::ActivityOnly => "activity",
            Variant::WoSac => "wo-sac",
            Variant::WoVac => "wo-vac",
            Variant::Concat => "concat",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "activity" | "activity-only" => Ok(Variant::ActivityOnly),
            "wo-sac" => Ok(Variant::WoSac),
            "wo-vac" => Ok(Variant::WoVac),
            "concat" => Ok(Variant::Concat),
            other => Err(Error::Config(format!("unknown variant '{other}' (full|activity|wo-sac|wo-vac|concat)"))),
        }
    }
}

pub const DEFAULT_TEXT_DIM: usize = 1024;
pub const DEFAULT_CONCEPT_PROJ_DIM: usize = 256;
pub const DEFAULT_HIDDEN: usize = 1000;

/// Input and layer widths of an ACL network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    /// `3·d_v`
    pub clip_dim: usize,
    /// `d_c`
    pub concept_dim: usize,
    pub sentence_dim: usize,
    pub vo_dim: usize,
    /// `d_t`
    pub text_dim: usize,
    /// `d_a`
    pub concept_proj_dim: usize,
    pub hidden: usize,
}

impl ModelDims {
    pub fn new(clip_dim: usize, concept_dim: usize, sentence_dim: usize, vo_dim: usize) -> Self {
        Self {
            clip_dim,
            concept_dim,
            sentence_dim,
            vo_dim,
            text_dim: DEFAULT_TEXT_DIM,
            concept_proj_dim: DEFAULT_CONCEPT_PROJ_DIM,
            hidden: DEFAULT_HIDDEN,
        }
    }

    pub fn with_widths(self, text_dim: usize, concept_proj_dim: usize, hidden: usize) -> Self {
        Self {
            text_dim,
            concept_proj_dim,
            hidden,
            ..self
        }
    }

    pub fn video_dim(&self, s: VideoSource) -> usize {
        match s {
            VideoSource::ClipFeature => self.clip_dim,
            VideoSource::ClipConcept => self.concept_dim,
        }
    }

    pub fn query_dim(&self, s: QuerySource) -> usize {
        match s {
            QuerySource::Sentence => self.sentence_dim,
            QuerySource::VoEmbedding => self.vo_dim,
        }
    }

    pub fn width(&self, w: Width) -> usize {
        match w {
            Width::Text => self.text_dim,
            Width::Concept => self.concept_proj_dim,
        }
    }

    pub fn head_input(&self, variant: Variant) -> usize {
        variant.branches().iter().map(|b| b.fusion.width(self.width(b.width))).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("clip_dim", self.clip_dim),
            ("concept_dim", self.concept_dim),
            ("sentence_dim", self.sentence_dim),
            ("vo_dim", self.vo_dim),
            ("text_dim", self.text_dim),
            ("concept_proj_dim", self.concept_proj_dim),
            ("hidden", self.hidden),
        ];
        match all.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(Error::Config(format!("{name} must be positive"))),
            None => Ok(()),
        }
    }

    pub(crate) fn to_array(self) -> [usize; 7] {
        [
            self.clip_dim,
            self.concept_dim,
            self.sentence_dim,
            self.vo_dim,
            self.text_dim,
            self.concept_proj_dim,
            self.hidden,
        ]
    }

    pub(crate) fn from_array(a: [usize; 7]) -> Self {
        Self {
            clip_dim: a[0],
            concept_dim: a[1],
            sentence_dim: a[2],
            vo_dim: a[3],
            text_dim: a[4],
            concept_proj_dim: a[5],
            hidden: a[6],
        }
    }
}

/// Alignment-network optimisation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub beta: f64,
    pub gamma: f64,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 28,
            beta: 0.01,
            gamma: 1.0,
            lr: 0.005,
            epochs: 10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::Config("batch_size must be at least 2 so each batch has negatives".into()));
        }
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        Ok(())
    }
}

/// Actionness-generator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionnessConfig {
    pub hidden: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for ActionnessConfig {
    fn default() -> Self {
        Self {
            hidden: DEFAULT_HIDDEN,
            batch_size: 64,
            lr: 0.005,
            epochs: 10,
            seed: 0,
        }
    }
}

impl ActionnessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 {
            return Err(Error::Config("actionness hidden and batch_size must be positive".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        Ok(())
    }
}
