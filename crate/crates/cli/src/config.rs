use std::path::Path;

use acl_core::eval::{DEFAULT_FREQUENCIES, DEFAULT_MS, DEFAULT_NS};
use acl_core::localize::LocalizeConfig;
use acl_core::model::{ActionnessConfig, GradCheckConfig, TrainConfig};
use acl_core::synth::SynthConfig;
use acl_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Window scan used to build training samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub scales_frames: Vec<usize>,
    pub overlap: f64,
    /// Context on each side of a clip, in frames (8 units of 16 frames).
    pub context_frames: usize,
    pub pos_tiou: f64,
    pub neg_tiou: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            scales_frames: vec![64, 128, 256, 512],
            overlap: 0.75,
            context_frames: 128,
            pos_tiou: 0.5,
            neg_tiou: 0.3,
        }
    }
}

/// Projection and head widths of the alignment network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WidthConfig {
    pub text_dim: usize,
    pub concept_proj_dim: usize,
    pub hidden: usize,
}

impl Default for WidthConfig {
    fn default() -> Self {
        Self {
            text_dim: acl_core::model::config::DEFAULT_TEXT_DIM,
            concept_proj_dim: acl_core::model::config::DEFAULT_CONCEPT_PROJ_DIM,
            hidden: acl_core::model::config::DEFAULT_HIDDEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// `charades` or `tacos` column layout.
    pub layout: String,
    pub ns: Vec<usize>,
    pub ms: Vec<f64>,
    pub arf_iou: f64,
    pub frequencies: Vec<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            layout: "charades".into(),
            ns: DEFAULT_NS.to_vec(),
            ms: DEFAULT_MS.to_vec(),
            arf_iou: 0.5,
            frequencies: DEFAULT_FREQUENCIES.to_vec(),
        }
    }
}

/// Every tunable of every command. Sections not used by a command are
/// carried along so the echoed file describes the whole run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub synth: SynthConfig,
    pub samples: SampleConfig,
    pub model: WidthConfig,
    pub train: TrainConfig,
    pub actionness: ActionnessConfig,
    pub localize: LocalizeConfig,
    pub evaluate: EvalConfig,
    pub gradcheck: GradCheckConfig,
}

impl RunConfig {
    /// Built-in defaults overlaid with `path` when given.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Writes the effective configuration to `path`.
    pub fn echo(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }
}
