use std::collections::HashSet;
use std::fs::{self, File};
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::concepts::VoPair;
use crate::datastore::unitfile::{unit_file_len, UNIT_MAGIC};
use crate::error::{Error, Result};
use crate::temporal::Interval;

pub const DEFAULT_UNIT_FRAMES: usize = 16;
pub const DEFAULT_FEATURE_DIM: usize = 4096;
pub const DEFAULT_CONCEPT_DIM: usize = 487;
pub const DEFAULT_SENTENCE_DIM: usize = 4800;

fn default_unit_frames() -> usize {
    DEFAULT_UNIT_FRAMES
}
fn default_feature_dim() -> usize {
    DEFAULT_FEATURE_DIM
}
fn default_concept_dim() -> usize {
    DEFAULT_CONCEPT_DIM
}

/// On-disk JSON manifest. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub fps: f64,
    #[serde(default = "default_unit_frames")]
    pub unit_frames: usize,
    #[serde(default = "default_feature_dim")]
    pub feature_dim: usize,
    #[serde(default = "default_concept_dim")]
    pub concept_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_lexicon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_lexicon: Option<String>,
    pub videos: Vec<VideoEntry>,
    pub queries: Vec<QueryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoEntry {
    pub id: String,
    pub frames: u64,
    pub features: String,
    pub concepts: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub id: String,
    pub video: String,
    pub start_sec: f64,
    pub end_sec: f64,
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_embedding_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vo: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoRecord {
    pub id: String,
    pub num_units: usize,
    pub frames: u64,
    pub fps: f64,
    pub feature_path: PathBuf,
    pub concept_path: PathBuf,
}

impl VideoRecord {
    pub fn duration_sec(&self) -> f64 {
        self.frames as f64 / self.fps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub id: String,
    pub video_index: usize,
    pub start_sec: f64,
    pub end_sec: f64,
    pub tokens: Vec<String>,
    pub sentence_embedding_path: Option<PathBuf>,
    pub vo: Option<VoPair>,
}

impl QueryRecord {
    /// Ground truth in frame coordinates.
    pub fn ground_truth(&self, fps: f64) -> Interval {
        Interval::from_seconds(self.start_sec, self.end_sec, fps)
    }
}

/// A validated manifest: every reference resolves and every file has the
/// declared size.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub file: ManifestFile,
    pub base_dir: PathBuf,
    pub videos: Vec<VideoRecord>,
    pub queries: Vec<QueryRecord>,
}

impl DatasetManifest {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn fps(&self) -> f64 {
        self.file.fps
    }

    pub fn unit_frames(&self) -> usize {
        self.file.unit_frames
    }

    pub fn feature_dim(&self) -> usize {
        self.file.feature_dim
    }

    pub fn concept_dim(&self) -> usize {
        self.file.concept_dim
    }

    pub fn sentence_dim(&self) -> usize {
        self.file.sentence_dim.unwrap_or(DEFAULT_SENTENCE_DIM)
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.base_dir.join(rel)
    }

    pub fn embeddings_path(&self) -> Option<PathBuf> {
        self.file.embeddings.as_deref().map(|p| self.resolve(p))
    }

    pub fn pos_lexicon_path(&self) -> Option<PathBuf> {
        self.file.pos_lexicon.as_deref().map(|p| self.resolve(p))
    }

    pub fn label_lexicon_path(&self) -> Option<PathBuf> {
        self.file.label_lexicon.as_deref().map(|p| self.resolve(p))
    }

    /// Queries grouped by the video they refer to.
    pub fn queries_by_video(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.videos.len()];
        for (qi, q) in self.queries.iter().enumerate() {
            out[q.video_index].push(qi);
        }
        out
    }

    /// Units needed to cover `frames` frames.
    pub fn units_for(&self, frames: u64) -> usize {
        frames.div_ceil(self.unit_frames() as u64) as usize
    }
}

pub fn parse_manifest(text: &str, path: &Path) -> Result<ManifestFile> {
    serde_json::from_str(text).map_err(|e| Error::format("manifest", path, e))
}

/// Reads and validates a manifest, checking that all referenced files exist
/// and carry the declared dimensions.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = parse_manifest(&text, path)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate(file, base_dir)
}

pub fn save_manifest(manifest: &ManifestFile, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| Error::format("manifest", path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn check_unit_file(record: &str, path: &Path, rows: usize, dim: usize) -> Result<()> {
    let meta = fs::metadata(path).map_err(|e| Error::validation(record, format!("{}: {e}", path.display())))?;
    let expected = unit_file_len(rows, dim);
    if meta.len() != expected {
        return Err(Error::validation(
            record,
            format!("{} is {} bytes, expected {expected} for {rows}x{dim}", path.display(), meta.len()),
        ));
    }
    let mut header = [0u8; 12];
    File::open(path)
        .and_then(|mut f| f.read_exact(&mut header))
        .map_err(|e| Error::validation(record, format!("{}: {e}", path.display())))?;
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4 bytes")) as usize;
    if &header[..4] != UNIT_MAGIC || word(4) != rows || word(8) != dim {
        return Err(Error::validation(record, format!("{} header does not declare {rows}x{dim} ACLF", path.display())));
    }
    Ok(())
}

pub fn validate(file: ManifestFile, base_dir: PathBuf) -> Result<DatasetManifest> {
    let name = file.name.clone();
    if !(file.fps.is_finite() && file.fps > 0.0) {
        return Err(Error::validation(&name, format!("fps must be positive, got {}", file.fps)));
    }
    if file.unit_frames == 0 || file.feature_dim == 0 || file.concept_dim == 0 {
        return Err(Error::validation(&name, "unit_frames, feature_dim and concept_dim must be positive"));
    }
    if file.sentence_dim == Some(0) {
        return Err(Error::validation(&name, "sentence_dim must be positive"));
    }
    for (label, p) in [("embeddings", &file.embeddings), ("pos_lexicon", &file.pos_lexicon), ("label_lexicon", &file.label_lexicon)] {
        if let Some(p) = p {
            if !base_dir.join(p).is_file() {
                return Err(Error::validation(&name, format!("{label} file {p} not found")));
            }
        }
    }

    let mut ids = HashSet::new();
    let mut videos = Vec::with_capacity(file.videos.len());
    for v in &file.videos {
        if !ids.insert(v.id.as_str()) {
            return Err(Error::validation(&v.id, "duplicate video id"));
        }
        if v.frames == 0 {
            return Err(Error::validation(&v.id, "video has zero frames"));
        }
        let num_units = v.frames.div_ceil(file.unit_frames as u64) as usize;
        let feature_path = base_dir.join(&v.features);
        let concept_path = base_dir.join(&v.concepts);
        check_unit_file(&v.id, &feature_path, num_units, file.feature_dim)?;
        check_unit_file(&v.id, &concept_path, num_units, file.concept_dim)?;
        videos.push(VideoRecord {
            id: v.id.clone(),
            num_units,
            frames: v.frames,
            fps: file.fps,
            feature_path,
            concept_path,
        });
    }

    let sentence_dim = file.sentence_dim.unwrap_or(DEFAULT_SENTENCE_DIM);
    let mut qids = HashSet::new();
    let mut queries = Vec::with_capacity(file.queries.len());
    for q in &file.queries {
        if !qids.insert(q.id.as_str()) {
            return Err(Error::validation(&q.id, "duplicate query id"));
        }
        let video_index = videos
            .iter()
            .position(|v| v.id == q.video)
            .ok_or_else(|| Error::validation(&q.id, format!("unknown video {}", q.video)))?;
        let duration = videos[video_index].duration_sec();
        if !(q.start_sec >= 0.0 && q.start_sec < q.end_sec && q.end_sec <= duration + 1e-9) {
            return Err(Error::validation(
                &q.id,
                format!("interval [{}, {}] invalid for a {duration} s video", q.start_sec, q.end_sec),
            ));
        }
        if q.tokens.is_empty() || q.tokens.iter().any(|t| t.is_empty()) {
            return Err(Error::validation(&q.id, "token list empty or contains empty tokens"));
        }
        let sentence_embedding_path = match &q.sentence_embedding_path {
            Some(p) => {
                let full = base_dir.join(p);
                check_unit_file(&q.id, &full, 1, sentence_dim)?;
                Some(full)
            }
            None => None,
        };
        let vo = match &q.vo {
            Some([verb, obj]) => Some(VoPair::new(verb, obj).ok_or_else(|| Error::validation(&q.id, "empty word in vo"))?),
            None => None,
        };
        queries.push(QueryRecord {
            id: q.id.clone(),
            video_index,
            start_sec: q.start_sec,
            end_sec: q.end_sec,
            tokens: q.tokens.clone(),
            sentence_embedding_path,
            vo,
        });
    }

    Ok(DatasetManifest {
        file,
        base_dir,
        videos,
        queries,
    })
}
