use std::path::Path;

use crate::concepts::{LabelLexicon, PosLexicon};
use crate::datastore::manifest::{load_manifest, DatasetManifest};
use crate::datastore::unitfile::{load_unit_matrix, read_unit_matrix};
use crate::datastore::EmbeddingTable;
use crate::error::Result;
use crate::numcore::Matrix;

/// Word-level resources referenced by a manifest.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub embeddings: Option<EmbeddingTable>,
    pub pos: Option<PosLexicon>,
    pub labels: Option<LabelLexicon>,
}

/// A manifest with all unit matrices, precomputed sentence embeddings and
/// word resources loaded into memory. Immutable after loading.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub features: Vec<Matrix<f32>>,
    pub concepts: Vec<Matrix<f32>>,
    pub sentence_embeddings: Vec<Option<Vec<f32>>>,
    pub resources: Resources,
}

impl Dataset {
    pub fn open(path: &Path) -> Result<Self> {
        Self::load(load_manifest(path)?)
    }

    pub fn load(manifest: DatasetManifest) -> Result<Self> {
        let mut features = Vec::with_capacity(manifest.videos.len());
        let mut concepts = Vec::with_capacity(manifest.videos.len());
        for v in &manifest.videos {
            features.push(load_unit_matrix(&v.feature_path, v.num_units, manifest.feature_dim())?);
            concepts.push(load_unit_matrix(&v.concept_path, v.num_units, manifest.concept_dim())?);
        }
        let sentence_embeddings = manifest
            .queries
            .iter()
            .map(|q| {
                q.sentence_embedding_path
                    .as_deref()
                    .map(|p| read_unit_matrix(p).map(Matrix::into_data))
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        let embeddings = manifest.embeddings_path().map(|p| EmbeddingTable::load(&p)).transpose()?;
        let pos = manifest.pos_lexicon_path().map(|p| PosLexicon::load(&p)).transpose()?;
        let labels = match (manifest.label_lexicon_path(), &embeddings) {
            (Some(p), Some(table)) => Some(LabelLexicon::load(&p, table)?),
            _ => None,
        };
        Ok(Self {
            manifest,
            features,
            concepts,
            sentence_embeddings,
            resources: Resources { embeddings, pos, labels },
        })
    }
}
