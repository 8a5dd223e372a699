use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unprop_core::{AugmentationRecord, Partition, Permutation, UnpropParams};

/// One processed input of a batch run. `partition` and `permutation`
/// are present exactly when the augmentation was applied; together with
/// the input image they reproduce the output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub input: String,
    pub output: String,
    pub applied: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub partition: Option<Partition>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub permutation: Option<Permutation>,
}

impl ManifestEntry {
    pub fn from_record(input: String, output: String, record: AugmentationRecord) -> Self {
        ManifestEntry {
            input,
            output,
            applied: record.applied,
            partition: record.partition,
            permutation: record.permutation,
        }
    }
}

/// Audit log of a run: tool version, the command that produced it, the
/// effective parameters, and one entry per input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub params: UnpropParams,
    pub entries: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, params: UnpropParams) -> Self {
        RunManifest {
            version: crate::TOOL_VERSION.into(),
            command: command.into(),
            params,
            entries: Vec::new(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        let mut json = serde_json::to_string_pretty(self).map_err(|source| ManifestError::Json {
            path: path.into(),
            source,
        })?;
        json.push('\n');
        fs::write(path, json).map_err(|source| ManifestError::Io {
            path: path.into(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let bytes = fs::read(path).map_err(|source| ManifestError::Io {
            path: path.into(),
            source,
        })?;
        serde_json::from_slice(&bytes).map_err(|source| ManifestError::Json {
            path: path.into(),
            source,
        })
    }
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
