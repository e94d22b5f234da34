//! Dataset manifest: one JSONL record per sample, fixed key order,
//! atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degrade::{DegradeParams, Treatment};
use crate::markup::{extract_plain_text, parse_markup};
use crate::text::ScriptText;

/// One manifest line. Serde emits keys in declaration order, which is
/// the manifest's documented key order; `ground_truth_markup` is
/// `null` rather than omitted so every line has the same key set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub image_file: String,
    pub ground_truth_plain: ScriptText,
    pub ground_truth_markup: Option<String>,
    pub profile: String,
    pub fonts_used: Vec<String>,
    pub sizes_used: Vec<u32>,
    pub treatment: Treatment,
    pub degrade_params: DegradeParams,
    pub seed: u64,
}

impl SampleRecord {
    /// Checks the markup/plain consistency invariant.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(markup) = &self.ground_truth_markup {
            let doc = parse_markup(markup)
                .map_err(|e| format!("record {:?}: markup does not parse: {e}", self.id))?;
            let plain = extract_plain_text(&doc);
            if plain != self.ground_truth_plain {
                return Err(format!(
                    "record {:?}: markup plain-text projection differs from ground_truth_plain",
                    self.id
                ));
            }
        }
        self.degrade_params
            .validate()
            .map_err(|e| format!("record {:?}: {e}", self.id))?;
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Writes records as JSONL through a temp file in the target
/// directory, renaming into place only after every line is out, so a
/// failed run never leaves a truncated manifest.
pub fn write_manifest(path: &Path, records: &[SampleRecord]) -> Result<(), ManifestError> {
    let io_err = |source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new(),
    }
    .map_err(io_err)?;
    for record in records {
        let line = serde_json::to_string(record).expect("manifest records always serialize");
        tmp.write_all(line.as_bytes()).map_err(io_err)?;
        tmp.write_all(b"\n").map_err(io_err)?;
    }
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Reads a JSONL manifest, reporting the line number of the first
/// malformed record. Blank lines are tolerated.
pub fn load_manifest(path: &Path) -> Result<Vec<SampleRecord>, ManifestError> {
    let content = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SampleRecord =
            serde_json::from_str(line).map_err(|e| ManifestError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}
