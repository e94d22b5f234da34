//! Font registry: maps font ids to family names and font files.
//!
//! Twelve slots ship pre-wired; the five named families are fixed and
//! the remaining slots are generic placeholders the user points at
//! real files. The mock renderer never touches the files, so only the
//! external toolchain enforces their existence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Environment variable naming the default font directory.
pub const FONT_DIR_ENV: &str = "QARI_FORGE_FONT_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FontEntry {
    pub family_name: String,
    pub file_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FontRegistry {
    entries: BTreeMap<String, FontEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum FontError {
    #[error("font id {0:?} is not in the registry")]
    UnknownFont(String),
    #[error("font file for {id:?} missing: {}", path.display())]
    MissingFile { id: String, path: PathBuf },
}

impl FontRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, family_name: impl Into<String>, file_path: impl Into<PathBuf>) {
        self.entries.insert(
            id.into(),
            FontEntry {
                family_name: family_name.into(),
                file_path: file_path.into(),
            },
        );
    }

    pub fn get(&self, id: &str) -> Option<&FontEntry> {
        self.entries.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks that every id in `required` resolves to an entry.
    pub fn require_ids<'a>(&self, required: impl IntoIterator<Item = &'a str>) -> Result<(), FontError> {
        for id in required {
            if !self.entries.contains_key(id) {
                return Err(FontError::UnknownFont(id.to_string()));
            }
        }
        Ok(())
    }

    /// Checks that every registered font file exists on disk.
    pub fn require_files(&self) -> Result<(), FontError> {
        for (id, entry) in &self.entries {
            if !entry.file_path.is_file() {
                return Err(FontError::MissingFile {
                    id: id.clone(),
                    path: entry.file_path.clone(),
                });
            }
        }
        Ok(())
    }

    /// The 12-slot template: five named families plus seven generic
    /// slots, each expecting `<font_dir>/<id>.ttf`.
    pub fn template(font_dir: &Path) -> Self {
        let named = [
            ("amiri", "Amiri"),
            ("arial", "Arial"),
            ("calibri", "Calibri"),
            ("sakkal-majalla", "Sakkal Majalla"),
            ("scheherazade", "Scheherazade"),
        ];
        let mut registry = Self::new();
        for (id, family) in named {
            registry.insert(id, family, font_dir.join(format!("{id}.ttf")));
        }
        for i in 6..=12 {
            let id = format!("font-{i:02}");
            registry.insert(id.clone(), format!("User Font {i:02}"), font_dir.join(format!("{id}.ttf")));
        }
        registry
    }
}

/// The font directory: the environment override when set, otherwise
/// `fonts/` under the current directory.
pub fn default_font_dir() -> PathBuf {
    std::env::var_os(FONT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fonts"))
}
