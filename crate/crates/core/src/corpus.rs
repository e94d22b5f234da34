//! Source-text loading: blank-line-separated paragraphs, normalized
//! and length-filtered.

use std::path::{Path, PathBuf};

use crate::text::ScriptText;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSource {
    pub paragraphs: Vec<ScriptText>,
    pub provenance: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: invalid UTF-8 at byte {offset}", path.display())]
    InvalidUtf8 { path: PathBuf, offset: usize },
    #[error("{}: no paragraphs within [{min_len}, {max_len}] chars", path.display())]
    Empty {
        path: PathBuf,
        min_len: usize,
        max_len: usize,
    },
}

impl CorpusSource {
    pub fn new(paragraphs: Vec<ScriptText>, provenance: impl Into<String>) -> Self {
        Self {
            paragraphs,
            provenance: provenance.into(),
        }
    }
}

/// Splits raw text into paragraphs on blank lines. Lines within a
/// paragraph are soft wraps and join with single spaces.
fn split_paragraphs(text: &str) -> Vec<String> {
    let mut paragraphs = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                paragraphs.push(current.join(" "));
                current.clear();
            }
        } else {
            current.push(line.trim());
        }
    }
    if !current.is_empty() {
        paragraphs.push(current.join(" "));
    }
    paragraphs
}

/// Loads a corpus file: UTF-8 text, paragraphs separated by blank
/// lines, each normalized and kept iff its char count lies within
/// `[min_len, max_len]`. Order is preserved.
pub fn load_corpus(path: &Path, min_len: usize, max_len: usize) -> Result<CorpusSource, CorpusError> {
    let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = ScriptText::from_bytes(&bytes).map_err(|e| {
        let crate::text::TextError::InvalidUtf8 { offset } = e;
        CorpusError::InvalidUtf8 {
            path: path.to_path_buf(),
            offset,
        }
    })?;

    let paragraphs: Vec<ScriptText> = split_paragraphs(text.as_str())
        .iter()
        .map(|p| ScriptText::new(&crate::markup::collapse_ws(p)))
        .filter(|p| !p.is_empty() && (min_len..=max_len).contains(&p.len_chars()))
        .collect();

    if paragraphs.is_empty() {
        return Err(CorpusError::Empty {
            path: path.to_path_buf(),
            min_len,
            max_len,
        });
    }

    let provenance = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    Ok(CorpusSource {
        paragraphs,
        provenance,
    })
}
