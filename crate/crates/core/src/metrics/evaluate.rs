//! Corpus evaluation: pair ground truths with predictions, score every
//! sample in parallel, aggregate.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifest::SampleRecord;
use crate::metrics::bleu::{corpus_bleu_from_stats, sentence_bleu_from_stats, ngram_stats, NgramStats};
use crate::metrics::{cer_detail, normalize_for_eval, wer_detail, EditCounts, MetricConfig};

/// One prediction line: `{"id": ..., "text": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub text: String,
}

/// Which manifest field provides the reference text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefSource {
    /// Markup ground truth when the record carries it, plain otherwise.
    #[default]
    Auto,
    Plain,
    Markup,
}

impl std::str::FromStr for RefSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self::Auto),
            "plain" => Ok(Self::Plain),
            "markup" => Ok(Self::Markup),
            other => Err(format!("unknown reference source {other:?}")),
        }
    }
}

/// A scoring-ready pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPair {
    pub id: String,
    pub reference: String,
    pub hypothesis: String,
    pub fonts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub id: String,
    pub cer: f64,
    pub wer: f64,
    pub char_edits: EditCounts,
    pub word_edits: EditCounts,
    pub sentence_bleu: f64,
    pub ref_chars: u64,
    pub ref_words: u64,
    pub fonts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_samples: usize,
    pub macro_cer: f64,
    pub macro_wer: f64,
    pub micro_cer: f64,
    pub micro_wer: f64,
    pub corpus_bleu: f64,
    pub mean_sentence_bleu: f64,
    pub empty_references: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    pub config: MetricConfig,
    pub aggregate: Aggregate,
    pub by_font: BTreeMap<String, Aggregate>,
    pub samples: Vec<SampleScore>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("invalid metric configuration: {0}")]
    Config(String),
    #[error("nothing to evaluate")]
    Empty,
    #[error("duplicate id {id:?} in {side}")]
    DuplicateId { side: &'static str, id: String },
    #[error("missing predictions for {} id(s): {}", ids.len(), ids.join(", "))]
    MissingPredictions { ids: Vec<String> },
    #[error("record {id:?} has no markup ground truth")]
    MissingMarkup { id: String },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Reads a predictions JSONL file, reporting malformed lines by
/// number. Blank lines are tolerated.
pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>, EvalError> {
    let content = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut predictions = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(line).map_err(|e| EvalError::MalformedLine {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        predictions.push(p);
    }
    Ok(predictions)
}

/// Joins manifest records with predictions by id. Every manifest id
/// must have a prediction; ids must be unique on both sides.
/// Predictions without a manifest record are ignored.
pub fn pair_up(
    records: &[SampleRecord],
    predictions: &[Prediction],
    source: RefSource,
) -> Result<Vec<EvalPair>, EvalError> {
    let mut seen = HashSet::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(EvalError::DuplicateId {
                side: "manifest",
                id: r.id.clone(),
            });
        }
    }
    let mut by_id: HashMap<&str, &str> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if by_id.insert(p.id.as_str(), p.text.as_str()).is_some() {
            return Err(EvalError::DuplicateId {
                side: "predictions",
                id: p.id.clone(),
            });
        }
    }

    let mut missing: Vec<String> = records
        .iter()
        .filter(|r| !by_id.contains_key(r.id.as_str()))
        .map(|r| r.id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort_unstable();
        return Err(EvalError::MissingPredictions { ids: missing });
    }

    records
        .iter()
        .map(|r| {
            let reference = match source {
                RefSource::Plain => r.ground_truth_plain.as_str().to_string(),
                RefSource::Markup => r
                    .ground_truth_markup
                    .clone()
                    .ok_or_else(|| EvalError::MissingMarkup { id: r.id.clone() })?,
                RefSource::Auto => r
                    .ground_truth_markup
                    .clone()
                    .unwrap_or_else(|| r.ground_truth_plain.as_str().to_string()),
            };
            Ok(EvalPair {
                id: r.id.clone(),
                reference,
                hypothesis: by_id[r.id.as_str()].to_string(),
                fonts: r.fonts_used.clone(),
            })
        })
        .collect()
}

fn aggregate_subset(scored: &[(SampleScore, NgramStats)], indices: &[usize]) -> Aggregate {
    let n = indices.len();
    let mut cer_sum = 0.0;
    let mut wer_sum = 0.0;
    let mut sbleu_sum = 0.0;
    let mut char_dist = 0u64;
    let mut word_dist = 0u64;
    let mut ref_chars = 0u64;
    let mut ref_words = 0u64;
    let mut pooled = NgramStats::default();
    let mut empty_references = 0usize;
    for &i in indices {
        let (score, stats) = &scored[i];
        cer_sum += score.cer;
        wer_sum += score.wer;
        sbleu_sum += score.sentence_bleu;
        char_dist += score.char_edits.distance();
        word_dist += score.word_edits.distance();
        ref_chars += score.ref_chars;
        ref_words += score.ref_words;
        if score.ref_chars == 0 {
            empty_references += 1;
        }
        pooled.add(stats);
    }
    Aggregate {
        n_samples: n,
        macro_cer: cer_sum / n as f64,
        macro_wer: wer_sum / n as f64,
        micro_cer: char_dist as f64 / ref_chars.max(1) as f64,
        micro_wer: word_dist as f64 / ref_words.max(1) as f64,
        corpus_bleu: corpus_bleu_from_stats(&pooled),
        mean_sentence_bleu: sbleu_sum / n as f64,
        empty_references,
    }
}

/// Scores every pair and aggregates. Samples are reported in id order,
/// and aggregation folds integer counts, so the result is independent
/// of input order and parallel scheduling.
pub fn evaluate(
    pairs: &[EvalPair],
    cfg: &MetricConfig,
    label: &str,
) -> Result<EvalReport, EvalError> {
    cfg.validate().map_err(EvalError::Config)?;
    if pairs.is_empty() {
        return Err(EvalError::Empty);
    }

    let mut scored: Vec<(SampleScore, NgramStats)> = pairs
        .par_iter()
        .map(|pair| score_pair(pair, cfg))
        .collect();
    scored.sort_by(|a, b| a.0.id.cmp(&b.0.id));

    let all: Vec<usize> = (0..scored.len()).collect();
    let aggregate = aggregate_subset(&scored, &all);

    let mut font_groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, (score, _)) in scored.iter().enumerate() {
        for font in &score.fonts {
            font_groups.entry(font.clone()).or_default().push(i);
        }
    }
    let by_font = font_groups
        .into_iter()
        .map(|(font, indices)| (font, aggregate_subset(&scored, &indices)))
        .collect();

    Ok(EvalReport {
        label: label.to_string(),
        config: cfg.clone(),
        aggregate,
        by_font,
        samples: scored.into_iter().map(|(s, _)| s).collect(),
    })
}

fn score_pair(pair: &EvalPair, cfg: &MetricConfig) -> (SampleScore, NgramStats) {
    let reference = normalize_for_eval(&pair.reference, cfg);
    let hypothesis = normalize_for_eval(&pair.hypothesis, cfg);
    let (cer, char_edits, ref_chars) = cer_detail(&reference, &hypothesis, cfg);
    let (wer, word_edits, ref_words) = wer_detail(&reference, &hypothesis);
    let r_tokens: Vec<&str> = reference.as_str().split_whitespace().collect();
    let h_tokens: Vec<&str> = hypothesis.as_str().split_whitespace().collect();
    let stats = ngram_stats(&r_tokens, &h_tokens);
    let sentence_bleu = sentence_bleu_from_stats(&stats, cfg.bleu_epsilon);
    (
        SampleScore {
            id: pair.id.clone(),
            cer,
            wer,
            char_edits,
            word_edits,
            sentence_bleu,
            ref_chars,
            ref_words,
            fonts: pair.fonts.clone(),
        },
        stats,
    )
}
