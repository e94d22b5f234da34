//! Corpus engineering and evaluation toolkit for Arabic OCR training
//! data. One half builds datasets: paragraphs are sampled from a text
//! corpus under a version profile (fonts, size policy, diacritic
//! regime), laid out as a structured page, rendered to an image, and
//! pushed through a seeded degradation pipeline; every page lands in a
//! JSONL manifest that records enough to reproduce it byte for byte.
//! The other half scores model output against those manifests:
//! Arabic-aware normalization, character and word error rates from
//! exact edit distance, BLEU, and per-font breakdowns.
//!
//! All randomness flows from one explicit generator ([`rng::SplitMix64`])
//! and per-sample seeds derived from a master seed, so datasets and
//! evaluations are reproducible across machines and thread counts.

pub mod config;
pub mod corpus;
pub mod degrade;
pub mod fonts;
pub mod generate;
pub mod manifest;
pub mod markup;
pub mod metrics;
pub mod profile;
pub mod raster;
pub mod render;
pub mod report;
pub mod rng;
pub mod sample;
pub mod text;

pub use config::{ConfigError, FileConfig};
pub use corpus::{load_corpus, CorpusSource};
pub use degrade::{DegradeParams, DegradeRanges, Treatment, TreatmentMix};
pub use fonts::{FontEntry, FontRegistry};
pub use generate::{degrade_dataset, generate, GenerateError, GenerateJob};
pub use manifest::{load_manifest, write_manifest, SampleRecord};
pub use markup::{extract_plain_text, parse_markup, serialize_markup, DocumentSpec};
pub use metrics::{cer, evaluate, wer, EvalReport, MetricConfig};
pub use profile::{builtin_profile, SizePolicy, VersionProfile};
pub use raster::Raster;
pub use render::{render, ExternalToolchain, MockRenderer, RendererAdapter};
pub use rng::{derive_seed, SplitMix64};
pub use sample::sample_document;
pub use text::ScriptText;
