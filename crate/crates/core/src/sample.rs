//! Page sampling: corpus + profile + seeded rng -> DocumentSpec.
//!
//! The draw order is part of the determinism contract. Single-block
//! profiles draw (paragraph, font[, size]); multi-size pages draw
//! heading level, body-block count, annotation coin, then per block
//! (paragraph, font, size). Changing any of this invalidates recorded
//! seeds.

use crate::corpus::CorpusSource;
use crate::markup::{Block, BlockRole, DocumentSpec, HeadingLevel, Run};
use crate::profile::{DiacriticPolicy, SizePolicy, VersionProfile};
use crate::rng::SplitMix64;
use crate::text::ScriptText;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("corpus has no paragraphs")]
    EmptyCorpus,
    #[error("no paragraph reaches diacritic density {min_density}")]
    NoQualifyingParagraph { min_density: f64 },
    #[error("every paragraph is empty once tashkeel is stripped")]
    AllParagraphsEmptyAfterStrip,
}

/// Paragraph indices eligible under the profile's diacritic policy,
/// paired with the text transform the policy applies.
fn eligible_indices(
    source: &CorpusSource,
    policy: DiacriticPolicy,
) -> Result<Vec<usize>, SampleError> {
    if source.paragraphs.is_empty() {
        return Err(SampleError::EmptyCorpus);
    }
    let pool: Vec<usize> = match policy {
        DiacriticPolicy::Any => (0..source.paragraphs.len()).collect(),
        DiacriticPolicy::Strip => (0..source.paragraphs.len())
            .filter(|&i| !source.paragraphs[i].strip_tashkeel().is_empty())
            .collect(),
        DiacriticPolicy::Require { min_density } => (0..source.paragraphs.len())
            .filter(|&i| source.paragraphs[i].stats().density >= min_density)
            .collect(),
    };
    if pool.is_empty() {
        return Err(match policy {
            DiacriticPolicy::Strip => SampleError::AllParagraphsEmptyAfterStrip,
            DiacriticPolicy::Require { min_density } => {
                SampleError::NoQualifyingParagraph { min_density }
            }
            DiacriticPolicy::Any => SampleError::EmptyCorpus,
        });
    }
    Ok(pool)
}

fn paragraph_text(source: &CorpusSource, policy: DiacriticPolicy, index: usize) -> ScriptText {
    let text = &source.paragraphs[index];
    match policy {
        DiacriticPolicy::Strip => text.strip_tashkeel(),
        _ => text.clone(),
    }
}

/// Size bands for multi-size pages: annotations take the lower third
/// of the range, bodies the middle, headers the top. Bands are
/// disjoint, so a page always carries at least two distinct sizes.
fn role_band(min_px: u32, max_px: u32, role: BlockRole) -> (u32, u32) {
    let span = max_px - min_px;
    match role {
        BlockRole::Header(_) => (min_px + 2 * span / 3, max_px),
        BlockRole::Annotation => (min_px, min_px + span / 3 - 1),
        _ => (min_px + span / 3, min_px + 2 * span / 3 - 1),
    }
}

pub fn sample_document(
    source: &CorpusSource,
    profile: &VersionProfile,
    rng: &mut SplitMix64,
) -> Result<DocumentSpec, SampleError> {
    let pool = eligible_indices(source, profile.diacritics)?;
    let pick_paragraph = |rng: &mut SplitMix64| pool[rng.index(pool.len())];
    let pick_font = |rng: &mut SplitMix64| profile.fonts[rng.index(profile.fonts.len())].clone();

    match profile.size_policy {
        SizePolicy::UniformMin { px } => {
            let paragraph = pick_paragraph(rng);
            let font_id = pick_font(rng);
            Ok(single_body(
                paragraph_text(source, profile.diacritics, paragraph),
                font_id,
                px,
            ))
        }
        SizePolicy::UniformSampled { min_px, max_px } => {
            let paragraph = pick_paragraph(rng);
            let font_id = pick_font(rng);
            let size_px = rng.range_u32(min_px, max_px);
            Ok(single_body(
                paragraph_text(source, profile.diacritics, paragraph),
                font_id,
                size_px,
            ))
        }
        SizePolicy::MultiSizePerPage { min_px, max_px } => {
            let heading = if rng.index(2) == 0 {
                HeadingLevel::H1
            } else {
                HeadingLevel::H2
            };
            let n_body = 1 + rng.index(3);
            let with_annotation = rng.next_f64() < 0.5;

            let mut roles = Vec::with_capacity(n_body + 2);
            roles.push(BlockRole::Header(heading));
            roles.extend(std::iter::repeat_n(BlockRole::Body, n_body));
            if with_annotation {
                roles.push(BlockRole::Annotation);
            }

            let blocks = roles
                .into_iter()
                .map(|role| {
                    let paragraph = pick_paragraph(rng);
                    let font_id = pick_font(rng);
                    let (lo, hi) = role_band(min_px, max_px, role);
                    let size_px = rng.range_u32(lo, hi);
                    Block {
                        role,
                        runs: vec![Run {
                            text: paragraph_text(source, profile.diacritics, paragraph),
                            font_id,
                            size_px,
                        }],
                    }
                })
                .collect();
            Ok(DocumentSpec { blocks })
        }
    }
}

fn single_body(text: ScriptText, font_id: String, size_px: u32) -> DocumentSpec {
    DocumentSpec {
        blocks: vec![Block {
            role: BlockRole::Body,
            runs: vec![Run {
                text,
                font_id,
                size_px,
            }],
        }],
    }
}
