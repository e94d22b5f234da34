//! Dataset version profiles: which fonts, sizes, diacritic regime, and
//! ground-truth form each dataset generation uses.

use serde::{Deserialize, Serialize};

use crate::markup::{MAX_SIZE_PX, MIN_SIZE_PX};

/// How per-page font sizes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SizePolicy {
    /// Every page uses the one fixed size.
    UniformMin { px: u32 },
    /// One size per page, sampled uniformly from the range.
    UniformSampled { min_px: u32, max_px: u32 },
    /// Multiple blocks per page with role-banded sizes; at least two
    /// distinct sizes appear on every page.
    MultiSizePerPage { min_px: u32, max_px: u32 },
}

impl SizePolicy {
    pub fn bounds(&self) -> (u32, u32) {
        match *self {
            Self::UniformMin { px } => (px, px),
            Self::UniformSampled { min_px, max_px } | Self::MultiSizePerPage { min_px, max_px } => {
                (min_px, max_px)
            }
        }
    }
}

/// Diacritic regime applied when sampling page text.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiacriticPolicy {
    /// Tashkeel stripped from every sampled paragraph.
    Strip,
    /// Only paragraphs with diacritic density at or above the
    /// threshold are eligible.
    Require { min_density: f64 },
    /// No constraint.
    Any,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionProfile {
    pub name: String,
    pub fonts: Vec<String>,
    pub size_policy: SizePolicy,
    pub diacritics: DiacriticPolicy,
    pub markup_ground_truth: bool,
    pub default_count: u64,
}

impl VersionProfile {
    pub fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() {
            return Err("profile name must be non-empty".into());
        }
        if self.fonts.is_empty() {
            return Err(format!("profile {:?} lists no fonts", self.name));
        }
        let (lo, hi) = self.size_policy.bounds();
        if lo < MIN_SIZE_PX || hi > MAX_SIZE_PX || lo > hi {
            return Err(format!(
                "profile {:?} size bounds ({lo}, {hi}) outside [{MIN_SIZE_PX}, {MAX_SIZE_PX}]",
                self.name
            ));
        }
        if matches!(self.size_policy, SizePolicy::MultiSizePerPage { .. }) && hi < lo + 3 {
            return Err(format!(
                "profile {:?} multi-size range ({lo}, {hi}) too narrow for distinct role bands",
                self.name
            ));
        }
        if let DiacriticPolicy::Require { min_density } = self.diacritics {
            if !(0.0..=1.0).contains(&min_density) {
                return Err(format!(
                    "profile {:?} diacritic density threshold {min_density} outside [0,1]",
                    self.name
                ));
            }
        }
        if self.default_count == 0 {
            return Err(format!("profile {:?} default count must be positive", self.name));
        }
        Ok(())
    }
}

/// The five pre-named font ids; the rest of the 12 registry slots are
/// user-configured.
pub const NAMED_FONT_IDS: [&str; 5] = [
    "amiri",
    "arial",
    "calibri",
    "sakkal-majalla",
    "scheherazade",
];

fn font_slice(n: usize) -> Vec<String> {
    let mut fonts: Vec<String> = NAMED_FONT_IDS.iter().map(|s| s.to_string()).collect();
    for i in fonts.len() + 1..=n {
        fonts.push(format!("font-{i:02}"));
    }
    fonts.truncate(n);
    fonts
}

/// Built-in profile definitions, `None` for unknown names.
pub fn builtin_profile(name: &str) -> Option<VersionProfile> {
    let profile = match name {
        "v0.1" => VersionProfile {
            name: "v0.1".into(),
            fonts: font_slice(5),
            size_policy: SizePolicy::UniformMin { px: MIN_SIZE_PX },
            diacritics: DiacriticPolicy::Strip,
            markup_ground_truth: false,
            default_count: 5_000,
        },
        "v0.2" => VersionProfile {
            name: "v0.2".into(),
            fonts: font_slice(10),
            size_policy: SizePolicy::UniformSampled {
                min_px: MIN_SIZE_PX,
                max_px: MAX_SIZE_PX,
            },
            diacritics: DiacriticPolicy::Require { min_density: 0.2 },
            markup_ground_truth: false,
            default_count: 50_000,
        },
        "v0.3" => VersionProfile {
            name: "v0.3".into(),
            fonts: font_slice(12),
            size_policy: SizePolicy::MultiSizePerPage {
                min_px: MIN_SIZE_PX,
                max_px: MAX_SIZE_PX,
            },
            diacritics: DiacriticPolicy::Require { min_density: 0.2 },
            markup_ground_truth: true,
            default_count: 10_000,
        },
        _ => return None,
    };
    Some(profile)
}

pub fn builtin_profile_names() -> [&'static str; 3] {
    ["v0.1", "v0.2", "v0.3"]
}
