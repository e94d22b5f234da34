//! TOML configuration file shared by the command-line tools. Every
//! section is optional; the defaults reproduce the built-in behaviour.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degrade::{DegradeRanges, TreatmentMix};
use crate::fonts::{FontRegistry, FONT_DIR_ENV};
use crate::markup::is_valid_font_id;
use crate::metrics::MetricConfig;
use crate::profile::{builtin_profile, builtin_profile_names, DiacriticPolicy, SizePolicy, VersionProfile};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("unknown profile {name:?}; available: {}", available.join(", "))]
    UnknownProfile { name: String, available: Vec<String> },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Root of the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub fonts: FontsConfig,
    pub profiles: BTreeMap<String, ProfileConfig>,
    pub degrade: DegradeRanges,
    pub generate: GenerateDefaults,
    pub metrics: MetricConfig,
}

/// `[fonts]`: where font files live and any explicit id-to-file pins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FontsConfig {
    pub dir: Option<PathBuf>,
    pub entries: BTreeMap<String, FontFileConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FontFileConfig {
    pub family_name: String,
    pub file: PathBuf,
}

/// `[profiles.<name>]`: a custom profile; the map key is the name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub fonts: Vec<String>,
    pub size_policy: SizePolicy,
    pub diacritics: DiacriticPolicy,
    #[serde(default)]
    pub markup_ground_truth: bool,
    pub default_count: u64,
}

impl ProfileConfig {
    pub fn into_profile(self, name: &str) -> VersionProfile {
        VersionProfile {
            name: name.to_string(),
            fonts: self.fonts,
            size_policy: self.size_policy,
            diacritics: self.diacritics,
            markup_ground_truth: self.markup_ground_truth,
            default_count: self.default_count,
        }
    }
}

/// `[generate]`: defaults the generate tool falls back to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateDefaults {
    pub out_dir: PathBuf,
    pub corpus: Option<PathBuf>,
    pub min_paragraph_chars: usize,
    pub max_paragraph_chars: usize,
    pub treatment_mix: TreatmentMix,
}

impl Default for GenerateDefaults {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("dataset"),
            corpus: None,
            min_paragraph_chars: 12,
            max_paragraph_chars: 600,
            treatment_mix: TreatmentMix::default(),
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: Self = toml::from_str(&raw).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Loads `path` when given, otherwise returns the defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, profile) in &self.profiles {
            profile
                .clone()
                .into_profile(name)
                .validate()
                .map_err(|e| ConfigError::Invalid(format!("profile {name:?}: {e}")))?;
        }
        for id in self.fonts.entries.keys() {
            if !is_valid_font_id(id) {
                return Err(ConfigError::Invalid(format!("font id {id:?} is not valid")));
            }
        }
        self.degrade.validate().map_err(ConfigError::Invalid)?;
        self.generate
            .treatment_mix
            .validate()
            .map_err(ConfigError::Invalid)?;
        if self.generate.min_paragraph_chars > self.generate.max_paragraph_chars {
            return Err(ConfigError::Invalid(
                "min_paragraph_chars exceeds max_paragraph_chars".into(),
            ));
        }
        self.metrics.validate().map_err(ConfigError::Invalid)?;
        Ok(())
    }

    /// Custom profiles shadow the built-ins of the same name.
    pub fn resolve_profile(&self, name: &str) -> Result<VersionProfile, ConfigError> {
        if let Some(custom) = self.profiles.get(name) {
            return Ok(custom.clone().into_profile(name));
        }
        builtin_profile(name).ok_or_else(|| ConfigError::UnknownProfile {
            name: name.to_string(),
            available: builtin_profile_names()
                .iter()
                .map(|s| s.to_string())
                .chain(self.profiles.keys().cloned())
                .collect(),
        })
    }

    /// Font directory precedence: explicit override, then the
    /// environment, then the config file, then `fonts`.
    pub fn font_dir(&self, cli_override: Option<&Path>) -> PathBuf {
        if let Some(dir) = cli_override {
            return dir.to_path_buf();
        }
        if let Some(dir) = std::env::var_os(FONT_DIR_ENV) {
            return PathBuf::from(dir);
        }
        self.fonts
            .dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("fonts"))
    }

    /// Registry = template over the font directory, with `[fonts.entries]`
    /// pins layered on top (overriding template slots of the same id).
    pub fn build_registry(&self, cli_override: Option<&Path>) -> FontRegistry {
        let mut registry = FontRegistry::template(&self.font_dir(cli_override));
        for (id, entry) in &self.fonts.entries {
            registry.insert(id, &entry.family_name, &entry.file);
        }
        registry
    }
}
