//! Dataset generation: sample, render, degrade, and record `count`
//! pages in parallel, each driven entirely by its derived seed.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::corpus::CorpusSource;
use crate::degrade::{apply_treatment_with, DegradeRanges, Treatment, TreatmentMix};
use crate::fonts::{FontError, FontRegistry};
use crate::manifest::{load_manifest, write_manifest, ManifestError, SampleRecord};
use crate::markup::{extract_plain_text, serialize_markup};
use crate::profile::VersionProfile;
use crate::raster::{Raster, RasterError};
use crate::render::{render, RenderError, RendererAdapter};
use crate::rng::{derive_seed, SplitMix64};
use crate::sample::{sample_document, SampleError};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const IMAGE_DIR: &str = "images";

/// The knobs of one generation run.
#[derive(Debug, Clone)]
pub struct GenerateJob {
    pub count: u64,
    pub master_seed: u64,
    pub treatment_mix: TreatmentMix,
    pub degrade_ranges: DegradeRanges,
    pub out_dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("invalid treatment mix: {0}")]
    TreatmentMix(String),
    #[error("invalid degrade ranges: {0}")]
    DegradeRanges(String),
    #[error(transparent)]
    Font(#[from] FontError),
    #[error("sample {index}: {source}")]
    Sample {
        index: u64,
        #[source]
        source: SampleError,
    },
    #[error("sample {index}: {source}")]
    Render {
        index: u64,
        #[source]
        source: RenderError,
    },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("cannot prepare {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("record {id:?} failed invariants: {message}")]
    InvalidRecord { id: String, message: String },
}

fn sample_id(index: u64) -> String {
    format!("{index:06}")
}

/// Everything one sample draws on besides its index and seed.
#[derive(Clone, Copy)]
pub struct SampleContext<'a> {
    pub profile: &'a VersionProfile,
    pub source: &'a CorpusSource,
    pub registry: &'a FontRegistry,
    pub treatment_mix: TreatmentMix,
    pub ranges: &'a DegradeRanges,
}

/// Produces one sample from its seed alone. The per-sample draw order
/// is: document sampling, treatment pick, treatment parameters and
/// noise. The rendered raster never consumes sample randomness.
pub fn generate_sample(
    index: u64,
    seed: u64,
    ctx: &SampleContext<'_>,
    renderer: &dyn RendererAdapter,
) -> Result<(SampleRecord, Raster), GenerateError> {
    let mut rng = SplitMix64::new(seed);
    let doc = sample_document(ctx.source, ctx.profile, &mut rng)
        .map_err(|source| GenerateError::Sample { index, source })?;
    let page = render(&doc, ctx.registry, renderer)
        .map_err(|source| GenerateError::Render { index, source })?;
    let treatment = ctx.treatment_mix.pick(&mut rng);
    let (degraded, params) = apply_treatment_with(&page, treatment, &mut rng, ctx.ranges);

    let id = sample_id(index);
    let record = SampleRecord {
        image_file: format!("{IMAGE_DIR}/{id}.png"),
        id,
        ground_truth_plain: extract_plain_text(&doc),
        ground_truth_markup: ctx
            .profile
            .markup_ground_truth
            .then(|| serialize_markup(&doc)),
        profile: ctx.profile.name.clone(),
        fonts_used: doc.fonts_used(),
        sizes_used: doc.sizes_used(),
        treatment,
        degrade_params: params,
        seed,
    };
    record
        .validate()
        .map_err(|message| GenerateError::InvalidRecord {
            id: record.id.clone(),
            message,
        })?;
    Ok((record, degraded))
}

/// Generates the full dataset: `images/<id>.png` files plus
/// `manifest.jsonl`, records in index order. Sample `i` depends only
/// on `derive_seed(master_seed, i)`, so parallel scheduling cannot
/// change the output, and the manifest is written atomically only
/// after every sample succeeded.
pub fn generate(
    job: &GenerateJob,
    profile: &VersionProfile,
    source: &CorpusSource,
    registry: &FontRegistry,
    renderer: &(dyn RendererAdapter + Sync),
) -> Result<Vec<SampleRecord>, GenerateError> {
    if job.count == 0 {
        return Err(GenerateError::ZeroCount);
    }
    profile.validate().map_err(GenerateError::Profile)?;
    job.treatment_mix
        .validate()
        .map_err(GenerateError::TreatmentMix)?;
    job.degrade_ranges
        .validate()
        .map_err(GenerateError::DegradeRanges)?;
    registry.require_ids(profile.fonts.iter().map(String::as_str))?;

    let image_dir = job.out_dir.join(IMAGE_DIR);
    std::fs::create_dir_all(&image_dir).map_err(|source| GenerateError::Io {
        path: image_dir.clone(),
        source,
    })?;

    let ctx = SampleContext {
        profile,
        source,
        registry,
        treatment_mix: job.treatment_mix,
        ranges: &job.degrade_ranges,
    };
    let records: Vec<SampleRecord> = (0..job.count)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(job.master_seed, index);
            let (record, raster) = generate_sample(index, seed, &ctx, renderer)?;
            raster.save_png(&job.out_dir.join(&record.image_file))?;
            Ok(record)
        })
        .collect::<Result<_, GenerateError>>()?;

    write_manifest(&job.out_dir.join(MANIFEST_FILE), &records)?;
    Ok(records)
}

/// Re-degrades an existing dataset: loads its manifest and images,
/// applies freshly sampled treatments under a new master seed, and
/// writes a sibling dataset. Ground truths carry over; treatment,
/// parameters, and seed are replaced with the re-pass values.
pub fn degrade_dataset(
    in_dir: &Path,
    job: &GenerateJob,
) -> Result<Vec<SampleRecord>, GenerateError> {
    job.treatment_mix
        .validate()
        .map_err(GenerateError::TreatmentMix)?;
    job.degrade_ranges
        .validate()
        .map_err(GenerateError::DegradeRanges)?;
    let records = load_manifest(&in_dir.join(MANIFEST_FILE))?;

    let image_dir = job.out_dir.join(IMAGE_DIR);
    std::fs::create_dir_all(&image_dir).map_err(|source| GenerateError::Io {
        path: image_dir.clone(),
        source,
    })?;

    let updated: Vec<SampleRecord> = records
        .into_par_iter()
        .enumerate()
        .map(|(index, mut record)| {
            let seed = derive_seed(job.master_seed, index as u64);
            let mut rng = SplitMix64::new(seed);
            let page = Raster::load_png(&in_dir.join(&record.image_file))?;
            let treatment = job.treatment_mix.pick(&mut rng);
            let (degraded, params) =
                apply_treatment_with(&page, treatment, &mut rng, &job.degrade_ranges);
            degraded.save_png(&job.out_dir.join(&record.image_file))?;
            record.treatment = treatment;
            record.degrade_params = params;
            record.seed = seed;
            Ok(record)
        })
        .collect::<Result<_, GenerateError>>()?;

    write_manifest(&job.out_dir.join(MANIFEST_FILE), &updated)?;
    Ok(updated)
}

/// Applies one fixed treatment to every image (ablation path).
pub fn degrade_dataset_fixed(
    in_dir: &Path,
    job: &GenerateJob,
    treatment: Treatment,
) -> Result<Vec<SampleRecord>, GenerateError> {
    let mix = match treatment {
        Treatment::Clean => TreatmentMix {
            clean: 1.0,
            moderate: 0.0,
            heavy: 0.0,
        },
        Treatment::Moderate => TreatmentMix {
            clean: 0.0,
            moderate: 1.0,
            heavy: 0.0,
        },
        Treatment::Heavy => TreatmentMix {
            clean: 0.0,
            moderate: 0.0,
            heavy: 1.0,
        },
    };
    let job = GenerateJob {
        treatment_mix: mix,
        ..job.clone()
    };
    degrade_dataset(in_dir, &job)
}
