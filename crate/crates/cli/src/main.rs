//! qari-forge: build synthetic Arabic OCR datasets and score model
//! output against them. Every run is reproducible from its seed and
//! config; every artifact carries the exact run configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qari_forge::config::{ConfigError, FileConfig};
use qari_forge::corpus::load_corpus;
use qari_forge::degrade::{Treatment, TreatmentMix};
use qari_forge::generate::{
    degrade_dataset, degrade_dataset_fixed, generate, GenerateError, GenerateJob, MANIFEST_FILE,
};
use qari_forge::manifest::{load_manifest, ManifestError, SampleRecord};
use qari_forge::metrics::{
    evaluate, load_predictions, pair_up, AggregateMode, CerUnit, EvalError, EvalReport,
    MetricConfig, RefSource,
};
use qari_forge::profile::{DiacriticPolicy, SizePolicy, VersionProfile};
use qari_forge::render::{ExternalToolchain, MockRenderer, RendererAdapter};
use qari_forge::report::{by_font_table, comparison_table, ReportError, TableFormat};

const EXIT_CONFIG: u8 = 2;
const EXIT_RENDERER: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_IDS: u8 = 5;
const EXIT_MIXED_CONFIGS: u8 = 6;
const EXIT_INSPECT: u8 = 7;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    fn io(message: impl Into<String>) -> Self {
        Self::new(EXIT_IO, message)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Self::io(e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl From<GenerateError> for CliError {
    fn from(e: GenerateError) -> Self {
        let code = match &e {
            GenerateError::ZeroCount
            | GenerateError::Profile(_)
            | GenerateError::TreatmentMix(_)
            | GenerateError::DegradeRanges(_)
            | GenerateError::Font(_)
            | GenerateError::Sample { .. } => EXIT_CONFIG,
            GenerateError::Render { .. } => EXIT_RENDERER,
            GenerateError::Raster(_)
            | GenerateError::Manifest(_)
            | GenerateError::Io { .. }
            | GenerateError::InvalidRecord { .. } => EXIT_IO,
        };
        Self::new(code, e.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        Self::io(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let code = match &e {
            EvalError::Config(_) | EvalError::Empty | EvalError::MissingMarkup { .. } => {
                EXIT_CONFIG
            }
            EvalError::DuplicateId { .. } | EvalError::MissingPredictions { .. } => EXIT_IDS,
            EvalError::Io { .. } | EvalError::MalformedLine { .. } => EXIT_IO,
        };
        Self::new(code, e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        let code = match &e {
            ReportError::NoReports => EXIT_CONFIG,
            ReportError::ConflictingConfigs { .. } => EXIT_MIXED_CONFIGS,
        };
        Self::new(code, e.to_string())
    }
}

/// The resolved parameters of one invocation, echoed into every
/// artifact the invocation produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum RunConfig {
    Generate {
        profile: String,
        count: u64,
        seed: u64,
        corpus: PathBuf,
        out_dir: PathBuf,
        renderer: String,
        render_command: Option<PathBuf>,
        font_dir: PathBuf,
        treatment_mix: TreatmentMix,
        degrade_ranges: qari_forge::degrade::DegradeRanges,
        min_paragraph_chars: usize,
        max_paragraph_chars: usize,
        jobs: Option<usize>,
    },
    Degrade {
        input: PathBuf,
        out_dir: PathBuf,
        seed: u64,
        treatment: Option<Treatment>,
        treatment_mix: TreatmentMix,
        degrade_ranges: qari_forge::degrade::DegradeRanges,
        jobs: Option<usize>,
    },
    Evaluate {
        manifest: PathBuf,
        predictions: PathBuf,
        label: String,
        ref_source: String,
        metrics: MetricConfig,
        jobs: Option<usize>,
    },
    Report {
        inputs: Vec<PathBuf>,
        by_font: bool,
        format: String,
    },
}

#[derive(Parser)]
#[command(
    name = "qari-forge",
    version,
    about = "Synthetic Arabic OCR dataset generation and evaluation"
)]
struct Cli {
    /// TOML config file (fonts, custom profiles, defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset: images/ plus manifest.jsonl plus config echo.
    Generate(GenerateArgs),
    /// Re-degrade an existing dataset under freshly sampled treatments.
    Degrade(DegradeArgs),
    /// Score predictions against a manifest; writes report.json.
    Evaluate(EvaluateArgs),
    /// Merge evaluation reports into one comparison table.
    Report(ReportArgs),
    /// Print one manifest record with conformance checks.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RendererChoice {
    /// Deterministic built-in renderer (no external tools.)
    Mock,
    /// External HTML-to-image command; see --render-command.
    External,
}

#[derive(Args)]
struct GenerateArgs {
    /// Profile name: v0.1, v0.2, v0.3, or one from the config file.
    #[arg(long)]
    profile: String,
    /// Sample count; defaults to the profile's standard size.
    #[arg(long)]
    count: Option<u64>,
    /// Master seed; sample i depends only on (seed, i).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Paragraph corpus (UTF-8, blank-line separated).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Dataset output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RendererChoice::Mock)]
    renderer: RendererChoice,
    /// Command invoked as `<cmd> <markup> <css> <out_png>` for --renderer external.
    #[arg(long)]
    render_command: Option<PathBuf>,
    /// Font directory override (else $QARI_FORGE_FONT_DIR, else config).
    #[arg(long)]
    font_dir: Option<PathBuf>,
    /// Treatment weights as clean,moderate,heavy (e.g. 0.4,0.3,0.3).
    #[arg(long)]
    mix: Option<String>,
    /// Shortcut for --mix 1,0,0.
    #[arg(long)]
    clean_only: bool,
    /// Cap worker parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct DegradeArgs {
    /// Existing dataset directory (manifest.jsonl + images/).
    input: PathBuf,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// Master seed for the re-degradation pass.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply one fixed treatment instead of sampling from the mix.
    #[arg(long, value_enum)]
    treatment: Option<TreatmentChoice>,
    /// Treatment weights as clean,moderate,heavy when sampling.
    #[arg(long)]
    mix: Option<String>,
    /// Cap worker parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreatmentChoice {
    Clean,
    Moderate,
    Heavy,
}

impl From<TreatmentChoice> for Treatment {
    fn from(t: TreatmentChoice) -> Self {
        match t {
            TreatmentChoice::Clean => Treatment::Clean,
            TreatmentChoice::Moderate => Treatment::Moderate,
            TreatmentChoice::Heavy => Treatment::Heavy,
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Dataset manifest with ground truths.
    #[arg(long)]
    manifest: PathBuf,
    /// Predictions JSONL: {"id": ..., "text": ...} per line.
    #[arg(long)]
    predictions: PathBuf,
    /// Model label for report rows; defaults to the predictions file stem.
    #[arg(long)]
    label: Option<String>,
    /// Where to write report.json.
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    /// Also write the rendered single-model table here.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Reference side: auto (markup when present), plain, or markup.
    #[arg(long, default_value = "auto")]
    ref_source: String,
    /// Strip layout tags from references before scoring.
    #[arg(long)]
    strip_markup: bool,
    /// Strip tashkeel from both sides before scoring.
    #[arg(long)]
    strip_tashkeel: bool,
    /// Strip tatweel from both sides before scoring.
    #[arg(long)]
    strip_tatweel: bool,
    /// Fold alef-hamza variants to bare alef before scoring.
    #[arg(long)]
    unify_alef_hamza: bool,
    /// CER unit: codepoint or grapheme-cluster.
    #[arg(long)]
    cer_unit: Option<String>,
    /// Headline aggregation: macro or micro.
    #[arg(long)]
    aggregate: Option<String>,
    /// Cap worker parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// One or more report.json files from `evaluate`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Break rows out per font, one column per font id.
    #[arg(long)]
    by_font: bool,
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    /// Dataset manifest.
    #[arg(long)]
    manifest: PathBuf,
    /// Record id to inspect.
    #[arg(long)]
    id: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(cli.config.as_deref(), args),
        Command::Degrade(args) => cmd_degrade(cli.config.as_deref(), args),
        Command::Evaluate(args) => cmd_evaluate(cli.config.as_deref(), args),
        Command::Report(args) => cmd_report(args),
        Command::Inspect(args) => cmd_inspect(cli.config.as_deref(), args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn parse_mix(spec: &str) -> Result<TreatmentMix, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "treatment mix {spec:?} must be clean,moderate,heavy"
        ));
    }
    let weight = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad treatment weight {s:?}"))
    };
    let mix = TreatmentMix {
        clean: weight(parts[0])?,
        moderate: weight(parts[1])?,
        heavy: weight(parts[2])?,
    };
    mix.validate()?;
    Ok(mix)
}

fn resolve_mix(
    flag: Option<&str>,
    clean_only: bool,
    config: &FileConfig,
) -> Result<TreatmentMix, CliError> {
    if clean_only {
        return Ok(TreatmentMix::clean_only());
    }
    match flag {
        Some(spec) => parse_mix(spec).map_err(CliError::config),
        None => Ok(config.generate.treatment_mix),
    }
}

fn resolve_count(flag: Option<u64>, profile: &VersionProfile) -> u64 {
    flag.unwrap_or(profile.default_count)
}

fn label_for(flag: Option<String>, predictions: &Path) -> String {
    flag.unwrap_or_else(|| {
        predictions
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into())
    })
}

fn with_pool<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::config("--jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn write_run_config(dir: &Path, run: &RunConfig) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(run)
        .map_err(|e| CliError::io(format!("cannot serialize run config: {e}")))?;
    body.push('\n');
    let path = dir.join("run_config.json");
    std::fs::write(&path, body)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn table_with_echo(mut table: String, format: TableFormat, run: &RunConfig) -> String {
    let echo = serde_json::to_string(run).expect("run config serializes");
    match format {
        TableFormat::Markdown => table.push_str(&format!("\n<!-- run_config: {echo} -->\n")),
        TableFormat::Csv => table.push_str(&format!("# run_config: {echo}\n")),
    }
    table
}

fn cmd_generate(config_path: Option<&Path>, args: GenerateArgs) -> Result<(), CliError> {
    let config = FileConfig::load_or_default(config_path)?;
    let profile = config.resolve_profile(&args.profile)?;
    let count = resolve_count(args.count, &profile);
    let corpus_path = args
        .corpus
        .or_else(|| config.generate.corpus.clone())
        .ok_or_else(|| CliError::config("no corpus given (--corpus or [generate] corpus)"))?;
    let corpus = load_corpus(
        &corpus_path,
        config.generate.min_paragraph_chars,
        config.generate.max_paragraph_chars,
    )
    .map_err(|e| match e {
        qari_forge::corpus::CorpusError::Io { .. } => CliError::io(e.to_string()),
        _ => CliError::config(e.to_string()),
    })?;
    let out_dir = args.out.unwrap_or_else(|| config.generate.out_dir.clone());
    let font_dir = config.font_dir(args.font_dir.as_deref());
    let registry = config.build_registry(args.font_dir.as_deref());
    let mix = resolve_mix(args.mix.as_deref(), args.clean_only, &config)?;

    let renderer: Box<dyn RendererAdapter + Sync> = match args.renderer {
        RendererChoice::Mock => Box::new(MockRenderer::default()),
        RendererChoice::External => {
            let command = args.render_command.clone().ok_or_else(|| {
                CliError::config("--renderer external requires --render-command")
            })?;
            Box::new(ExternalToolchain::new(command))
        }
    };

    let job = GenerateJob {
        count,
        master_seed: args.seed,
        treatment_mix: mix,
        degrade_ranges: config.degrade,
        out_dir: out_dir.clone(),
    };
    let records = with_pool(args.jobs, || {
        generate(&job, &profile, &corpus, &registry, renderer.as_ref())
    })??;

    let run = RunConfig::Generate {
        profile: profile.name.clone(),
        count,
        seed: args.seed,
        corpus: corpus_path,
        out_dir: out_dir.clone(),
        renderer: match args.renderer {
            RendererChoice::Mock => "mock".into(),
            RendererChoice::External => "external".into(),
        },
        render_command: args.render_command,
        font_dir,
        treatment_mix: mix,
        degrade_ranges: config.degrade,
        min_paragraph_chars: config.generate.min_paragraph_chars,
        max_paragraph_chars: config.generate.max_paragraph_chars,
        jobs: args.jobs,
    };
    write_run_config(&out_dir, &run)?;
    println!(
        "generated {} samples under {} ({} + images/)",
        records.len(),
        out_dir.display(),
        MANIFEST_FILE
    );
    Ok(())
}

fn cmd_degrade(config_path: Option<&Path>, args: DegradeArgs) -> Result<(), CliError> {
    let config = FileConfig::load_or_default(config_path)?;
    let mix = resolve_mix(args.mix.as_deref(), false, &config)?;
    let job = GenerateJob {
        count: 1, // unused by the degrade pass; record count comes from the input manifest
        master_seed: args.seed,
        treatment_mix: mix,
        degrade_ranges: config.degrade,
        out_dir: args.out.clone(),
    };
    let treatment = args.treatment.map(Treatment::from);
    let records = with_pool(args.jobs, || match treatment {
        Some(t) => degrade_dataset_fixed(&args.input, &job, t),
        None => degrade_dataset(&args.input, &job),
    })??;

    let run = RunConfig::Degrade {
        input: args.input,
        out_dir: args.out.clone(),
        seed: args.seed,
        treatment,
        treatment_mix: mix,
        degrade_ranges: config.degrade,
        jobs: args.jobs,
    };
    write_run_config(&args.out, &run)?;
    println!(
        "re-degraded {} samples into {}",
        records.len(),
        args.out.display()
    );
    Ok(())
}

fn metric_config_from(config: &FileConfig, args: &EvaluateArgs) -> Result<MetricConfig, CliError> {
    let mut cfg = config.metrics.clone();
    if args.strip_markup {
        cfg.strip_markup = true;
    }
    if args.strip_tashkeel {
        cfg.strip_tashkeel = true;
    }
    if args.strip_tatweel {
        cfg.strip_tatweel = true;
    }
    if args.unify_alef_hamza {
        cfg.unify_alef_hamza = true;
    }
    if let Some(unit) = &args.cer_unit {
        cfg.cer_unit = match unit.as_str() {
            "codepoint" => CerUnit::Codepoint,
            "grapheme-cluster" => CerUnit::GraphemeCluster,
            other => {
                return Err(CliError::config(format!(
                    "unknown CER unit {other:?} (codepoint, grapheme-cluster)"
                )))
            }
        };
    }
    if let Some(mode) = &args.aggregate {
        cfg.aggregate_mode = match mode.as_str() {
            "macro" => AggregateMode::Macro,
            "micro" => AggregateMode::Micro,
            other => {
                return Err(CliError::config(format!(
                    "unknown aggregate mode {other:?} (macro, micro)"
                )))
            }
        };
    }
    Ok(cfg)
}

/// On-disk shape of report.json: the evaluation report plus the run
/// configuration that produced it.
#[derive(Serialize, Deserialize)]
struct ReportArtifact {
    #[serde(default)]
    run_config: Option<RunConfig>,
    #[serde(flatten)]
    report: EvalReport,
}

fn cmd_evaluate(config_path: Option<&Path>, args: EvaluateArgs) -> Result<(), CliError> {
    let config = FileConfig::load_or_default(config_path)?;
    let cfg = metric_config_from(&config, &args)?;
    let ref_source: RefSource = args.ref_source.parse().map_err(CliError::config)?;
    let format: TableFormat = args.format.parse().map_err(CliError::config)?;
    let label = label_for(args.label.clone(), &args.predictions);

    let records = load_manifest(&args.manifest)?;
    let predictions = load_predictions(&args.predictions)?;
    let pairs = pair_up(&records, &predictions, ref_source)?;
    let report = with_pool(args.jobs, || evaluate(&pairs, &cfg, &label))??;

    let run = RunConfig::Evaluate {
        manifest: args.manifest.clone(),
        predictions: args.predictions.clone(),
        label: label.clone(),
        ref_source: args.ref_source.clone(),
        metrics: cfg,
        jobs: args.jobs,
    };
    let artifact = ReportArtifact {
        run_config: Some(run.clone()),
        report,
    };
    let mut body = serde_json::to_string_pretty(&artifact)
        .map_err(|e| CliError::io(format!("cannot serialize report: {e}")))?;
    body.push('\n');
    std::fs::write(&args.out, body)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", args.out.display())))?;

    let table = comparison_table(std::slice::from_ref(&artifact.report), format)?;
    let table = table_with_echo(table, format, &run);
    if let Some(path) = &args.table {
        std::fs::write(path, &table)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{table}");
    println!("report written to {}", args.out.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let format: TableFormat = args.format.parse().map_err(CliError::config)?;
    let mut reports = Vec::new();
    for path in &args.inputs {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        let artifact: ReportArtifact = serde_json::from_str(&raw)
            .map_err(|e| CliError::io(format!("cannot parse {}: {e}", path.display())))?;
        reports.push(artifact.report);
    }
    let table = if args.by_font {
        by_font_table(&reports, format)?
    } else {
        comparison_table(&reports, format)?
    };
    let run = RunConfig::Report {
        inputs: args.inputs.clone(),
        by_font: args.by_font,
        format: args.format.clone(),
    };
    let table = table_with_echo(table, format, &run);
    match &args.out {
        Some(path) => std::fs::write(path, &table)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{table}"),
    }
    Ok(())
}

struct Inspection {
    lines: Vec<String>,
    failed: bool,
}

impl Inspection {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            failed: false,
        }
    }

    fn check(&mut self, what: String, ok: bool) {
        self.lines
            .push(format!("{what}: {}", if ok { "PASS" } else { "FAIL" }));
        self.failed |= !ok;
    }

    fn note(&mut self, what: String) {
        self.lines.push(what);
    }
}

fn inspect_record(record: &SampleRecord, profile: Option<&VersionProfile>) -> Inspection {
    let mut out = Inspection::new();
    let stats = record.ground_truth_plain.stats();

    match profile {
        Some(profile) => {
            match profile.diacritics {
                DiacriticPolicy::Strip => {
                    out.check(
                        format!("tashkeel count {} = 0", stats.tashkeel_count),
                        stats.tashkeel_count == 0,
                    );
                }
                DiacriticPolicy::Require { min_density } => {
                    out.check(
                        format!("density {:.2} ≥ {min_density:.2}", stats.density),
                        stats.density >= min_density,
                    );
                }
                DiacriticPolicy::Any => out.note("diacritics: unconstrained".into()),
            }
            let rogue: Vec<&String> = record
                .fonts_used
                .iter()
                .filter(|f| !profile.fonts.contains(f))
                .collect();
            out.check(
                format!("fonts {:?} within profile set", record.fonts_used),
                rogue.is_empty(),
            );
            let (lo, hi) = profile.size_policy.bounds();
            out.check(
                format!("sizes {:?} within [{lo}, {hi}]", record.sizes_used),
                record.sizes_used.iter().all(|s| (lo..=hi).contains(s)),
            );
            if matches!(profile.size_policy, SizePolicy::MultiSizePerPage { .. }) {
                out.check(
                    format!("distinct sizes {} ≥ 2", record.sizes_used.len()),
                    record.sizes_used.len() >= 2,
                );
            }
            out.check(
                format!(
                    "markup presence matches profile ({})",
                    profile.markup_ground_truth
                ),
                record.ground_truth_markup.is_some() == profile.markup_ground_truth,
            );
        }
        None => out.note(format!(
            "profile {:?} unknown here; profile checks skipped",
            record.profile
        )),
    }

    match record.validate() {
        Ok(()) => {
            let what = if record.ground_truth_markup.is_some() {
                "markup parses and matches plain text"
            } else {
                "record invariants"
            };
            out.check(what.into(), true);
        }
        Err(e) => {
            out.note(format!("invariant failure: {e}"));
            out.check("record invariants".into(), false);
        }
    }
    out
}

fn cmd_inspect(config_path: Option<&Path>, args: InspectArgs) -> Result<(), CliError> {
    let config = FileConfig::load_or_default(config_path)?;
    let records = load_manifest(&args.manifest)?;
    let record = records
        .iter()
        .find(|r| r.id == args.id)
        .ok_or_else(|| CliError::new(EXIT_INSPECT, format!("no record with id {:?}", args.id)))?;

    let pretty = serde_json::to_string_pretty(record)
        .map_err(|e| CliError::io(format!("cannot serialize record: {e}")))?;
    println!("{pretty}");

    let profile = config.resolve_profile(&record.profile).ok();
    let inspection = inspect_record(record, profile.as_ref());
    for line in &inspection.lines {
        println!("{line}");
    }
    if inspection.failed {
        return Err(CliError::new(
            EXIT_INSPECT,
            format!("record {:?} failed inspection", args.id),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qari_forge::degrade::DegradeParams;
    use qari_forge::profile::builtin_profile;
    use qari_forge::text::ScriptText;

    #[test]
    fn count_defaults_to_the_profile_size() {
        let v01 = builtin_profile("v0.1").unwrap();
        assert_eq!(resolve_count(None, &v01), 5_000);
        assert_eq!(resolve_count(Some(12), &v01), 12);
        assert_eq!(
            resolve_count(None, &builtin_profile("v0.2").unwrap()),
            50_000
        );
        assert_eq!(
            resolve_count(None, &builtin_profile("v0.3").unwrap()),
            10_000
        );
    }

    #[test]
    fn label_defaults_to_predictions_stem() {
        assert_eq!(
            label_for(None, Path::new("runs/tesseract-v5.jsonl")),
            "tesseract-v5"
        );
        assert_eq!(
            label_for(Some("qari".into()), Path::new("runs/x.jsonl")),
            "qari"
        );
    }

    #[test]
    fn mix_strings_parse_and_validate() {
        let mix = parse_mix("0.5, 0.25, 0.25").unwrap();
        assert_eq!(mix.clean, 0.5);
        assert!(parse_mix("0.5,0.5").is_err());
        assert!(parse_mix("1,1,1").is_err());
        assert!(parse_mix("a,b,c").is_err());
    }

    #[test]
    fn inspection_flags_tampered_records() {
        let profile = builtin_profile("v0.2").unwrap();
        let good = SampleRecord {
            id: "000001".into(),
            image_file: "images/000001.png".into(),
            ground_truth_plain: ScriptText::new("كَتَبَ الوَلَدُ الدَّرسَ"),
            ground_truth_markup: None,
            profile: "v0.2".into(),
            fonts_used: vec!["amiri".into()],
            sizes_used: vec![40],
            treatment: Treatment::Clean,
            degrade_params: DegradeParams::zero(),
            seed: 9,
        };
        let inspection = inspect_record(&good, Some(&profile));
        assert!(!inspection.failed, "{:?}", inspection.lines);
        assert!(inspection.lines.iter().any(|l| l.contains("density")));

        let mut tampered = good.clone();
        tampered.ground_truth_markup = Some("<p><span font-family=\"amiri\" font-size=\"40\">نص آخر</span></p>".into());
        let inspection = inspect_record(&tampered, Some(&profile));
        assert!(inspection.failed);
    }

    #[test]
    fn run_config_round_trips() {
        let run = RunConfig::Evaluate {
            manifest: "m.jsonl".into(),
            predictions: "p.jsonl".into(),
            label: "x".into(),
            ref_source: "auto".into(),
            metrics: MetricConfig::default(),
            jobs: Some(2),
        };
        let json = serde_json::to_string(&run).unwrap();
        assert!(json.contains("\"command\":\"evaluate\""));
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert!(matches!(back, RunConfig::Evaluate { .. }));
    }
}
