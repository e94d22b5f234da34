//! Comparison tables over evaluation reports: one row per model
//! sorted by error rate, optionally expanded into per-font columns.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::metrics::{Aggregate, AggregateMode, EvalReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

impl std::str::FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown table format {other:?} (markdown, csv)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no reports to tabulate")]
    NoReports,
    #[error("reports {a:?} and {b:?} were scored under different metric configurations")]
    ConflictingConfigs { a: String, b: String },
}

/// All merged reports must share one metric configuration, otherwise
/// their numbers are not comparable.
pub fn ensure_consistent_configs(reports: &[EvalReport]) -> Result<(), ReportError> {
    let first = reports.first().ok_or(ReportError::NoReports)?;
    for other in &reports[1..] {
        if other.config != first.config {
            return Err(ReportError::ConflictingConfigs {
                a: first.label.clone(),
                b: other.label.clone(),
            });
        }
    }
    Ok(())
}

fn headline(agg: &Aggregate, mode: AggregateMode) -> (f64, f64) {
    match mode {
        AggregateMode::Macro => (agg.macro_cer, agg.macro_wer),
        AggregateMode::Micro => (agg.micro_cer, agg.micro_wer),
    }
}

/// Reports in presentation order: ascending headline CER, label as the
/// tie-break so equal scores stay stable across runs.
fn ranked(reports: &[EvalReport]) -> Vec<&EvalReport> {
    let mode = reports[0].config.aggregate_mode;
    let mut order: Vec<&EvalReport> = reports.iter().collect();
    order.sort_by(|x, y| {
        headline(&x.aggregate, mode)
            .0
            .total_cmp(&headline(&y.aggregate, mode).0)
            .then_with(|| x.label.cmp(&y.label))
    });
    order
}

fn cell(label: &str) -> String {
    label.replace('|', "\\|")
}

fn config_echo(report: &EvalReport) -> String {
    // MetricConfig is plain scalars; serialization cannot fail.
    serde_json::to_string(&report.config).expect("metric config serializes")
}

/// One row per model: `Model | CER | WER | BLEU`, best error rate
/// first. BLEU is the corpus score; the footer carries sample counts,
/// mean sentence BLEU, and the exact metric configuration.
pub fn comparison_table(
    reports: &[EvalReport],
    format: TableFormat,
) -> Result<String, ReportError> {
    ensure_consistent_configs(reports)?;
    let order = ranked(reports);
    let mode = reports[0].config.aggregate_mode;

    let mut out = String::new();
    match format {
        TableFormat::Markdown => {
            out.push_str("| Model | CER↓ | WER↓ | BLEU↑ |\n");
            out.push_str("|---|---:|---:|---:|\n");
            for r in &order {
                let (cer, wer) = headline(&r.aggregate, mode);
                writeln!(
                    out,
                    "| {} | {:.3} | {:.3} | {:.3} |",
                    cell(&r.label),
                    cer,
                    wer,
                    r.aggregate.corpus_bleu
                )
                .unwrap();
            }
            out.push('\n');
            let footer: Vec<String> = order
                .iter()
                .map(|r| {
                    format!(
                        "{} n={} mean-sentence-BLEU={:.3}",
                        r.label, r.aggregate.n_samples, r.aggregate.mean_sentence_bleu
                    )
                })
                .collect();
            writeln!(out, "Samples: {}.", footer.join("; ")).unwrap();
            writeln!(
                out,
                "Aggregation: {mode}. Metric config: {}",
                config_echo(reports.first().unwrap())
            )
            .unwrap();
        }
        TableFormat::Csv => {
            out.push_str("model,cer,wer,bleu,n_samples,mean_sentence_bleu\n");
            for r in &order {
                let (cer, wer) = headline(&r.aggregate, mode);
                writeln!(
                    out,
                    "{},{:.6},{:.6},{:.6},{},{:.6}",
                    csv_field(&r.label),
                    cer,
                    wer,
                    r.aggregate.corpus_bleu,
                    r.aggregate.n_samples,
                    r.aggregate.mean_sentence_bleu
                )
                .unwrap();
            }
            writeln!(
                out,
                "# aggregation: {mode}; metric config: {}",
                config_echo(reports.first().unwrap())
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Metric-by-model rows against one column per font, so per-font
/// behaviour of each model reads across a single line. Fonts missing
/// from a report render as `-`.
pub fn by_font_table(reports: &[EvalReport], format: TableFormat) -> Result<String, ReportError> {
    ensure_consistent_configs(reports)?;
    let order = ranked(reports);
    let mode = reports[0].config.aggregate_mode;

    let fonts: BTreeSet<&str> = order
        .iter()
        .flat_map(|r| r.by_font.keys().map(String::as_str))
        .collect();

    let value = |agg: &Aggregate, metric: usize| -> f64 {
        let (cer, wer) = headline(agg, mode);
        match metric {
            0 => cer,
            1 => wer,
            _ => agg.corpus_bleu,
        }
    };
    let metric_names = ["CER↓", "WER↓", "BLEU↑"];

    let mut out = String::new();
    match format {
        TableFormat::Markdown => {
            out.push_str("| Metric | Model |");
            for f in &fonts {
                write!(out, " {} |", cell(f)).unwrap();
            }
            out.push('\n');
            out.push_str("|---|---|");
            out.push_str(&"---:|".repeat(fonts.len()));
            out.push('\n');
            for (metric, name) in metric_names.iter().enumerate() {
                for r in &order {
                    write!(out, "| {} | {} |", name, cell(&r.label)).unwrap();
                    for f in &fonts {
                        match r.by_font.get(*f) {
                            Some(agg) => write!(out, " {:.3} |", value(agg, metric)).unwrap(),
                            None => out.push_str(" - |"),
                        }
                    }
                    out.push('\n');
                }
            }
            out.push('\n');
            writeln!(
                out,
                "Aggregation: {mode}. Metric config: {}",
                config_echo(reports.first().unwrap())
            )
            .unwrap();
        }
        TableFormat::Csv => {
            out.push_str("metric,model");
            for f in &fonts {
                write!(out, ",{}", csv_field(f)).unwrap();
            }
            out.push('\n');
            for (metric, name) in ["cer", "wer", "bleu"].iter().enumerate() {
                for r in &order {
                    write!(out, "{},{}", name, csv_field(&r.label)).unwrap();
                    for f in &fonts {
                        match r.by_font.get(*f) {
                            Some(agg) => write!(out, ",{:.6}", value(agg, metric)).unwrap(),
                            None => out.push(','),
                        }
                    }
                    out.push('\n');
                }
            }
            writeln!(
                out,
                "# aggregation: {mode}; metric config: {}",
                config_echo(reports.first().unwrap())
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
