//! Evaluation stack: configurable normalization, CER/WER from edit
//! distance, BLEU-4, and corpus-level aggregation.

pub mod bleu;
mod evaluate;
mod levenshtein;

pub use bleu::{bleu_corpus, sentence_bleu, BleuError};
pub use evaluate::{
    evaluate, load_predictions, pair_up, Aggregate, EvalError, EvalPair, EvalReport, Prediction,
    RefSource, SampleScore,
};
pub use levenshtein::{levenshtein, EditCounts};

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::markup::{collapse_ws, extract_plain_text, parse_markup};
use crate::text::ScriptText;

/// What counts as one character for CER.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CerUnit {
    /// Unicode scalar values after NFC; a missed diacritic is exactly
    /// one error.
    Codepoint,
    /// Extended grapheme clusters; a base letter plus its marks is one
    /// unit.
    GraphemeCluster,
}

/// Which aggregate the rendered tables lead with. Reports always carry
/// both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregateMode {
    Macro,
    Micro,
}

impl std::fmt::Display for AggregateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Macro => "macro",
            Self::Micro => "micro",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub strip_markup: bool,
    pub strip_tashkeel: bool,
    pub strip_tatweel: bool,
    pub collapse_whitespace: bool,
    pub unify_alef_hamza: bool,
    pub cer_unit: CerUnit,
    pub bleu_max_n: u32,
    pub bleu_epsilon: f64,
    pub aggregate_mode: AggregateMode,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            strip_markup: false,
            strip_tashkeel: false,
            strip_tatweel: false,
            collapse_whitespace: true,
            unify_alef_hamza: false,
            cer_unit: CerUnit::Codepoint,
            bleu_max_n: 4,
            bleu_epsilon: 1e-9,
            aggregate_mode: AggregateMode::Macro,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.bleu_max_n != 4 {
            return Err(format!(
                "bleu_max_n is fixed at 4, got {}",
                self.bleu_max_n
            ));
        }
        if !(self.bleu_epsilon > 0.0 && self.bleu_epsilon < 1.0) {
            return Err(format!(
                "bleu_epsilon must lie in (0,1), got {}",
                self.bleu_epsilon
            ));
        }
        Ok(())
    }
}

/// Removes markup without requiring it to parse: tag spans become
/// spaces, the three known entities decode, everything else passes
/// through.
fn strip_tags_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' => {
                for t in chars.by_ref() {
                    if t == '>' {
                        break;
                    }
                }
                out.push(' ');
            }
            '&' => {
                let mut entity = String::new();
                let mut matched = false;
                for _ in 0..4 {
                    match chars.peek() {
                        Some(';') => {
                            chars.next();
                            matched = true;
                            break;
                        }
                        Some(c) if c.is_ascii_alphabetic() => {
                            entity.push(*c);
                            chars.next();
                        }
                        _ => break,
                    }
                }
                match (matched, entity.as_str()) {
                    (true, "amp") => out.push('&'),
                    (true, "lt") => out.push('<'),
                    (true, "gt") => out.push('>'),
                    _ => {
                        out.push('&');
                        out.push_str(&entity);
                        if matched {
                            out.push(';');
                        }
                    }
                }
            }
            c => out.push(c),
        }
    }
    out
}

fn fold_alef_hamza(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\u{0622}' | '\u{0623}' | '\u{0625}' | '\u{0671}' => '\u{0627}',
            c => c,
        })
        .collect()
}

/// The fixed normalization pipeline applied to both sides of every
/// comparison: optional markup strip (parser first, literal tag
/// removal as the total fallback), NFC ingest, optional tatweel strip,
/// optional tashkeel strip, optional alef/hamza folding, whitespace
/// collapse.
pub fn normalize_for_eval(raw: &str, cfg: &MetricConfig) -> ScriptText {
    let mut text = if cfg.strip_markup {
        match parse_markup(raw) {
            Ok(doc) => extract_plain_text(&doc),
            Err(_) => ScriptText::new(&strip_tags_literal(raw)),
        }
    } else {
        ScriptText::new(raw)
    };
    if cfg.strip_tatweel {
        text = text.strip_tatweel();
    }
    if cfg.strip_tashkeel {
        text = text.strip_tashkeel();
    }
    if cfg.unify_alef_hamza {
        text = ScriptText::new(&fold_alef_hamza(text.as_str()));
    }
    if cfg.collapse_whitespace {
        text = ScriptText::new(&collapse_ws(text.as_str()));
    }
    text
}

fn cer_units(t: &ScriptText, unit: CerUnit) -> Vec<&str> {
    match unit {
        CerUnit::Codepoint => t
            .as_str()
            .char_indices()
            .map(|(i, c)| &t.as_str()[i..i + c.len_utf8()])
            .collect(),
        CerUnit::GraphemeCluster => t.as_str().graphemes(true).collect(),
    }
}

fn word_tokens(t: &ScriptText) -> Vec<&str> {
    t.as_str().split_whitespace().collect()
}

/// CER detail: rate, edit decomposition, reference length in the
/// configured unit. Inputs must already be normalized via
/// [`normalize_for_eval`].
pub fn cer_detail(
    reference: &ScriptText,
    hypothesis: &ScriptText,
    cfg: &MetricConfig,
) -> (f64, EditCounts, u64) {
    let r = cer_units(reference, cfg.cer_unit);
    let h = cer_units(hypothesis, cfg.cer_unit);
    let counts = levenshtein(&r, &h);
    let ref_len = r.len() as u64;
    (
        counts.distance() as f64 / ref_len.max(1) as f64,
        counts,
        ref_len,
    )
}

/// WER detail: rate, edit decomposition, reference length in
/// whitespace tokens. Inputs must already be normalized.
pub fn wer_detail(
    reference: &ScriptText,
    hypothesis: &ScriptText,
) -> (f64, EditCounts, u64) {
    let r = word_tokens(reference);
    let h = word_tokens(hypothesis);
    let counts = levenshtein(&r, &h);
    let ref_len = r.len() as u64;
    (
        counts.distance() as f64 / ref_len.max(1) as f64,
        counts,
        ref_len,
    )
}

/// Character error rate: edit distance over reference length,
/// unclamped (scores above 1 are legal). Inputs must already be
/// normalized.
pub fn cer(reference: &ScriptText, hypothesis: &ScriptText, cfg: &MetricConfig) -> f64 {
    cer_detail(reference, hypothesis, cfg).0
}

/// Word error rate over whitespace tokens, unclamped. Inputs must
/// already be normalized.
pub fn wer(reference: &ScriptText, hypothesis: &ScriptText) -> f64 {
    wer_detail(reference, hypothesis).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> MetricConfig {
        MetricConfig::default()
    }

    #[test]
    fn defaults_validate() {
        cfg().validate().unwrap();
        let mut bad = cfg();
        bad.bleu_max_n = 3;
        assert!(bad.validate().is_err());
        let mut bad = cfg();
        bad.bleu_epsilon = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn normalize_strips_markup_via_parser() {
        let mut c = cfg();
        c.strip_markup = true;
        assert_eq!(normalize_for_eval("<p>كتب</p>", &c).as_str(), "كتب");
        assert_eq!(
            normalize_for_eval("<h1>ا</h1><p>ب</p>", &c).as_str(),
            "ا ب"
        );
    }

    #[test]
    fn normalize_falls_back_on_broken_markup() {
        let mut c = cfg();
        c.strip_markup = true;
        // unclosed tag fails the parser; the literal scrubber handles it
        assert_eq!(normalize_for_eval("<p>كتب", &c).as_str(), "كتب");
        assert_eq!(
            normalize_for_eval("<p>a &amp; b</p> &lt;c&gt;", &c).as_str(),
            "a & b <c>"
        );
    }

    #[test]
    fn normalize_collapses_whitespace() {
        assert_eq!(normalize_for_eval("  ا  ب ", &cfg()).as_str(), "ا ب");
        let mut keep = cfg();
        keep.collapse_whitespace = false;
        assert_eq!(normalize_for_eval("ا  ب", &keep).as_str(), "ا  ب");
    }

    #[test]
    fn normalize_strips_tashkeel_when_asked() {
        let mut c = cfg();
        c.strip_tashkeel = true;
        assert_eq!(normalize_for_eval("كَتَبَ", &c).as_str(), "كتب");
        assert_eq!(normalize_for_eval("كَتَبَ", &cfg()).as_str(), "كَتَبَ");
    }

    #[test]
    fn normalize_strips_tatweel_when_asked() {
        let mut c = cfg();
        c.strip_tatweel = true;
        assert_eq!(normalize_for_eval("كـتـب", &c).as_str(), "كتب");
    }

    #[test]
    fn normalize_folds_alef_variants_when_asked() {
        let mut c = cfg();
        c.unify_alef_hamza = true;
        assert_eq!(
            normalize_for_eval("أحمد إلى آخر ٱسم", &c).as_str(),
            "احمد الى اخر اسم"
        );
        assert_eq!(
            normalize_for_eval("أحمد", &cfg()).as_str(),
            "أحمد"
        );
    }

    #[test]
    fn cer_identity_and_unclamped() {
        let a = ScriptText::new("كتب الولد");
        assert_eq!(cer(&a, &a, &cfg()), 0.0);
        let short = ScriptText::new("قلم");
        let long = ScriptText::new("قلم رصاص جديد وطويل جدا");
        let rate = cer(&short, &long, &cfg());
        assert!(rate > 1.0, "{rate}");
        assert!((rate - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cer_counts_missed_diacritic_as_one_codepoint() {
        let reference = ScriptText::new("كتب");
        let hypothesis = ScriptText::new("كتبَ");
        let rate = cer(&reference, &hypothesis, &cfg());
        assert!((rate - 1.0 / 3.0).abs() < 1e-12, "{rate}");

        let mut stripped = cfg();
        stripped.strip_tashkeel = true;
        let r = normalize_for_eval("كتب", &stripped);
        let h = normalize_for_eval("كتبَ", &stripped);
        assert_eq!(cer(&r, &h, &stripped), 0.0);
    }

    #[test]
    fn grapheme_unit_sees_clusters() {
        let mut c = cfg();
        c.cer_unit = CerUnit::GraphemeCluster;
        let reference = ScriptText::new("كَتَبَ");
        let hypothesis = ScriptText::new("كتب");
        // three clusters, each base+mark vs bare base: three substitutions
        let (rate, counts, ref_len) = cer_detail(&reference, &hypothesis, &c);
        assert_eq!(ref_len, 3);
        assert_eq!(counts.substitutions, 3);
        assert_eq!(rate, 1.0);
        // codepoint view: six units, three deletions
        let (rate, _, ref_len) = cer_detail(&reference, &hypothesis, &cfg());
        assert_eq!(ref_len, 6);
        assert_eq!(rate, 0.5);
    }

    #[test]
    fn wer_examples() {
        let r4 = ScriptText::new("ذهب الولد الى المدرسة");
        let h3 = ScriptText::new("ذهب الولد المدرسة");
        assert!((wer(&r4, &h3) - 0.25).abs() < 1e-12);

        let r1 = ScriptText::new("قلم");
        let h3 = ScriptText::new("قلم رصاص جديد");
        assert_eq!(wer(&r1, &h3), 2.0);
    }

    #[test]
    fn empty_reference_uses_max_rule() {
        let empty = ScriptText::new("");
        let hyp = ScriptText::new("اب");
        assert_eq!(cer(&empty, &hyp, &cfg()), 2.0);
        assert_eq!(cer(&empty, &empty, &cfg()), 0.0);
        assert_eq!(wer(&empty, &hyp), 1.0);
    }

    #[test]
    fn tashkeel_stripping_never_raises_cer_on_mark_only_differences() {
        let pairs = [
            ("كَتَبَ الوَلَدُ", "كتب الولد"),
            ("مَدرَسَةٌ", "مدرسة"),
            ("نصٌ كاملٌ", "نصٌ كاملٌ"),
        ];
        for (r_raw, h_raw) in pairs {
            let plain_cfg = cfg();
            let mut strip_cfg = cfg();
            strip_cfg.strip_tashkeel = true;
            let with = cer(
                &normalize_for_eval(r_raw, &plain_cfg),
                &normalize_for_eval(h_raw, &plain_cfg),
                &plain_cfg,
            );
            let without = cer(
                &normalize_for_eval(r_raw, &strip_cfg),
                &normalize_for_eval(h_raw, &strip_cfg),
                &strip_cfg,
            );
            assert!(without <= with, "{r_raw} vs {h_raw}: {without} > {with}");
        }
    }
}
