//! BLEU-4: corpus scoring over pooled clipped n-gram counts, plus a
//! smoothed per-sentence variant for sample-level diagnostics.

use std::collections::HashMap;

pub const BLEU_ORDER: usize = 4;

/// Clipped n-gram match statistics for orders 1..=4, plus token
/// lengths. Integer-valued, so pooling over a corpus is exact and
/// order-independent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NgramStats {
    pub matched: [u64; BLEU_ORDER],
    pub total: [u64; BLEU_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl NgramStats {
    pub fn add(&mut self, other: &NgramStats) {
        for n in 0..BLEU_ORDER {
            self.matched[n] += other.matched[n];
            self.total[n] += other.total[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }
}

/// Counts clipped n-gram matches between one reference and one
/// hypothesis, both as whitespace tokens.
pub fn ngram_stats(reference: &[&str], hypothesis: &[&str]) -> NgramStats {
    let mut stats = NgramStats {
        hyp_len: hypothesis.len() as u64,
        ref_len: reference.len() as u64,
        ..Default::default()
    };
    for n in 1..=BLEU_ORDER {
        if hypothesis.len() < n {
            break;
        }
        let mut ref_counts: HashMap<&[&str], u64> = HashMap::new();
        for gram in reference.windows(n) {
            *ref_counts.entry(gram).or_default() += 1;
        }
        let mut matched = 0u64;
        for gram in hypothesis.windows(n) {
            if let Some(remaining) = ref_counts.get_mut(gram) {
                if *remaining > 0 {
                    *remaining -= 1;
                    matched += 1;
                }
            }
        }
        stats.matched[n - 1] = matched;
        stats.total[n - 1] = (hypothesis.len() - n + 1) as u64;
    }
    stats
}

fn brevity_penalty(stats: &NgramStats) -> f64 {
    if stats.hyp_len >= stats.ref_len {
        1.0
    } else {
        (1.0 - stats.ref_len as f64 / stats.hyp_len as f64).exp()
    }
}

/// Corpus BLEU-4 from pooled statistics: geometric mean of the four
/// pooled precisions times the brevity penalty. Any zero or undefined
/// pooled precision gives 0; no smoothing at corpus level.
pub fn corpus_bleu_from_stats(stats: &NgramStats) -> f64 {
    if stats.hyp_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..BLEU_ORDER {
        if stats.total[n] == 0 || stats.matched[n] == 0 {
            return 0.0;
        }
        log_sum += (stats.matched[n] as f64 / stats.total[n] as f64).ln();
    }
    brevity_penalty(stats) * (log_sum / BLEU_ORDER as f64).exp()
}

/// Sentence BLEU-4: zero or undefined precisions are replaced by
/// `epsilon` so short hypotheses still score informatively. An empty
/// hypothesis is exactly 0.
pub fn sentence_bleu_from_stats(stats: &NgramStats, epsilon: f64) -> f64 {
    if stats.hyp_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..BLEU_ORDER {
        let p = if stats.total[n] == 0 || stats.matched[n] == 0 {
            epsilon
        } else {
            stats.matched[n] as f64 / stats.total[n] as f64
        };
        log_sum += p.ln();
    }
    brevity_penalty(stats) * (log_sum / BLEU_ORDER as f64).exp()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BleuError {
    #[error("corpus BLEU needs at least one pair")]
    EmptyPairList,
}

/// Corpus BLEU over (reference, hypothesis) text pairs, tokenized on
/// whitespace. Inputs are expected pre-normalized.
pub fn bleu_corpus(pairs: &[(&str, &str)]) -> Result<f64, BleuError> {
    if pairs.is_empty() {
        return Err(BleuError::EmptyPairList);
    }
    let mut pooled = NgramStats::default();
    for (reference, hypothesis) in pairs {
        let r: Vec<&str> = reference.split_whitespace().collect();
        let h: Vec<&str> = hypothesis.split_whitespace().collect();
        pooled.add(&ngram_stats(&r, &h));
    }
    Ok(corpus_bleu_from_stats(&pooled))
}

/// Sentence BLEU over one text pair, tokenized on whitespace.
pub fn sentence_bleu(reference: &str, hypothesis: &str, epsilon: f64) -> f64 {
    let r: Vec<&str> = reference.split_whitespace().collect();
    let h: Vec<&str> = hypothesis.split_whitespace().collect();
    sentence_bleu_from_stats(&ngram_stats(&r, &h), epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-9;

    #[test]
    fn perfect_match_scores_one() {
        let pairs = [("ا ب ج د ه", "ا ب ج د ه")];
        assert_eq!(bleu_corpus(&pairs).unwrap(), 1.0);
        assert_eq!(sentence_bleu("ا ب ج د ه", "ا ب ج د ه", EPS), 1.0);
    }

    #[test]
    fn disjoint_unigrams_score_zero() {
        let pairs = [("ا ب ج د", "س ش ص ض")];
        assert_eq!(bleu_corpus(&pairs).unwrap(), 0.0);
    }

    #[test]
    fn missing_fourgram_zeroes_corpus_but_not_sentence() {
        // ref "ا ب ج د", hyp "ا ب ج": p1=p2=p3=1, no 4-gram window
        let pairs = [("ا ب ج د", "ا ب ج")];
        assert_eq!(bleu_corpus(&pairs).unwrap(), 0.0);
        let s = sentence_bleu("ا ب ج د", "ا ب ج", EPS);
        assert!((s - 0.0040293516672844235).abs() < 1e-12, "{s}");
    }

    #[test]
    fn brevity_penalty_alone() {
        // hyp is a 4-token prefix of a 5-token ref: all precisions 1,
        // BP = exp(1 - 5/4)
        let pairs = [("ا ب ج د ه", "ا ب ج د")];
        let score = bleu_corpus(&pairs).unwrap();
        assert!((score - 0.7788007830714049).abs() < 1e-12, "{score}");
    }

    #[test]
    fn pooling_rescues_short_pairs() {
        // the 3-token pair has no 4-gram window, but pooled totals stay
        // positive thanks to the 5-token pair
        let pairs = [("ا ب ج د ه", "ا ب ج د ه"), ("و ز ح ط", "و ز ح")];
        let score = bleu_corpus(&pairs).unwrap();
        assert!((score - 0.8824969025845955).abs() < 1e-12, "{score}");
    }

    #[test]
    fn substitution_in_the_middle() {
        let s = sentence_bleu("ا ب ج د ه", "ا ب ج س ه", EPS);
        assert!((s - 0.003398088489694247).abs() < 1e-12, "{s}");
    }

    #[test]
    fn clipping_limits_repeated_tokens() {
        let s = sentence_bleu("the cat", "the the the", EPS);
        assert!((s - 1.351200154807036e-7).abs() < 1e-18, "{s}");
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        assert_eq!(sentence_bleu("ا ب", "", EPS), 0.0);
        let pairs = [("ا ب", "")];
        assert_eq!(bleu_corpus(&pairs).unwrap(), 0.0);
    }

    #[test]
    fn empty_pair_list_is_an_error() {
        assert_eq!(bleu_corpus(&[]).unwrap_err(), BleuError::EmptyPairList);
    }

    #[test]
    fn stats_pool_exactly() {
        let a = ngram_stats(&["ا", "ب", "ج"], &["ا", "ب"]);
        let b = ngram_stats(&["د"], &["د"]);
        let mut pooled = NgramStats::default();
        pooled.add(&a);
        pooled.add(&b);
        assert_eq!(pooled.matched[0], 3);
        assert_eq!(pooled.total[0], 3);
        assert_eq!(pooled.matched[1], 1);
        assert_eq!(pooled.hyp_len, 3);
        assert_eq!(pooled.ref_len, 4);
    }
}
