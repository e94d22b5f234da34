//! Unit-cost edit distance with a substitution/deletion/insertion
//! decomposition from a fixed-tie-break traceback.

use serde::{Deserialize, Serialize};

/// Edit operation counts. `substitutions + deletions + insertions`
/// equals the minimal edit distance; the split is made deterministic
/// by the traceback preference match > substitution > deletion >
/// insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitutions: u64,
    pub deletions: u64,
    pub insertions: u64,
}

impl EditCounts {
    pub fn distance(&self) -> u64 {
        self.substitutions + self.deletions + self.insertions
    }

    pub fn add(&mut self, other: &EditCounts) {
        self.substitutions += other.substitutions;
        self.deletions += other.deletions;
        self.insertions += other.insertions;
    }
}

/// Full-matrix Levenshtein between `a` (reference) and `b`
/// (hypothesis). Deletions remove reference items, insertions add
/// hypothesis items.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> EditCounts {
    let (m, n) = (a.len(), b.len());
    let width = n + 1;
    let mut d = vec![0u32; (m + 1) * width];
    for (j, cell) in d.iter_mut().enumerate().take(width) {
        *cell = j as u32;
    }
    for i in 1..=m {
        d[i * width] = i as u32;
        let ai = &a[i - 1];
        for j in 1..=n {
            let sub_cost = if *ai == b[j - 1] { 0 } else { 1 };
            let best = (d[(i - 1) * width + j - 1] + sub_cost)
                .min(d[(i - 1) * width + j] + 1)
                .min(d[i * width + j - 1] + 1);
            d[i * width + j] = best;
        }
    }

    let mut counts = EditCounts::default();
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let cur = d[i * width + j];
        if i > 0 && j > 0 && a[i - 1] == b[j - 1] && cur == d[(i - 1) * width + j - 1] {
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && cur == d[(i - 1) * width + j - 1] + 1 {
            counts.substitutions += 1;
            i -= 1;
            j -= 1;
        } else if i > 0 && cur == d[(i - 1) * width + j] + 1 {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }
    debug_assert_eq!(counts.distance(), d[m * width + n] as u64);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn identity_is_zero() {
        let c = levenshtein(&chars("abc"), &chars("abc"));
        assert_eq!(c, EditCounts::default());
    }

    #[test]
    fn empty_hypothesis_is_all_deletions() {
        let c = levenshtein(&chars("abc"), &chars(""));
        assert_eq!(
            c,
            EditCounts {
                substitutions: 0,
                deletions: 3,
                insertions: 0
            }
        );
    }

    #[test]
    fn empty_reference_is_all_insertions() {
        let c = levenshtein(&chars(""), &chars("abcd"));
        assert_eq!(c.insertions, 4);
        assert_eq!(c.distance(), 4);
    }

    #[test]
    fn trailing_tashkeel_is_one_insertion() {
        let c = levenshtein(&chars("كتب"), &chars("كتبَ"));
        assert_eq!(c.distance(), 1);
        assert_eq!(c.insertions, 1);
    }

    #[test]
    fn tie_break_prefers_substitution() {
        // "ab" -> "ba" can be S=2 or D=1,I=1; the traceback pins S=2
        let c = levenshtein(&chars("ab"), &chars("ba"));
        assert_eq!(
            c,
            EditCounts {
                substitutions: 2,
                deletions: 0,
                insertions: 0
            }
        );
    }

    #[test]
    fn classic_distance() {
        let c = levenshtein(&chars("kitten"), &chars("sitting"));
        assert_eq!(c.distance(), 3);
        assert_eq!(c.substitutions, 2);
        assert_eq!(c.insertions, 1);
    }

    #[test]
    fn works_on_word_sequences() {
        let a: Vec<&str> = "ذهب الولد الى المدرسة".split(' ').collect();
        let b: Vec<&str> = "ذهب الولد المدرسة".split(' ').collect();
        let c = levenshtein(&a, &b);
        assert_eq!(c.distance(), 1);
        assert_eq!(c.deletions, 1);
    }

    #[test]
    fn distance_is_symmetric() {
        let pairs = [("abc", "yabd"), ("كتب", "كتاب"), ("", "xy"), ("aaa", "aba")];
        for (a, b) in pairs {
            assert_eq!(
                levenshtein(&chars(a), &chars(b)).distance(),
                levenshtein(&chars(b), &chars(a)).distance()
            );
        }
    }
}
