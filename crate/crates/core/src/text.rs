//! Unicode-correct Arabic text processing.
//!
//! [`ScriptText`] is the canonical text value used for ground truth and
//! metric inputs: NFC-normalized, LF line endings, no other control
//! characters. Classification distinguishes letters from tashkeel
//! (vocalization marks), which drives both profile filters (diacritic
//! density gates) and the optional diacritic-insensitive metric modes.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use unicode_normalization::UnicodeNormalization;

/// Arabic vocalization marks, bijective with U+064B..U+0652 plus U+0670.
///
/// U+0670 (superscript alef) is included because classical vocalized
/// text uses it as a vowel mark; Quranic annotation signs beyond this
/// set classify as [`CharClass::Other`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TashkeelKind {
    Fathatan,
    Dammatan,
    Kasratan,
    Fatha,
    Damma,
    Kasra,
    Shadda,
    Sukun,
    SuperscriptAlef,
}

impl TashkeelKind {
    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            '\u{064B}' => Self::Fathatan,
            '\u{064C}' => Self::Dammatan,
            '\u{064D}' => Self::Kasratan,
            '\u{064E}' => Self::Fatha,
            '\u{064F}' => Self::Damma,
            '\u{0650}' => Self::Kasra,
            '\u{0651}' => Self::Shadda,
            '\u{0652}' => Self::Sukun,
            '\u{0670}' => Self::SuperscriptAlef,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Self::Fathatan => '\u{064B}',
            Self::Dammatan => '\u{064C}',
            Self::Kasratan => '\u{064D}',
            Self::Fatha => '\u{064E}',
            Self::Damma => '\u{064F}',
            Self::Kasra => '\u{0650}',
            Self::Shadda => '\u{0651}',
            Self::Sukun => '\u{0652}',
            Self::SuperscriptAlef => '\u{0670}',
        }
    }
}

/// Character classes relevant to Arabic OCR ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    ArabicLetter,
    Tashkeel(TashkeelKind),
    Tatweel,
    EasternDigit,
    WesternDigit,
    Punctuation,
    Whitespace,
    Other,
}

/// Classifies a Unicode scalar value. Total: every char maps to a class.
///
/// Maddah-carrying letterforms (e.g. U+0622) are base letters, not
/// diacritics. Latin letters classify as `Other`.
pub fn classify(c: char) -> CharClass {
    if let Some(kind) = TashkeelKind::from_char(c) {
        return CharClass::Tashkeel(kind);
    }
    match c {
        '\u{0640}' => CharClass::Tatweel,
        '\u{0660}'..='\u{0669}' => CharClass::EasternDigit,
        '0'..='9' => CharClass::WesternDigit,
        '\u{0620}'..='\u{063F}'
        | '\u{0641}'..='\u{064A}'
        | '\u{066E}'..='\u{066F}'
        | '\u{0671}'..='\u{06D3}'
        | '\u{06D5}'
        | '\u{06EE}'..='\u{06EF}'
        | '\u{06FA}'..='\u{06FC}'
        | '\u{06FF}'
        | '\u{0750}'..='\u{077F}' => CharClass::ArabicLetter,
        '\u{060C}' | '\u{061B}' | '\u{061E}' | '\u{061F}' | '\u{066A}' | '\u{066B}'
        | '\u{066C}' | '\u{066D}' | '\u{06D4}' | '\u{00AB}' | '\u{00BB}' | '\u{2013}'
        | '\u{2014}' | '\u{2026}' => CharClass::Punctuation,
        c if c.is_ascii_punctuation() => CharClass::Punctuation,
        c if c.is_whitespace() => CharClass::Whitespace,
        _ => CharClass::Other,
    }
}

/// Letter / tashkeel counts and the tashkeel-per-letter density used by
/// the dataset profile gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextStats {
    pub letter_count: usize,
    pub tashkeel_count: usize,
    pub density: f64,
}

/// Decode or ingest failure.
#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },
}

/// NFC-normalized text with LF-only line endings.
///
/// Construction normalizes: CRLF and bare CR become LF, tabs become
/// spaces, all other control characters are dropped, then the result is
/// NFC-composed. Re-ingesting a `ScriptText`'s contents is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ScriptText(String);

impl ScriptText {
    /// Ingests a string, applying the canonical normalization.
    pub fn new(raw: &str) -> Self {
        let mut cleaned = String::with_capacity(raw.len());
        let mut chars = raw.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '\r' => {
                    if chars.peek() == Some(&'\n') {
                        chars.next();
                    }
                    cleaned.push('\n');
                }
                '\t' => cleaned.push(' '),
                '\n' => cleaned.push('\n'),
                c if c.is_control() => {}
                c => cleaned.push(c),
            }
        }
        Self(cleaned.nfc().collect())
    }

    /// Decodes UTF-8 bytes and ingests them. Errors carry the byte
    /// offset of the first invalid sequence.
    pub fn from_bytes(raw: &[u8]) -> Result<Self, TextError> {
        let s = std::str::from_utf8(raw).map_err(|e| TextError::InvalidUtf8 {
            offset: e.valid_up_to(),
        })?;
        Ok(Self::new(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn chars(&self) -> std::str::Chars<'_> {
        self.0.chars()
    }

    /// Codepoint count.
    pub fn len_chars(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Removes all tashkeel marks, preserving everything else in order.
    pub fn strip_tashkeel(&self) -> Self {
        Self(
            self.0
                .chars()
                .filter(|&c| !matches!(classify(c), CharClass::Tashkeel(_)))
                .collect(),
        )
    }

    /// Removes all tatweel (kashida) characters.
    pub fn strip_tatweel(&self) -> Self {
        Self(self.0.chars().filter(|&c| c != '\u{0640}').collect())
    }

    /// Letter/tashkeel counts; density is tashkeel per letter with a
    /// denominator floor of one.
    pub fn stats(&self) -> TextStats {
        let mut letters = 0usize;
        let mut marks = 0usize;
        for c in self.0.chars() {
            match classify(c) {
                CharClass::ArabicLetter => letters += 1,
                CharClass::Tashkeel(_) => marks += 1,
                _ => {}
            }
        }
        TextStats {
            letter_count: letters,
            tashkeel_count: marks,
            density: marks as f64 / letters.max(1) as f64,
        }
    }
}

/// Spec-level entry point: decode and normalize raw bytes.
pub fn normalize(raw: &[u8]) -> Result<ScriptText, TextError> {
    ScriptText::from_bytes(raw)
}

impl std::fmt::Display for ScriptText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ScriptText {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl Serialize for ScriptText {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ScriptText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        // Re-normalizing keeps the invariant even for hand-edited files;
        // it is the identity on well-formed input.
        let s = String::deserialize(deserializer)?;
        Ok(Self::new(&s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_identity_on_nfc() {
        let t = ScriptText::new("كتب");
        assert_eq!(t.as_str(), "كتب");
    }

    #[test]
    fn normalize_composes_alef_madda() {
        // U+0627 U+0653 composes to U+0622 under NFC.
        let t = ScriptText::new("\u{0627}\u{0653}");
        assert_eq!(t.as_str(), "\u{0622}");
    }

    #[test]
    fn normalize_rejects_invalid_utf8_with_offset() {
        let err = ScriptText::from_bytes(&[0xFF]).unwrap_err();
        match err {
            TextError::InvalidUtf8 { offset } => assert_eq!(offset, 0),
        }
        let err = ScriptText::from_bytes(b"ab\xFFcd").unwrap_err();
        match err {
            TextError::InvalidUtf8 { offset } => assert_eq!(offset, 2),
        }
    }

    #[test]
    fn normalize_line_endings_and_controls() {
        let t = ScriptText::new("ا\r\nب\rج\tد\u{0000}ه");
        assert_eq!(t.as_str(), "ا\nب\nج ده");
        assert!(!t.as_str().contains('\r'));
    }

    #[test]
    fn normalize_is_idempotent() {
        let once = ScriptText::new("ا\r\nب\u{0627}\u{0653}");
        let twice = ScriptText::new(once.as_str());
        assert_eq!(once, twice);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify('\u{064E}'),
            CharClass::Tashkeel(TashkeelKind::Fatha)
        );
        assert_eq!(classify('\u{0640}'), CharClass::Tatweel);
        assert_eq!(classify('A'), CharClass::Other);
        assert_eq!(classify('\u{0661}'), CharClass::EasternDigit);
        assert_eq!(classify('7'), CharClass::WesternDigit);
        assert_eq!(classify('\u{060C}'), CharClass::Punctuation);
        assert_eq!(classify(' '), CharClass::Whitespace);
        assert_eq!(classify('ك'), CharClass::ArabicLetter);
        // Maddah-carrying alef is a letter, not a mark.
        assert_eq!(classify('\u{0622}'), CharClass::ArabicLetter);
    }

    #[test]
    fn tashkeel_kind_bijection() {
        let cps: Vec<char> = ('\u{064B}'..='\u{0652}').chain(['\u{0670}']).collect();
        assert_eq!(cps.len(), 9);
        for c in cps {
            let kind = TashkeelKind::from_char(c).expect("in range");
            assert_eq!(kind.to_char(), c);
        }
        assert_eq!(TashkeelKind::from_char('\u{0653}'), None);
        assert_eq!(TashkeelKind::from_char('\u{064A}'), None);
    }

    #[test]
    fn strip_tashkeel_basic() {
        let t = ScriptText::new("كَتَبَ");
        assert_eq!(t.strip_tashkeel().as_str(), "كتب");
        let plain = ScriptText::new("كتب");
        assert_eq!(plain.strip_tashkeel(), plain);
        assert_eq!(ScriptText::new("").strip_tashkeel().as_str(), "");
    }

    #[test]
    fn strip_tatweel_basic() {
        assert_eq!(ScriptText::new("كـتـب").strip_tatweel().as_str(), "كتب");
        let plain = ScriptText::new("كتب");
        assert_eq!(plain.strip_tatweel(), plain);
        assert_eq!(ScriptText::new("ـــ").strip_tatweel().as_str(), "");
    }

    #[test]
    fn stats_examples() {
        let s = ScriptText::new("كَتَبَ").stats();
        assert_eq!((s.letter_count, s.tashkeel_count), (3, 3));
        assert!((s.density - 1.0).abs() < f64::EPSILON);

        let s = ScriptText::new("كتب").stats();
        assert_eq!((s.letter_count, s.tashkeel_count), (3, 0));
        assert_eq!(s.density, 0.0);

        let s = ScriptText::new("").stats();
        assert_eq!((s.letter_count, s.tashkeel_count), (0, 0));
        assert_eq!(s.density, 0.0);
    }

    #[test]
    fn stats_ignores_non_arabic() {
        let s = ScriptText::new("abc 123 ٨٩").stats();
        assert_eq!(s.letter_count, 0);
        assert_eq!(s.tashkeel_count, 0);
    }
}
