//! Syllable grammars and tone notation for Jyutping and Pinyin.
//!
//! Legality is defined by membership: a base is legal iff it splits into an
//! onset and a final from the scheme's bundled inventory. The cross product
//! over-generates relative to real phonology (e.g. Pinyin "bue"), which is
//! deliberate — the inventories are data, validation is set membership, and
//! the exhaustive round-trip suite enumerates exactly that cross product.

use std::collections::BTreeSet;
use std::fmt;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Jyutping,
    Pinyin,
}

impl Scheme {
    pub fn max_tone(self) -> u8 {
        match self {
            Scheme::Jyutping => 6,
            Scheme::Pinyin => 5,
        }
    }

    /// Tone alphabet as a vector, for the tone model.
    pub fn tone_alphabet(self) -> Vec<u8> {
        (1..=self.max_tone()).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Jyutping => "jyutping",
            Scheme::Pinyin => "pinyin",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        match s.trim().to_lowercase().as_str() {
            "jyutping" => Some(Scheme::Jyutping),
            "pinyin" => Some(Scheme::Pinyin),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderStyle {
    Numeric,
    /// Pinyin only.
    Diacritic,
    Toneless,
}

/// A validated syllable. `base` is lowercase and digit-free; Pinyin bases
/// store ü as 'ü' (the 'v' substitution is a numeric-notation surface form).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub base: String,
    pub tone: u8,
    pub scheme: Scheme,
}

impl Syllable {
    pub fn new(base: &str, tone: u8, scheme: Scheme) -> Result<Syllable, SyllableError> {
        if tone == 0 || tone > scheme.max_tone() {
            return Err(SyllableError::ToneOutOfRange { scheme, tone });
        }
        let base = normalise_base(base, scheme);
        if !is_legal_base(&base, scheme) {
            return Err(SyllableError::IllegalBase { scheme, base });
        }
        Ok(Syllable { base, tone, scheme })
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.base, self.tone)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyllableError {
    #[error("empty syllable")]
    Empty,
    #[error("missing tone digit in `{0}`")]
    MissingTone(String),
    #[error("tone {tone} out of range for {scheme}")]
    ToneOutOfRange { scheme: Scheme, tone: u8 },
    #[error("illegal syllable `{base}` for {scheme}")]
    IllegalBase { scheme: Scheme, base: String },
    #[error("multiple tone marks in `{0}`")]
    MultipleToneMarks(String),
    #[error("diacritic rendering is unsupported for {0}")]
    UnsupportedStyle(Scheme),
    #[error("syllable {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<SyllableError>,
    },
}

struct Grammar {
    onsets: BTreeSet<String>,
    finals: BTreeSet<String>,
    max_onset: usize,
    max_final: usize,
}

impl Grammar {
    fn from_table(src: &str) -> Grammar {
        let mut onsets = BTreeSet::new();
        let mut finals = BTreeSet::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let kind = cols.next().unwrap_or("");
            let value = cols.next().unwrap_or("");
            match kind {
                "onset" => onsets.insert(value.to_string()),
                "final" => finals.insert(value.to_string()),
                other => panic!("syllable table line {}: unknown kind `{other}`", i + 1),
            };
        }
        let max_onset = onsets.iter().map(|s| s.len()).max().unwrap_or(0);
        let max_final = finals.iter().map(|s| s.len()).max().unwrap_or(0);
        Grammar { onsets, finals, max_onset, max_final }
    }

    fn is_legal(&self, base: &str) -> bool {
        if base.is_empty() {
            return false;
        }
        // Zero-length onset first, then every onset prefix length. Onsets are
        // ASCII so byte slicing is safe whenever get() succeeds.
        if self.finals.contains(base) {
            return true;
        }
        for k in 1..=self.max_onset.min(base.len().saturating_sub(1)) {
            if let (Some(prefix), Some(rest)) = (base.get(..k), base.get(k..)) {
                if self.onsets.contains(prefix) && self.finals.contains(rest) {
                    return true;
                }
            }
        }
        false
    }

    fn max_base_len(&self) -> usize {
        self.max_onset + self.max_final
    }
}

static JYUTPING_GRAMMAR: Lazy<Grammar> =
    Lazy::new(|| Grammar::from_table(include_str!("../data/jyutping_syllables.tsv")));
static PINYIN_GRAMMAR: Lazy<Grammar> =
    Lazy::new(|| Grammar::from_table(include_str!("../data/pinyin_syllables.tsv")));

fn grammar(scheme: Scheme) -> &'static Grammar {
    match scheme {
        Scheme::Jyutping => &JYUTPING_GRAMMAR,
        Scheme::Pinyin => &PINYIN_GRAMMAR,
    }
}

static JYUTPING_BASES: Lazy<BTreeSet<String>> = Lazy::new(|| cross_product(&JYUTPING_GRAMMAR));
static PINYIN_BASES: Lazy<BTreeSet<String>> = Lazy::new(|| cross_product(&PINYIN_GRAMMAR));

fn cross_product(g: &Grammar) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in &g.finals {
        out.insert(f.clone());
        for o in &g.onsets {
            out.insert(format!("{o}{f}"));
        }
    }
    out
}

/// Every base the grammar admits (onset × final cross product).
pub fn legal_bases(scheme: Scheme) -> &'static BTreeSet<String> {
    match scheme {
        Scheme::Jyutping => &JYUTPING_BASES,
        Scheme::Pinyin => &PINYIN_BASES,
    }
}

pub fn is_legal_base(base: &str, scheme: Scheme) -> bool {
    grammar(scheme).is_legal(base)
}

/// Pinyin keyboards write ü as "v" or "u:"; the internal form is 'ü'.
fn normalise_base(base: &str, scheme: Scheme) -> String {
    match scheme {
        Scheme::Jyutping => base.to_string(),
        Scheme::Pinyin => base.replace("u:", "ü").replace('v', "ü"),
    }
}

const TONED_VOWELS: [(char, char, u8); 24] = [
    ('ā', 'a', 1), ('á', 'a', 2), ('ǎ', 'a', 3), ('à', 'a', 4),
    ('ē', 'e', 1), ('é', 'e', 2), ('ě', 'e', 3), ('è', 'e', 4),
    ('ī', 'i', 1), ('í', 'i', 2), ('ǐ', 'i', 3), ('ì', 'i', 4),
    ('ō', 'o', 1), ('ó', 'o', 2), ('ǒ', 'o', 3), ('ò', 'o', 4),
    ('ū', 'u', 1), ('ú', 'u', 2), ('ǔ', 'u', 3), ('ù', 'u', 4),
    ('ǖ', 'ü', 1), ('ǘ', 'ü', 2), ('ǚ', 'ü', 3), ('ǜ', 'ü', 4),
];

fn untone_char(c: char) -> Option<(char, u8)> {
    TONED_VOWELS
        .iter()
        .find(|(marked, _, _)| *marked == c)
        .map(|&(_, plain, tone)| (plain, tone))
}

fn toned_char(plain: char, tone: u8) -> char {
    TONED_VOWELS
        .iter()
        .find(|&&(_, p, t)| p == plain && t == tone)
        .map(|&(marked, _, _)| marked)
        .unwrap_or(plain)
}

pub fn parse_syllable(text: &str, scheme: Scheme) -> Result<Syllable, SyllableError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(SyllableError::Empty);
    }
    let lower = trimmed.to_lowercase();
    let last = lower.chars().last().unwrap();
    if last.is_ascii_digit() {
        let tone = last as u8 - b'0';
        if tone == 0 || tone > scheme.max_tone() {
            return Err(SyllableError::ToneOutOfRange { scheme, tone });
        }
        let base = &lower[..lower.len() - 1];
        return Syllable::new(base, tone, scheme);
    }
    match scheme {
        Scheme::Jyutping => Err(SyllableError::MissingTone(trimmed.to_string())),
        Scheme::Pinyin => {
            let mut tone: Option<u8> = None;
            let mut base = String::new();
            for c in lower.chars() {
                match untone_char(c) {
                    Some((plain, t)) => {
                        if tone.is_some() {
                            return Err(SyllableError::MultipleToneMarks(trimmed.to_string()));
                        }
                        tone = Some(t);
                        base.push(plain);
                    }
                    None => base.push(c),
                }
            }
            Syllable::new(&base, tone.unwrap_or(5), Scheme::Pinyin)
        }
    }
}

/// Diacritic placement: first vowel in priority a > o > e; in "iu" mark the
/// u, in "ui" the i; otherwise the last vowel.
fn mark_position(chars: &[char]) -> Option<usize> {
    for target in ['a', 'o', 'e'] {
        if let Some(i) = chars.iter().position(|&c| c == target) {
            return Some(i);
        }
    }
    for i in 0..chars.len().saturating_sub(1) {
        if (chars[i] == 'i' && chars[i + 1] == 'u') || (chars[i] == 'u' && chars[i + 1] == 'i') {
            return Some(i + 1);
        }
    }
    chars.iter().rposition(|&c| matches!(c, 'i' | 'u' | 'ü'))
}

pub fn render_syllable(syl: &Syllable, style: RenderStyle) -> Result<String, SyllableError> {
    match style {
        RenderStyle::Numeric => {
            let base = match syl.scheme {
                Scheme::Jyutping => syl.base.clone(),
                Scheme::Pinyin => syl.base.replace('ü', "v"),
            };
            Ok(format!("{base}{}", syl.tone))
        }
        RenderStyle::Toneless => Ok(syl.base.clone()),
        RenderStyle::Diacritic => {
            if syl.scheme == Scheme::Jyutping {
                return Err(SyllableError::UnsupportedStyle(Scheme::Jyutping));
            }
            if syl.tone == 5 {
                return Ok(syl.base.clone());
            }
            let mut chars: Vec<char> = syl.base.chars().collect();
            let pos = mark_position(&chars).expect("legal pinyin base has a vowel");
            chars[pos] = toned_char(chars[pos], syl.tone);
            Ok(chars.into_iter().collect())
        }
    }
}

/// Toneless projection of a single syllable: just the base.
pub fn strip_tone(syl: &Syllable) -> String {
    syl.base.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToneDirection {
    DiacriticToNumeric,
    NumericToDiacritic,
}

/// Convert a whitespace-separated Pinyin syllable sequence between tone
/// notations. Errors carry the 0-based syllable index.
pub fn convert_tone_notation(text: &str, direction: ToneDirection) -> Result<String, SyllableError> {
    let style = match direction {
        ToneDirection::DiacriticToNumeric => RenderStyle::Numeric,
        ToneDirection::NumericToDiacritic => RenderStyle::Diacritic,
    };
    let mut out = Vec::new();
    for (index, tok) in text.split_whitespace().enumerate() {
        let converted = parse_syllable(tok, Scheme::Pinyin)
            .and_then(|syl| render_syllable(&syl, style))
            .map_err(|e| SyllableError::AtIndex { index, source: Box::new(e) })?;
        out.push(converted);
    }
    Ok(out.join(" "))
}

/// Split a concatenated toneless string into legal bases, longest-first with
/// backtracking. None if no complete split exists.
pub fn split_toneless(text: &str, scheme: Scheme) -> Option<Vec<String>> {
    let g = grammar(scheme);
    let lower = text.to_lowercase();
    fn go(g: &Grammar, s: &str, acc: &mut Vec<String>) -> bool {
        if s.is_empty() {
            return true;
        }
        let limit = g.max_base_len().min(s.len());
        for k in (1..=limit).rev() {
            if let Some(prefix) = s.get(..k) {
                if g.is_legal(prefix) {
                    acc.push(prefix.to_string());
                    if go(g, &s[k..], acc) {
                        return true;
                    }
                    acc.pop();
                }
            }
        }
        false
    }
    let mut acc = Vec::new();
    if go(g, &lower, &mut acc) {
        Some(acc)
    } else {
        None
    }
}
