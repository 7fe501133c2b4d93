//! Pronunciation dictionary: per-character Jyutping/Pinyin readings, the
//! surname segmentation table, and Traditional/Simplified variant pairs.
//!
//! Two on-disk formats are understood: the native tabular format
//! (`character \t scheme \t base \t tone \t rank \t surname_flag`, `#`
//! comments) and CC-Canto lines (`trad simp [pinyin] {jyutping} /defs/`).
//! Surname and variant tables ride in sibling files `surnames.tsv` /
//! `variants.tsv` because the six-column reading format has no row type for
//! them.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::syllable::{Scheme, Syllable};

pub const MAX_SURNAME_CHARS: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reading {
    pub syllable: Syllable,
    pub rank: u32,
    pub surname_reading: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameContext {
    Surname,
    Forename,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DictFormat {
    Tabular,
    CcCanto,
}

/// Which side of a Traditional/Simplified pair a character sits on. Shared
/// covers characters written identically in both scripts (or unknown ones).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharScript {
    TraditionalOnly,
    SimplifiedOnly,
    Shared,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct PerScheme {
    jyutping: Vec<Reading>,
    pinyin: Vec<Reading>,
}

impl PerScheme {
    fn get(&self, scheme: Scheme) -> &Vec<Reading> {
        match scheme {
            Scheme::Jyutping => &self.jyutping,
            Scheme::Pinyin => &self.pinyin,
        }
    }
    fn get_mut(&mut self, scheme: Scheme) -> &mut Vec<Reading> {
        match scheme {
            Scheme::Jyutping => &mut self.jyutping,
            Scheme::Pinyin => &mut self.pinyin,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    entries: BTreeMap<char, PerScheme>,
    surname_table: BTreeSet<String>,
    // both directions; a char maps to its other-script twin
    variant_pairs: BTreeMap<char, char>,
    trad_side: BTreeSet<char>,
    simp_side: BTreeSet<char>,
}

#[derive(Debug, Error)]
pub enum DictError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg} in `{text}`")]
    Malformed { file: String, line: usize, msg: String, text: String },
    #[error("empty dictionary: {0}")]
    Empty(String),
    #[error("no reading for `{ch}` under {scheme}")]
    NoReading { ch: char, scheme: Scheme },
}

fn malformed(file: &str, line: usize, msg: impl fmt::Display, text: &str) -> DictError {
    DictError::Malformed { file: file.to_string(), line, msg: msg.to_string(), text: text.to_string() }
}

static BUNDLED: Lazy<Dictionary> = Lazy::new(|| {
    let mut dict = Dictionary::from_tabular_str(include_str!("../data/dictionary.tsv"), "dictionary.tsv")
        .expect("bundled dictionary is valid");
    dict.load_variants_str(include_str!("../data/variants.tsv"), "variants.tsv")
        .expect("bundled variant table is valid");
    dict.load_surnames_str(include_str!("../data/surnames.tsv"), "surnames.tsv")
        .expect("bundled surname table is valid");
    dict.finish().expect("bundled data satisfies dictionary invariants");
    dict
});

impl Dictionary {
    /// The dictionary shipped in the binary: ~200 characters covering the
    /// bundled corpus, surname table, and variant pairs.
    pub fn bundled() -> &'static Dictionary {
        &BUNDLED
    }

    /// Load a dictionary file. In tabular format, sibling files
    /// `surnames.tsv` and `variants.tsv` are picked up when present.
    pub fn load(path: &Path, format: DictFormat) -> Result<Dictionary, DictError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|source| DictError::Io { path: p.display().to_string(), source })
        };
        let src = read(path)?;
        let name = path.display().to_string();
        let mut dict = match format {
            DictFormat::Tabular => Dictionary::from_tabular_str(&src, &name)?,
            DictFormat::CcCanto => Dictionary::from_cc_canto_str(&src, &name)?,
        };
        if format == DictFormat::Tabular {
            if let Some(dir) = path.parent() {
                let variants = dir.join("variants.tsv");
                if variants.is_file() {
                    dict.load_variants_str(&read(&variants)?, &variants.display().to_string())?;
                }
                let surnames = dir.join("surnames.tsv");
                if surnames.is_file() {
                    dict.load_surnames_str(&read(&surnames)?, &surnames.display().to_string())?;
                }
            }
        }
        dict.finish()?;
        Ok(dict)
    }

    pub fn from_tabular_str(src: &str, file: &str) -> Result<Dictionary, DictError> {
        let mut dict = Dictionary::default();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 6 {
                return Err(malformed(file, i + 1, format!("expected 6 columns, got {}", cols.len()), raw));
            }
            let mut chars = cols[0].chars();
            let ch = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(malformed(file, i + 1, "character column must hold one character", raw)),
            };
            let scheme = Scheme::from_name(cols[1])
                .ok_or_else(|| malformed(file, i + 1, format!("unknown scheme `{}`", cols[1]), raw))?;
            let tone: u8 = cols[3]
                .parse()
                .map_err(|_| malformed(file, i + 1, "tone must be an integer", raw))?;
            let rank: u32 = cols[4]
                .parse()
                .map_err(|_| malformed(file, i + 1, "rank must be an integer", raw))?;
            if rank == 0 {
                return Err(malformed(file, i + 1, "rank starts at 1", raw));
            }
            let surname_reading = match cols[5] {
                "0" => false,
                "1" => true,
                other => return Err(malformed(file, i + 1, format!("surname_flag `{other}` not 0/1"), raw)),
            };
            let syllable = Syllable::new(cols[2], tone, scheme)
                .map_err(|e| malformed(file, i + 1, e, raw))?;
            dict.entries
                .entry(ch)
                .or_default()
                .get_mut(scheme)
                .push(Reading { syllable, rank, surname_reading });
        }
        if dict.entries.is_empty() {
            return Err(DictError::Empty(file.to_string()));
        }
        dict.sort_and_check_ranks(file)?;
        Ok(dict)
    }

    /// CC-Canto lines: `trad simp [pinyin] {jyutping} /definitions/`. Only
    /// single-character entries are kept; rank follows file order; a
    /// traditional/simplified difference records a variant pair.
    pub fn from_cc_canto_str(src: &str, file: &str) -> Result<Dictionary, DictError> {
        let mut dict = Dictionary::default();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (trad, simp) = match (parts.next(), parts.next()) {
                (Some(t), Some(s)) => (t, s),
                _ => return Err(malformed(file, i + 1, "expected `trad simp [...] {...}`", raw)),
            };
            let (t_chars, s_chars): (Vec<char>, Vec<char>) = (trad.chars().collect(), simp.chars().collect());
            if t_chars.len() != 1 || s_chars.len() != 1 {
                continue; // multi-character word; out of scope
            }
            let (tc, sc) = (t_chars[0], s_chars[0]);
            let pinyin = extract_delimited(line, '[', ']')
                .ok_or_else(|| malformed(file, i + 1, "missing [pinyin] field", raw))?;
            let jyutping = extract_delimited(line, '{', '}');
            let mut push = |ch: char, scheme: Scheme, token: &str| -> Result<(), DictError> {
                let syl = crate::syllable::parse_syllable(token, scheme)
                    .map_err(|e| malformed(file, i + 1, e, raw))?;
                let list = dict.entries.entry(ch).or_default().get_mut(scheme);
                if !list.iter().any(|r| r.syllable == syl) {
                    let rank = list.len() as u32 + 1;
                    list.push(Reading { syllable: syl, rank, surname_reading: false });
                }
                Ok(())
            };
            for tok in pinyin.split_whitespace() {
                push(tc, Scheme::Pinyin, tok)?;
            }
            if let Some(jp) = &jyutping {
                for tok in jp.split_whitespace() {
                    push(tc, Scheme::Jyutping, tok)?;
                }
            }
            if tc != sc {
                dict.variant_pairs.insert(tc, sc);
                dict.variant_pairs.insert(sc, tc);
                dict.trad_side.insert(tc);
                dict.simp_side.insert(sc);
            }
        }
        if dict.entries.is_empty() {
            return Err(DictError::Empty(file.to_string()));
        }
        Ok(dict)
    }

    pub fn load_variants_str(&mut self, src: &str, file: &str) -> Result<(), DictError> {
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(malformed(file, i + 1, "expected `trad\\tsimp`", raw));
            }
            let one = |s: &str| -> Option<char> {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Some(c),
                    _ => None,
                }
            };
            let (t, s) = match (one(cols[0]), one(cols[1])) {
                (Some(t), Some(s)) => (t, s),
                _ => return Err(malformed(file, i + 1, "variant columns must hold one character each", raw)),
            };
            if t == s {
                return Err(malformed(file, i + 1, "variant pair maps a character to itself", raw));
            }
            self.variant_pairs.insert(t, s);
            self.variant_pairs.insert(s, t);
            self.trad_side.insert(t);
            self.simp_side.insert(s);
        }
        Ok(())
    }

    pub fn load_surnames_str(&mut self, src: &str, file: &str) -> Result<(), DictError> {
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let n = line.chars().count();
            if n == 0 || n > MAX_SURNAME_CHARS {
                return Err(malformed(file, i + 1, format!("surname length {n} outside 1..={MAX_SURNAME_CHARS}"), raw));
            }
            self.surname_table.insert(line.to_string());
        }
        Ok(())
    }

    /// Propagate variant pairs (shared reading lists, both-script surname
    /// forms) and check invariants. Call after all sources are loaded.
    pub fn finish(&mut self) -> Result<(), DictError> {
        // Union reading lists across each pair; the traditional side's ranks
        // win on conflict, extra readings from the twin re-rank after.
        let pairs: Vec<(char, char)> = self
            .variant_pairs
            .iter()
            .filter(|(c, _)| self.trad_side.contains(c))
            .map(|(&t, &s)| (t, s))
            .collect();
        for (t, s) in pairs {
            for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
                let t_list = self.entries.get(&t).map(|p| p.get(scheme).clone()).unwrap_or_default();
                let s_list = self.entries.get(&s).map(|p| p.get(scheme).clone()).unwrap_or_default();
                let mut merged = t_list;
                for r in s_list {
                    if !merged.iter().any(|m| m.syllable == r.syllable) {
                        merged.push(r);
                    }
                }
                for (i, r) in merged.iter_mut().enumerate() {
                    r.rank = i as u32 + 1;
                }
                if merged.is_empty() {
                    continue;
                }
                *self.entries.entry(t).or_default().get_mut(scheme) = merged.clone();
                *self.entries.entry(s).or_default().get_mut(scheme) = merged;
            }
        }
        // Surname strings in the other script.
        let converted: Vec<String> = self
            .surname_table
            .iter()
            .map(|s| s.chars().map(|c| self.variant_pairs.get(&c).copied().unwrap_or(c)).collect())
            .collect();
        self.surname_table.extend(converted);
        Ok(())
    }

    fn sort_and_check_ranks(&mut self, file: &str) -> Result<(), DictError> {
        for (ch, per) in &mut self.entries {
            for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
                let list = per.get_mut(scheme);
                list.sort_by_key(|r| r.rank);
                for (i, r) in list.iter().enumerate() {
                    if r.rank != i as u32 + 1 {
                        return Err(DictError::Malformed {
                            file: file.to_string(),
                            line: 0,
                            msg: format!("ranks for `{ch}`/{scheme} are not consecutive from 1"),
                            text: ch.to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lookup(&self, ch: char, scheme: Scheme) -> &[Reading] {
        self.entries.get(&ch).map(|p| p.get(scheme).as_slice()).unwrap_or(&[])
    }

    pub fn primary_reading(&self, ch: char, scheme: Scheme, context: NameContext) -> Result<&Reading, DictError> {
        let readings = self.lookup(ch, scheme);
        if readings.is_empty() {
            return Err(DictError::NoReading { ch, scheme });
        }
        if context == NameContext::Surname {
            if let Some(r) = readings.iter().find(|r| r.surname_reading) {
                return Ok(r);
            }
        }
        Ok(&readings[0])
    }

    /// Manual-correction overlay: `overrides` replaces readings per
    /// (character, scheme); its surname and variant rows are unioned in.
    pub fn merge(&self, overrides: &Dictionary) -> Dictionary {
        let mut out = self.clone();
        for (ch, per) in &overrides.entries {
            for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
                let list = per.get(scheme);
                if !list.is_empty() {
                    *out.entries.entry(*ch).or_default().get_mut(scheme) = list.clone();
                }
            }
        }
        out.surname_table.extend(overrides.surname_table.iter().cloned());
        for (&a, &b) in &overrides.variant_pairs {
            out.variant_pairs.insert(a, b);
        }
        out.trad_side.extend(overrides.trad_side.iter().copied());
        out.simp_side.extend(overrides.simp_side.iter().copied());
        out
    }

    pub fn surnames(&self) -> &BTreeSet<String> {
        &self.surname_table
    }

    pub fn is_surname(&self, s: &str) -> bool {
        self.surname_table.contains(s)
    }

    pub fn max_surname_len(&self) -> usize {
        self.surname_table.iter().map(|s| s.chars().count()).max().unwrap_or(0)
    }

    pub fn variant_of(&self, ch: char) -> Option<char> {
        self.variant_pairs.get(&ch).copied()
    }

    pub fn char_script(&self, ch: char) -> CharScript {
        match (self.trad_side.contains(&ch), self.simp_side.contains(&ch)) {
            (true, false) => CharScript::TraditionalOnly,
            (false, true) => CharScript::SimplifiedOnly,
            _ => CharScript::Shared,
        }
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn extract_delimited(line: &str, open: char, close: char) -> Option<String> {
    let start = line.find(open)? + open.len_utf8();
    let end = line[start..].find(close)? + start;
    Some(line[start..end].to_string())
}
