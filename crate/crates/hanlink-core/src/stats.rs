//! Corpus-level measurements: unique-value counts per field and scheme with
//! loss/addition percentages, tone-combination distributions, top-k
//! coverage, and a log-log Zipf fit.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::cmp::Reverse;

use thiserror::Error;

use crate::corpusio::ProcessedRecord;
use crate::prondict::{Dictionary, NameContext};
use crate::romanise::{romanise_name, HkgVariantTable, NameScheme, SchemeRendering};
use crate::syllable::Scheme;

/// Column axis of the field-comparison grid: the raw character strings plus
/// each romanised rendering. `Pinyin` is the numeric-tone rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StatScheme {
    Chinese,
    Jyutping,
    Pinyin,
    PinyinNoTone,
    Hkg,
}

impl StatScheme {
    pub const ALL: [StatScheme; 5] = [
        StatScheme::Chinese,
        StatScheme::Jyutping,
        StatScheme::Pinyin,
        StatScheme::PinyinNoTone,
        StatScheme::Hkg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatScheme::Chinese => "chinese",
            StatScheme::Jyutping => "jyutping",
            StatScheme::Pinyin => "pinyin",
            StatScheme::PinyinNoTone => "pinyin_notone",
            StatScheme::Hkg => "hkg",
        }
    }

    pub fn from_name(s: &str) -> Option<StatScheme> {
        match s.to_lowercase().as_str() {
            "chinese" => Some(StatScheme::Chinese),
            "jyutping" => Some(StatScheme::Jyutping),
            "pinyin" => Some(StatScheme::Pinyin),
            "pinyin_notone" | "pinyin_toneless" => Some(StatScheme::PinyinNoTone),
            "hkg" => Some(StatScheme::Hkg),
            _ => None,
        }
    }

    pub fn rendering(self) -> Option<SchemeRendering> {
        match self {
            StatScheme::Chinese => None,
            StatScheme::Jyutping => Some(SchemeRendering::Jyutping),
            StatScheme::Pinyin => Some(SchemeRendering::PinyinNumeric),
            StatScheme::PinyinNoTone => Some(SchemeRendering::PinyinNoTone),
            StatScheme::Hkg => Some(SchemeRendering::Hkg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NamePart {
    Surname,
    Forename,
    FullName,
}

impl NamePart {
    pub const ALL: [NamePart; 3] = [NamePart::Surname, NamePart::Forename, NamePart::FullName];

    pub fn name(self) -> &'static str {
        match self {
            NamePart::Surname => "surname",
            NamePart::Forename => "forename",
            NamePart::FullName => "fullname",
        }
    }

    pub fn from_name(s: &str) -> Option<NamePart> {
        match s.to_lowercase().as_str() {
            "surname" => Some(NamePart::Surname),
            "forename" => Some(NamePart::Forename),
            "fullname" | "full_name" | "full" => Some(NamePart::FullName),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FieldCount {
    pub unique: usize,
    /// Records that could not be rendered under the scheme and were left out
    /// of the tally.
    pub excluded: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("{0} is not a tonal scheme")]
    NonTonal(&'static str),
    #[error("undefined baseline: Chinese unique count is 0")]
    UndefinedBaseline,
    #[error("empty frequency distribution")]
    EmptyFrequency,
    #[error("too few points: Zipf fit needs ≥3 keys with count ≥2, got {0}")]
    TooFewPoints(usize),
}

/// The string a record contributes to the (scheme, part) cell, or None when
/// the record cannot be rendered (no segmented name, or a character misses
/// the scheme). Spacing follows each scheme's display convention, so Pinyin
/// forenames are concatenated exactly as printed.
pub fn field_value(
    record: &ProcessedRecord,
    dict: &Dictionary,
    table: &HkgVariantTable,
    scheme: StatScheme,
    part: NamePart,
) -> Option<String> {
    let name = record.name.as_ref()?;
    match scheme.rendering() {
        None => Some(match part {
            NamePart::Surname => name.surname.clone(),
            NamePart::Forename => name.forename.clone(),
            NamePart::FullName => name.full(),
        }),
        Some(rendering) => {
            let rn = romanise_name(name, dict, table, rendering).ok()?;
            Some(match (part, rendering.scheme()) {
                (NamePart::FullName, _) => rn.joined(false),
                (NamePart::Surname, NameScheme::Pinyin) => rn.surname.concat(),
                (NamePart::Forename, NameScheme::Pinyin) => rn.forename.concat(),
                (NamePart::Surname, _) => rn.surname.join(" "),
                (NamePart::Forename, _) => rn.forename.join(" "),
            })
        }
    }
}

pub fn unique_counts(
    records: &[ProcessedRecord],
    dict: &Dictionary,
    table: &HkgVariantTable,
    scheme: StatScheme,
    part: NamePart,
) -> FieldCount {
    let mut seen = BTreeSet::new();
    let mut excluded = 0;
    for r in records {
        match field_value(r, dict, table, scheme, part) {
            Some(v) => {
                seen.insert(v);
            }
            None => excluded += 1,
        }
    }
    FieldCount { unique: seen.len(), excluded }
}

/// Signed percentage change of a romanised count against the Chinese
/// baseline. Full precision; round only for display.
pub fn delta_pct(roman_count: usize, chinese_count: usize) -> Result<f64, StatsError> {
    if chinese_count == 0 {
        return Err(StatsError::UndefinedBaseline);
    }
    Ok((roman_count as f64 - chinese_count as f64) / chinese_count as f64 * 100.0)
}

/// One decimal place with an explicit sign; an exact zero after rounding is
/// unsigned.
pub fn format_delta_pct(delta: f64) -> String {
    let rounded = (delta * 10.0).round() / 10.0;
    if rounded == 0.0 {
        "0.0%".to_string()
    } else {
        format!("{rounded:+.1}%")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CellStat {
    pub unique: usize,
    pub excluded: usize,
    /// None for the Chinese baseline column.
    pub delta_pct: Option<f64>,
}

/// The full field-by-scheme grid (three parts × five schemes).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusStats {
    pub cells: BTreeMap<(NamePart, StatScheme), CellStat>,
    pub records: usize,
}

pub fn compute_corpus_stats(
    records: &[ProcessedRecord],
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Result<CorpusStats, StatsError> {
    let mut stats = CorpusStats { records: records.len(), ..Default::default() };
    for part in NamePart::ALL {
        let base = unique_counts(records, dict, table, StatScheme::Chinese, part);
        for scheme in StatScheme::ALL {
            let fc = if scheme == StatScheme::Chinese {
                base
            } else {
                unique_counts(records, dict, table, scheme, part)
            };
            let delta = if scheme == StatScheme::Chinese {
                None
            } else {
                Some(delta_pct(fc.unique, base.unique)?)
            };
            stats.cells.insert(
                (part, scheme),
                CellStat { unique: fc.unique, excluded: fc.excluded, delta_pct: delta },
            );
        }
    }
    Ok(stats)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToneComboFrequency {
    pub scheme: Scheme,
    pub counts: BTreeMap<Vec<u8>, u64>,
    pub total: u64,
}

impl ToneComboFrequency {
    /// Display order: count descending, then tone sequence ascending.
    pub fn ranked(&self) -> Vec<(&Vec<u8>, u64)> {
        let mut v: Vec<(&Vec<u8>, u64)> = self.counts.iter().map(|(k, &c)| (k, c)).collect();
        v.sort_by_key(|&(k, c)| (Reverse(c), k.clone()));
        v
    }
}

/// Tone sequence of a name under a tonal scheme: primary readings, surname
/// context on the surname characters. None when any character lacks a
/// reading.
pub fn tone_sequence(name: &crate::namekit::HanName, dict: &Dictionary, tonal: Scheme) -> Option<Vec<u8>> {
    let mut tones = Vec::with_capacity(name.char_count());
    for (ch, ctx) in name
        .surname
        .chars()
        .map(|c| (c, NameContext::Surname))
        .chain(name.forename.chars().map(|c| (c, NameContext::Forename)))
    {
        tones.push(dict.primary_reading(ch, tonal, ctx).ok()?.syllable.tone);
    }
    Some(tones)
}

/// Full-name tone sequences over the corpus, optionally restricted to names
/// with a given character count.
pub fn tone_combo_distribution(
    records: &[ProcessedRecord],
    dict: &Dictionary,
    scheme: StatScheme,
    name_length_filter: Option<usize>,
) -> Result<ToneComboFrequency, StatsError> {
    let tonal = match scheme {
        StatScheme::Jyutping => Scheme::Jyutping,
        StatScheme::Pinyin => Scheme::Pinyin,
        other => return Err(StatsError::NonTonal(other.name())),
    };
    let mut freq =
        ToneComboFrequency { scheme: tonal, counts: BTreeMap::new(), total: 0 };
    for r in records {
        let Some(name) = &r.name else { continue };
        if let Some(len) = name_length_filter {
            if name.char_count() != len {
                continue;
            }
        }
        if let Some(tones) = tone_sequence(name, dict, tonal) {
            *freq.counts.entry(tones).or_insert(0) += 1;
            freq.total += 1;
        }
    }
    Ok(freq)
}

/// Share of the corpus covered by the k most common combinations.
pub fn topk_coverage(freq: &ToneComboFrequency, k: usize) -> Result<f64, StatsError> {
    if freq.counts.is_empty() || freq.total == 0 {
        return Err(StatsError::EmptyFrequency);
    }
    let covered: u64 = freq.ranked().iter().take(k).map(|&(_, c)| c).sum();
    Ok(covered as f64 / freq.total as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZipfFit {
    pub exponent: f64,
    /// Coefficient of determination of the log-log regression. A perfectly
    /// uniform distribution fits a flat line exactly: goodness 1, exponent 0.
    pub goodness: f64,
    pub points: usize,
}

/// Least-squares fit of log(count) against log(rank), over keys with count
/// ≥ 2 (the singleton tail is noise). Rank order follows `ranked()`.
pub fn zipf_fit(freq: &ToneComboFrequency) -> Result<ZipfFit, StatsError> {
    let counts: Vec<u64> =
        freq.ranked().iter().map(|&(_, c)| c).filter(|&c| c >= 2).collect();
    zipf_fit_counts(&counts)
}

/// The same fit over a pre-ranked count vector (descending).
pub fn zipf_fit_counts(counts: &[u64]) -> Result<ZipfFit, StatsError> {
    let counts: Vec<u64> = counts.iter().copied().filter(|&c| c >= 2).collect();
    if counts.len() < 3 {
        return Err(StatsError::TooFewPoints(counts.len()));
    }
    let n = counts.len() as f64;
    let xs: Vec<f64> = (1..=counts.len()).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if syy == 0.0 {
        return Ok(ZipfFit { exponent: 0.0, goodness: 1.0, points: counts.len() });
    }
    let slope = sxy / sxx;
    Ok(ZipfFit { exponent: -slope, goodness: (sxy * sxy) / (sxx * syy), points: counts.len() })
}
