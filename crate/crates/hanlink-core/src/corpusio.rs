//! Corpus plumbing: read name lists from CSV/TSV, clean the raw fields,
//! classify each record's origin and forename composition, derive per-scheme
//! renderings, and export everything reproducibly (re-ingesting an export
//! and exporting again is byte-identical).

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::namekit::{detect_order, segment_full_name, HanName, NameOrder};
use crate::prondict::Dictionary;
use crate::romanise::{
    romanise_name, surname_romanisations, token_is_romanised, HkgVariantTable, SchemeRendering,
};
use crate::syllable::{is_legal_base, split_toneless, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Tsv,
}

impl CorpusFormat {
    fn delimiter(self) -> u8 {
        match self {
            CorpusFormat::Csv => b',',
            CorpusFormat::Tsv => b'\t',
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawRecord {
    pub record_id: String,
    pub chinese_name: String,
    pub english_name: String,
    pub extras: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default)]
pub struct Ingested {
    pub records: Vec<RawRecord>,
    pub warnings: Vec<String>,
    pub rows_read: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Origin {
    Cantonese,
    Mandarin,
    Unknown,
}

impl Origin {
    pub fn name(self) -> &'static str {
        match self {
            Origin::Cantonese => "cantonese",
            Origin::Mandarin => "mandarin",
            Origin::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ForenameKind {
    RomanisedOnly,
    EnglishOnly,
    Mixed,
}

impl ForenameKind {
    pub fn name(self) -> &'static str {
        match self {
            ForenameKind::RomanisedOnly => "romanised_only",
            ForenameKind::EnglishOnly => "english_only",
            ForenameKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for ForenameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessedRecord {
    pub record_id: String,
    pub chinese_name: String,
    pub english_name: String,
    pub extras: BTreeMap<String, String>,
    pub name: Option<HanName>,
    pub surname_matched: bool,
    pub origin: Origin,
    pub forename_kind: ForenameKind,
    /// Rendering name → joined lowercase rendering of the full name.
    pub renderings: BTreeMap<String, String>,
    /// English forename tokens (lowercased) after the surname part is
    /// removed; the evidence used by the classifiers.
    pub forename_tokens: Vec<String>,
    pub warnings: Vec<String>,
    pub unprocessable: bool,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: missing required column `{column}`")]
    MissingColumn { file: String, column: String },
    #[error("{file}: {msg}")]
    Parse { file: String, msg: String },
}

pub fn bundled_corpus_csv() -> &'static str {
    include_str!("../data/corpus_100.csv")
}

pub fn ingest(path: &Path, format: CorpusFormat) -> Result<Ingested, CorpusError> {
    let src = fs::read_to_string(path)
        .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    ingest_str(&src, &path.display().to_string(), format)
}

pub fn ingest_str(src: &str, file: &str, format: CorpusFormat) -> Result<Ingested, CorpusError> {
    let src = src.strip_prefix('\u{FEFF}').unwrap_or(src);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .trim(csv::Trim::All)
        .from_reader(src.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Parse { file: file.to_string(), msg: e.to_string() })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let chinese_idx = col("chinese_name").ok_or_else(|| CorpusError::MissingColumn {
        file: file.to_string(),
        column: "chinese_name".to_string(),
    })?;
    let english_idx = col("english_name").ok_or_else(|| CorpusError::MissingColumn {
        file: file.to_string(),
        column: "english_name".to_string(),
    })?;
    let id_idx = col("record_id");

    let mut out = Ingested::default();
    let mut seen_ids = BTreeSet::new();
    for (i, row) in reader.records().enumerate() {
        let file_row = i + 2; // 1-based, after the header
        out.rows_read += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.warnings.push(format!("row {file_row} skipped: {e}"));
                continue;
            }
        };
        let field = |idx: usize| row.get(idx).unwrap_or("").to_string();
        let record_id = match id_idx {
            Some(idx) if !row.get(idx).unwrap_or("").is_empty() => field(idx),
            _ => format!("row{file_row}"),
        };
        if !seen_ids.insert(record_id.clone()) {
            out.warnings.push(format!("row {file_row}: duplicate record_id `{record_id}`"));
        }
        let mut extras = BTreeMap::new();
        for (idx, value) in row.iter().enumerate() {
            if Some(idx) == id_idx || idx == chinese_idx || idx == english_idx {
                continue;
            }
            if let Some(h) = headers.get(idx) {
                extras.insert(h.to_string(), value.to_string());
            }
        }
        out.records.push(RawRecord {
            record_id,
            chinese_name: field(chinese_idx),
            english_name: field(english_idx),
            extras,
        });
    }
    Ok(out)
}

/// Punctuation outside the ASCII range that still turns up in scraped name
/// fields; ASCII punctuation (after width folding) is handled separately.
const WIDE_PUNCT: &[char] = &['’', '‘', '“', '”', '。', '，', '、', '·', '！', '？', '：', '；'];

/// Narrow full-width Latin, drop punctuation except hyphens, collapse
/// whitespace. Idempotent.
pub fn clean_english(s: &str) -> String {
    let folded: String = s
        .chars()
        .map(|c| match c {
            '\u{FF01}'..='\u{FF5E}' => char::from_u32(c as u32 - 0xFEE0).unwrap_or(c),
            '\u{3000}' => ' ',
            c => c,
        })
        .filter(|&c| !(c.is_ascii_punctuation() && c != '-') && !WIDE_PUNCT.contains(&c))
        .collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Remove every whitespace character from the Han field. Idempotent.
pub fn clean_chinese(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

pub fn clean(record: &RawRecord) -> RawRecord {
    RawRecord {
        record_id: record.record_id.clone(),
        chinese_name: clean_chinese(&record.chinese_name),
        english_name: clean_english(&record.english_name),
        extras: record.extras.clone(),
    }
}

fn canto_consistent(token: &str, table: &HkgVariantTable) -> bool {
    is_legal_base(token, Scheme::Jyutping) || table.contains_token(token)
}

/// Origin from naming-convention evidence. Precedence: a whole-name match
/// against the toneless Pinyin rendering, then a romanised forename that is
/// one concatenated token splitting into ≥2 Pinyin syllables (and is not
/// itself Jyutping/HKG material), then per-character tokens consistent with
/// toneless Jyutping or HKG spellings. No romanised evidence → Unknown.
pub fn classify_origin(
    name: Option<&HanName>,
    english_tokens: &[String],
    forename_tokens: &[String],
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Origin {
    if let Some(n) = name {
        if !english_tokens.is_empty() {
            if let Ok(rn) = romanise_name(n, dict, table, SchemeRendering::PinyinNoTone) {
                if english_tokens == rn.display_tokens().as_slice() {
                    return Origin::Mandarin;
                }
            }
        }
    }
    let roman: Vec<&String> =
        forename_tokens.iter().filter(|t| token_is_romanised(t, table)).collect();
    if roman.len() == 1 {
        let t = roman[0];
        let pinyin_run = split_toneless(t, Scheme::Pinyin).map_or(false, |parts| parts.len() >= 2);
        if pinyin_run && !canto_consistent(t, table) {
            return Origin::Mandarin;
        }
    }
    if !roman.is_empty() && roman.iter().all(|t| canto_consistent(t, table)) {
        return Origin::Cantonese;
    }
    Origin::Unknown
}

/// Table-1 style composition of the forename: all tokens romanised, none, or
/// a mixture. An empty forename counts as english_only (no romanised
/// evidence) and gets a warning upstream.
pub fn classify_forename_kind(forename_tokens: &[String], table: &HkgVariantTable) -> ForenameKind {
    let roman = forename_tokens.iter().filter(|t| token_is_romanised(t, table)).count();
    if roman == 0 {
        ForenameKind::EnglishOnly
    } else if roman == forename_tokens.len() {
        ForenameKind::RomanisedOnly
    } else {
        ForenameKind::Mixed
    }
}

/// Drop the surname part from the english tokens: one leading token when it
/// equals the concatenated Pinyin surname (compound Pinyin names), else one
/// token per surname character.
fn split_off_surname<'a>(
    tokens: &'a [String],
    name: Option<&HanName>,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> &'a [String] {
    let surname_chars = name.map_or(1, |n| n.surname.chars().count());
    if tokens.is_empty() {
        return tokens;
    }
    if surname_chars > 1 {
        if let Some(n) = name {
            if let Ok(rn) = romanise_name(n, dict, table, SchemeRendering::PinyinNoTone) {
                if tokens[0] == rn.display_tokens()[0] {
                    return &tokens[1..];
                }
            }
        }
    }
    &tokens[surname_chars.min(tokens.len())..]
}

pub fn process_record(
    raw: &RawRecord,
    dict: &Dictionary,
    table: &HkgVariantTable,
    surname_roms: &BTreeSet<String>,
    strict: bool,
) -> ProcessedRecord {
    let cleaned = clean(raw);
    let mut warnings = Vec::new();
    let mut unprocessable = false;

    let name = if cleaned.chinese_name.is_empty() {
        warnings.push("chinese_name empty after cleaning".to_string());
        unprocessable = true;
        None
    } else {
        match segment_full_name(&cleaned.chinese_name, dict) {
            Ok(seg) => {
                if !seg.surname_matched {
                    warnings.push(format!(
                        "no surname-table match in `{}`; took first character",
                        cleaned.chinese_name
                    ));
                }
                Some(seg)
            }
            Err(e) => {
                warnings.push(e.to_string());
                unprocessable = true;
                None
            }
        }
    };
    let surname_matched = name.as_ref().map_or(false, |s| s.surname_matched);
    let name = name.map(|s| s.name);

    let mut renderings = BTreeMap::new();
    if let Some(n) = &name {
        for rendering in SchemeRendering::ALL {
            match romanise_name(n, dict, table, rendering) {
                Ok(rn) => {
                    renderings.insert(rendering.name().to_string(), rn.joined(false));
                }
                Err(e) => warnings.push(format!("{} rendering failed: {e}", rendering.name())),
            }
        }
    }

    let mut tokens: Vec<String> =
        cleaned.english_name.split_whitespace().map(str::to_lowercase).collect();
    if tokens.is_empty() {
        warnings.push("english_name empty after cleaning".to_string());
    } else {
        let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
        if detect_order(&refs, surname_roms) == NameOrder::SurnameLast {
            warnings.push("english tokens reordered: surname was last".to_string());
            tokens.rotate_right(1);
        }
    }
    let forename_tokens = split_off_surname(&tokens, name.as_ref(), dict, table).to_vec();
    if !tokens.is_empty() && forename_tokens.is_empty() {
        warnings.push("no forename tokens after removing surname part".to_string());
    }

    let mut origin = classify_origin(name.as_ref(), &tokens, &forename_tokens, dict, table);
    if strict && origin == Origin::Unknown {
        origin = Origin::Cantonese;
    }
    let forename_kind = classify_forename_kind(&forename_tokens, table);

    ProcessedRecord {
        record_id: cleaned.record_id,
        chinese_name: cleaned.chinese_name,
        english_name: cleaned.english_name,
        extras: cleaned.extras,
        name,
        surname_matched,
        origin,
        forename_kind,
        renderings,
        forename_tokens,
        warnings,
        unprocessable,
    }
}

pub fn process_all(
    raws: &[RawRecord],
    dict: &Dictionary,
    table: &HkgVariantTable,
    strict: bool,
) -> Vec<ProcessedRecord> {
    let surname_roms = surname_romanisations(dict, table);
    raws.iter().map(|r| process_record(r, dict, table, &surname_roms, strict)).collect()
}

/// The bundled 100-name corpus, fully processed with the bundled tables.
pub fn bundled_processed(strict: bool) -> Vec<ProcessedRecord> {
    let ingested = ingest_str(bundled_corpus_csv(), "corpus_100.csv", CorpusFormat::Csv)
        .expect("bundled corpus is well-formed");
    process_all(&ingested.records, Dictionary::bundled(), HkgVariantTable::bundled(), strict)
}

fn write_rows(
    header: &[String],
    rows: &[Vec<String>],
    format: CorpusFormat,
) -> Result<String, CorpusError> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(format.delimiter())
        .from_writer(Vec::new());
    let fail = |e: csv::Error| CorpusError::Parse { file: "<export>".to_string(), msg: e.to_string() };
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(row).map_err(fail)?;
    }
    let bytes = writer.into_inner().map_err(|e| CorpusError::Parse {
        file: "<export>".to_string(),
        msg: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| CorpusError::Parse {
        file: "<export>".to_string(),
        msg: e.to_string(),
    })
}

/// Column layout shared by both export flavours: the three fixed columns
/// first, everything else sorted by name, so that export ∘ ingest ∘ export
/// is byte-identical.
fn export_table(
    fixed: &[(&str, &str, &str)],
    extra_maps: &[&BTreeMap<String, String>],
    format: CorpusFormat,
) -> Result<String, CorpusError> {
    let mut extra_cols: BTreeSet<String> = BTreeSet::new();
    for m in extra_maps {
        extra_cols.extend(m.keys().cloned());
    }
    let mut header: Vec<String> =
        vec!["record_id".to_string(), "chinese_name".to_string(), "english_name".to_string()];
    header.extend(extra_cols.iter().cloned());
    let mut rows = Vec::with_capacity(fixed.len());
    for (i, (id, cn, en)) in fixed.iter().enumerate() {
        let mut row = vec![id.to_string(), cn.to_string(), en.to_string()];
        for col in &extra_cols {
            row.push(extra_maps[i].get(col).cloned().unwrap_or_default());
        }
        rows.push(row);
    }
    write_rows(&header, &rows, format)
}

/// Export with one extra column per requested rendering; `classify` adds
/// the origin and forename-kind columns on top.
pub fn export_string(
    records: &[ProcessedRecord],
    format: CorpusFormat,
    schemes: &[SchemeRendering],
    classify: bool,
) -> Result<String, CorpusError> {
    let mut maps: Vec<BTreeMap<String, String>> = Vec::with_capacity(records.len());
    for r in records {
        let mut m = r.extras.clone();
        if classify {
            m.insert("origin".to_string(), r.origin.name().to_string());
            m.insert("forename_kind".to_string(), r.forename_kind.name().to_string());
        }
        for s in schemes {
            m.insert(
                s.name().to_string(),
                r.renderings.get(s.name()).cloned().unwrap_or_default(),
            );
        }
        maps.push(m);
    }
    let fixed: Vec<(&str, &str, &str)> = records
        .iter()
        .map(|r| (r.record_id.as_str(), r.chinese_name.as_str(), r.english_name.as_str()))
        .collect();
    let refs: Vec<&BTreeMap<String, String>> = maps.iter().collect();
    export_table(&fixed, &refs, format)
}

pub fn export_raw_string(records: &[RawRecord], format: CorpusFormat) -> Result<String, CorpusError> {
    let fixed: Vec<(&str, &str, &str)> = records
        .iter()
        .map(|r| (r.record_id.as_str(), r.chinese_name.as_str(), r.english_name.as_str()))
        .collect();
    let refs: Vec<&BTreeMap<String, String>> = records.iter().map(|r| &r.extras).collect();
    export_table(&fixed, &refs, format)
}

pub fn export(
    records: &[ProcessedRecord],
    path: &Path,
    format: CorpusFormat,
    schemes: &[SchemeRendering],
    classify: bool,
) -> Result<(), CorpusError> {
    let out = export_string(records, format, schemes, classify)?;
    fs::write(path, out).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })
}
