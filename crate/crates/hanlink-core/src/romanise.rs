//! Romanisation of Han names: per-character conversion under every scheme,
//! the HKG-romanisation variant table (an explicit many-to-many mapping —
//! no algorithm can derive an unsystematic convention), and toneless
//! projections.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::namekit::HanName;
use crate::prondict::{DictError, Dictionary, NameContext};
use crate::syllable::{
    is_legal_base, parse_syllable, render_syllable, split_toneless, RenderStyle, Scheme, Syllable,
    SyllableError,
};

/// The scheme axis alone (tonal notation chosen separately by RenderStyle).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NameScheme {
    Jyutping,
    Pinyin,
    Hkg,
}

/// A concrete rendering column as reported in field-comparison tables:
/// scheme plus tonal notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeRendering {
    Jyutping,
    PinyinNumeric,
    PinyinDiacritic,
    PinyinNoTone,
    Hkg,
}

impl SchemeRendering {
    pub const ALL: [SchemeRendering; 5] = [
        SchemeRendering::Jyutping,
        SchemeRendering::PinyinNumeric,
        SchemeRendering::PinyinDiacritic,
        SchemeRendering::PinyinNoTone,
        SchemeRendering::Hkg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeRendering::Jyutping => "jyutping",
            SchemeRendering::PinyinNumeric => "pinyin",
            SchemeRendering::PinyinDiacritic => "pinyin_diacritic",
            SchemeRendering::PinyinNoTone => "pinyin_notone",
            SchemeRendering::Hkg => "hkg",
        }
    }

    pub fn from_name(s: &str) -> Option<SchemeRendering> {
        match s.to_lowercase().as_str() {
            "jyutping" => Some(SchemeRendering::Jyutping),
            "pinyin" | "pinyin_numeric" => Some(SchemeRendering::PinyinNumeric),
            "pinyin_diacritic" => Some(SchemeRendering::PinyinDiacritic),
            "pinyin_notone" | "pinyin_toneless" => Some(SchemeRendering::PinyinNoTone),
            "hkg" => Some(SchemeRendering::Hkg),
            _ => None,
        }
    }

    pub fn scheme(self) -> NameScheme {
        match self {
            SchemeRendering::Jyutping => NameScheme::Jyutping,
            SchemeRendering::Hkg => NameScheme::Hkg,
            _ => NameScheme::Pinyin,
        }
    }

    pub fn style(self) -> RenderStyle {
        match self {
            SchemeRendering::Jyutping | SchemeRendering::PinyinNumeric => RenderStyle::Numeric,
            SchemeRendering::PinyinDiacritic => RenderStyle::Diacritic,
            SchemeRendering::PinyinNoTone | SchemeRendering::Hkg => RenderStyle::Toneless,
        }
    }
}

impl std::fmt::Display for SchemeRendering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum RomaniseError {
    #[error("no {scheme} rendering for `{ch}`")]
    UnknownChar { ch: char, scheme: &'static str },
    #[error(transparent)]
    Syllable(#[from] SyllableError),
}

/// Many-to-many character ↔ spelling table for an unstandardised
/// romanisation. `forward` keeps file order (first listed = canonical);
/// `inverse` is its transpose. Additional tables for other naming origins
/// can be loaded under their own labels; only the Cantonese/HKG table ships
/// with data.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HkgVariantTable {
    origin: String,
    forward: BTreeMap<char, Vec<String>>,
    inverse: BTreeMap<String, BTreeSet<char>>,
}

static BUNDLED_HKG: Lazy<HkgVariantTable> = Lazy::new(|| {
    HkgVariantTable::from_str(include_str!("../data/hkg_variants.tsv"), "hkg_variants.tsv", "hkg")
        .expect("bundled HKG variant table is valid")
});

static EMPTY_CHARS: Lazy<BTreeSet<char>> = Lazy::new(BTreeSet::new);

impl HkgVariantTable {
    pub fn bundled() -> &'static HkgVariantTable {
        &BUNDLED_HKG
    }

    pub fn from_str(src: &str, file: &str, origin: &str) -> Result<HkgVariantTable, DictError> {
        let mut table = HkgVariantTable { origin: origin.to_string(), ..Default::default() };
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |msg: String| DictError::Malformed {
                file: file.to_string(),
                line: i + 1,
                msg,
                text: raw.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(malformed(format!("expected 2 columns, got {}", cols.len())));
            }
            let mut chars = cols[0].chars();
            let ch = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(malformed("character column must hold one character".into())),
            };
            let variant = cols[1];
            if variant.is_empty() || !variant.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(malformed(format!("variant `{variant}` must be lowercase ASCII letters")));
            }
            let list = table.forward.entry(ch).or_default();
            if list.iter().any(|v| v == variant) {
                return Err(malformed(format!("duplicate variant `{variant}` for `{ch}`")));
            }
            list.push(variant.to_string());
            table.inverse.entry(variant.to_string()).or_default().insert(ch);
        }
        Ok(table)
    }

    pub fn load(path: &Path, origin: &str) -> Result<HkgVariantTable, DictError> {
        let src = fs::read_to_string(path)
            .map_err(|source| DictError::Io { path: path.display().to_string(), source })?;
        HkgVariantTable::from_str(&src, &path.display().to_string(), origin)
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// Variants in file order; the first is canonical.
    pub fn variants(&self, ch: char) -> &[String] {
        self.forward.get(&ch).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn canonical(&self, ch: char) -> Option<&str> {
        self.variants(ch).first().map(String::as_str)
    }

    pub fn chars_for(&self, token: &str) -> &BTreeSet<char> {
        self.inverse.get(token).unwrap_or(&EMPTY_CHARS)
    }

    pub fn contains_token(&self, token: &str) -> bool {
        self.inverse.contains_key(token)
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.forward.keys().copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.inverse.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// Per-character romanisation tokens for one name, before display spacing.
/// Tokens align one-to-one with the source characters; `display_tokens`
/// applies the scheme's spacing rule (Pinyin concatenates within each part).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomanisedName {
    pub rendering: SchemeRendering,
    pub surname: Vec<String>,
    pub forename: Vec<String>,
}

impl RomanisedName {
    pub fn display_tokens(&self) -> Vec<String> {
        match self.rendering.scheme() {
            NameScheme::Jyutping | NameScheme::Hkg => {
                self.surname.iter().chain(&self.forename).cloned().collect()
            }
            NameScheme::Pinyin => {
                let mut t = vec![self.surname.concat()];
                if !self.forename.is_empty() {
                    t.push(self.forename.concat());
                }
                t
            }
        }
    }

    pub fn joined(&self, capitalise: bool) -> String {
        let tokens = self.display_tokens();
        if capitalise {
            tokens.iter().map(|t| crate::namekit::capitalise_token(t)).collect::<Vec<_>>().join(" ")
        } else {
            tokens.join(" ")
        }
    }

    pub fn char_tokens(&self) -> impl Iterator<Item = &str> {
        self.surname.iter().chain(&self.forename).map(String::as_str)
    }
}

/// One character → one token under the given scheme and style. Surname
/// context selects surname readings of heteronyms. HKG uses the canonical
/// variant, resolving through the traditional/simplified twin when the
/// character itself is not in the table.
pub fn romanise_char(
    ch: char,
    dict: &Dictionary,
    table: &HkgVariantTable,
    scheme: NameScheme,
    style: RenderStyle,
    context: NameContext,
) -> Result<String, RomaniseError> {
    match scheme {
        NameScheme::Hkg => table
            .canonical(ch)
            .or_else(|| dict.variant_of(ch).and_then(|twin| table.canonical(twin)))
            .map(str::to_string)
            .ok_or(RomaniseError::UnknownChar { ch, scheme: "hkg" }),
        NameScheme::Jyutping | NameScheme::Pinyin => {
            let s = if scheme == NameScheme::Jyutping { Scheme::Jyutping } else { Scheme::Pinyin };
            let reading = dict
                .primary_reading(ch, s, context)
                .map_err(|_| RomaniseError::UnknownChar { ch, scheme: s.name() })?;
            Ok(render_syllable(&reading.syllable, style)?)
        }
    }
}

pub fn romanise_name(
    name: &HanName,
    dict: &Dictionary,
    table: &HkgVariantTable,
    rendering: SchemeRendering,
) -> Result<RomanisedName, RomaniseError> {
    let (scheme, style) = (rendering.scheme(), rendering.style());
    let part = |text: &str, ctx: NameContext| -> Result<Vec<String>, RomaniseError> {
        text.chars().map(|ch| romanise_char(ch, dict, table, scheme, style, ctx)).collect()
    };
    Ok(RomanisedName {
        rendering,
        surname: part(&name.surname, NameContext::Surname)?,
        forename: part(&name.forename, NameContext::Forename)?,
    })
}

/// All spellings recorded for a character; empty set when unmapped.
pub fn hkg_variants(ch: char, table: &HkgVariantTable) -> BTreeSet<String> {
    table.variants(ch).iter().cloned().collect()
}

/// The characters a spelling may stand for, each with its primary Jyutping
/// reading. Sorted by character; empty when the token is unknown.
pub fn hkg_candidates(
    token: &str,
    table: &HkgVariantTable,
    dict: &Dictionary,
) -> Vec<(char, Syllable)> {
    table
        .chars_for(token)
        .iter()
        .filter_map(|&ch| {
            dict.primary_reading(ch, Scheme::Jyutping, NameContext::Unknown)
                .ok()
                .map(|r| (ch, r.syllable.clone()))
        })
        .collect()
}

/// Strip tones from a rendered name, preserving display spacing. Renderings
/// that are already toneless pass through unchanged.
pub fn toneless_projection(rn: &RomanisedName) -> Result<Vec<String>, SyllableError> {
    let scheme = match rn.rendering {
        SchemeRendering::Jyutping => Scheme::Jyutping,
        SchemeRendering::PinyinNumeric | SchemeRendering::PinyinDiacritic => Scheme::Pinyin,
        SchemeRendering::PinyinNoTone | SchemeRendering::Hkg => return Ok(rn.display_tokens()),
    };
    let strip = |tokens: &[String]| -> Result<Vec<String>, SyllableError> {
        tokens.iter().map(|t| Ok(parse_syllable(t, scheme)?.base)).collect()
    };
    let projected = RomanisedName {
        rendering: rn.rendering,
        surname: strip(&rn.surname)?,
        forename: strip(&rn.forename)?,
    };
    Ok(projected.display_tokens())
}

/// Whether a token plausibly romanises a Han character sequence: a legal
/// toneless Jyutping syllable, a known HKG spelling, or a full concatenation
/// of toneless Pinyin syllables.
pub fn token_is_romanised(token: &str, table: &HkgVariantTable) -> bool {
    let t = token.to_lowercase();
    is_legal_base(&t, Scheme::Jyutping)
        || table.contains_token(&t)
        || split_toneless(&t, Scheme::Pinyin).is_some()
}

/// Every romanised form a surname-table entry can take, lowercased: numeric
/// and toneless renderings of each character's readings, HKG variants, and
/// for multi-character surnames the concatenated Pinyin forms.
pub fn surname_romanisations(dict: &Dictionary, table: &HkgVariantTable) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for surname in dict.surnames() {
        let chars: Vec<char> = surname.chars().collect();
        for &ch in &chars {
            for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
                for r in dict.lookup(ch, scheme) {
                    out.insert(r.syllable.to_string());
                    out.insert(r.syllable.base.clone());
                }
            }
            for v in table.variants(ch) {
                out.insert(v.clone());
            }
        }
        if chars.len() > 1 {
            let mut numeric = String::new();
            let mut toneless = String::new();
            let mut ok = true;
            for &ch in &chars {
                match dict.primary_reading(ch, Scheme::Pinyin, NameContext::Surname) {
                    Ok(r) => {
                        numeric.push_str(&r.syllable.to_string());
                        toneless.push_str(&r.syllable.base);
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.insert(numeric);
                out.insert(toneless);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::namekit::segment_full_name;

    fn fixtures() -> (&'static Dictionary, &'static HkgVariantTable) {
        (Dictionary::bundled(), HkgVariantTable::bundled())
    }

    #[test]
    fn romanise_char_examples() {
        let (d, t) = fixtures();
        let r = |ch, scheme, style| romanise_char(ch, d, t, scheme, style, NameContext::Surname).unwrap();
        assert_eq!(r('周', NameScheme::Jyutping, RenderStyle::Numeric), "zau1");
        assert_eq!(r('周', NameScheme::Pinyin, RenderStyle::Numeric), "zhou1");
        assert_eq!(r('楊', NameScheme::Hkg, RenderStyle::Toneless), "yeung");
        assert_eq!(r('杨', NameScheme::Hkg, RenderStyle::Toneless), "yeung");
        assert!(matches!(
            romanise_char('玨', d, t, NameScheme::Hkg, RenderStyle::Toneless, NameContext::Unknown),
            Err(RomaniseError::UnknownChar { ch: '玨', .. })
        ));
    }

    #[test]
    fn consistency_same_char_same_output() {
        let (d, t) = fixtures();
        for rendering in SchemeRendering::ALL {
            let a = romanise_name(&segment_full_name("周永周", d).unwrap().name, d, t, rendering).unwrap();
            // 周 appears as surname char and forename char; forename-context
            // repeats must agree with each other
            assert_eq!(a.forename[1], romanise_char('周', d, t, rendering.scheme(), rendering.style(), NameContext::Forename).unwrap());
        }
    }

    #[test]
    fn hkg_variant_sets() {
        let (d, t) = fixtures();
        let yeung: BTreeSet<String> =
            ["yang", "young", "yep", "yong", "yeung", "yeang", "yung"].iter().map(|s| s.to_string()).collect();
        assert_eq!(hkg_variants('楊', t), yeung);
        let chow: BTreeSet<String> = ["chow", "chau", "chiau"].iter().map(|s| s.to_string()).collect();
        assert_eq!(hkg_variants('周', t), chow);
        assert!(hkg_variants('玨', t).is_empty());
        let chiu = hkg_candidates("chiu", t, d);
        let rendered: Vec<(char, String)> = chiu.iter().map(|(c, s)| (*c, s.to_string())).collect();
        assert_eq!(rendered, vec![('趙', "ziu6".to_string()), ('邱', "jau1".to_string())]);
        assert!(hkg_candidates("zzz", t, d).is_empty());
        assert!(hkg_candidates("chow", t, d).iter().any(|(c, s)| *c == '周' && s.to_string() == "zau1"));
    }

    #[test]
    fn transpose_property_exhaustive() {
        let (d, t) = fixtures();
        for ch in t.chars() {
            let canonical = t.canonical(ch).unwrap();
            assert!(hkg_variants(ch, t).contains(canonical));
            assert!(t.chars_for(canonical).contains(&ch));
            for v in t.variants(ch) {
                assert!(t.chars_for(v).contains(&ch), "{ch} missing from inverse of {v}");
            }
        }
        for token in t.tokens() {
            for &ch in t.chars_for(token) {
                assert!(t.variants(ch).iter().any(|v| v == token));
            }
        }
        let _ = d;
    }

    #[test]
    fn toneless_projection_rules() {
        let (d, t) = fixtures();
        let name = segment_full_name("黃家明", d).unwrap().name;
        let jy = romanise_name(&name, d, t, SchemeRendering::Jyutping).unwrap();
        assert_eq!(toneless_projection(&jy).unwrap(), vec!["wong", "gaa", "ming"]);
        // toned collision preserved: 顏 and 嚴 are both yan2 hence both yan
        let mut both = BTreeSet::new();
        for text in ["顏永明", "嚴永明"] {
            let n = segment_full_name(text, d).unwrap().name;
            let py = romanise_name(&n, d, t, SchemeRendering::PinyinNumeric).unwrap();
            both.insert(toneless_projection(&py).unwrap()[0].clone());
        }
        assert_eq!(both.len(), 1);
        assert!(both.contains("yan"));
        // diacritic input strips to the same bases as numeric
        let pd = romanise_name(&name, d, t, SchemeRendering::PinyinDiacritic).unwrap();
        let pn = romanise_name(&name, d, t, SchemeRendering::PinyinNumeric).unwrap();
        assert_eq!(toneless_projection(&pd).unwrap(), toneless_projection(&pn).unwrap());
        // already-toneless renderings pass through
        let hk = romanise_name(&name, d, t, SchemeRendering::Hkg).unwrap();
        assert_eq!(toneless_projection(&hk).unwrap(), hk.display_tokens());
    }

    #[test]
    fn display_spacing() {
        let (d, t) = fixtures();
        let name = segment_full_name("歐陽俊熙", d).unwrap().name;
        let jy = romanise_name(&name, d, t, SchemeRendering::Jyutping).unwrap();
        assert_eq!(jy.display_tokens().len(), 4);
        let py = romanise_name(&name, d, t, SchemeRendering::PinyinNumeric).unwrap();
        assert_eq!(py.display_tokens(), vec!["ou1yang2", "jun4xi1"]);
        assert_eq!(py.joined(true), "Ou1yang2 Jun4xi1");
        let pn = romanise_name(&name, d, t, SchemeRendering::PinyinNoTone).unwrap();
        assert_eq!(pn.joined(true), "Ouyang Junxi");
    }

    #[test]
    fn token_classification() {
        let (_, t) = fixtures();
        assert!(token_is_romanised("wong", t)); // legal toneless Jyutping
        assert!(token_is_romanised("yeung", t)); // HKG spelling
        assert!(token_is_romanised("junjie", t)); // Pinyin concatenation
        assert!(token_is_romanised("Chiu", t));
        assert!(!token_is_romanised("johnny", t));
        assert!(!token_is_romanised("crystal", t));
        assert!(!token_is_romanised("x", t));
    }

    #[test]
    fn table_load_errors() {
        assert!(HkgVariantTable::from_str("楊\tYeung\n", "t", "hkg").is_err()); // uppercase
        assert!(HkgVariantTable::from_str("楊\tyeung2\n", "t", "hkg").is_err()); // digit
        assert!(HkgVariantTable::from_str("楊\tyeung\n楊\tyeung\n", "t", "hkg").is_err()); // dup
        assert!(HkgVariantTable::from_str("楊楊\tyeung\n", "t", "hkg").is_err());
        let empty = HkgVariantTable::from_str("# nothing\n", "t", "vietnamese").unwrap();
        assert!(empty.is_empty()); // additional origin tables may ship empty
    }
}
