//! Name-level structure: surname/forename segmentation of Han names, token
//! order detection and repair for romanised names, and scheme-correct
//! rendering (Jyutping/HKG space every syllable; Pinyin spaces only between
//! surname and forename).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::prondict::{CharScript, Dictionary, NameContext};
use crate::romanise::{romanise_char, HkgVariantTable, NameScheme, RomaniseError};
use crate::syllable::RenderStyle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Script {
    Traditional,
    Simplified,
    Mixed,
}

impl Script {
    pub fn name(self) -> &'static str {
        match self {
            Script::Traditional => "traditional",
            Script::Simplified => "simplified",
            Script::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HanName {
    pub surname: String,
    pub forename: String,
    pub script: Script,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameOrder {
    SurnameFirst,
    SurnameLast,
    Ambiguous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmented {
    pub name: HanName,
    /// False when no surname-table prefix matched and the first character
    /// was taken as a fallback; callers surface this as a warning.
    pub surname_matched: bool,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NameError {
    #[error("name too short: need at least 2 characters, got {0}")]
    TooShort(usize),
    #[error("non-Han character `{0}` in Chinese name")]
    NonHan(char),
    #[error("surname must not be empty")]
    EmptySurname,
}

/// CJK Unified Ideographs plus Extension A.
pub fn is_han(c: char) -> bool {
    matches!(c, '\u{4E00}'..='\u{9FFF}' | '\u{3400}'..='\u{4DBF}')
}

impl HanName {
    pub fn new(surname: &str, forename: &str, dict: &Dictionary) -> Result<HanName, NameError> {
        if surname.is_empty() {
            return Err(NameError::EmptySurname);
        }
        if let Some(c) = surname.chars().chain(forename.chars()).find(|&c| !is_han(c)) {
            return Err(NameError::NonHan(c));
        }
        let script = classify_script(surname.chars().chain(forename.chars()), dict);
        Ok(HanName { surname: surname.to_string(), forename: forename.to_string(), script })
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.surname.chars().chain(self.forename.chars())
    }

    pub fn char_count(&self) -> usize {
        self.chars().count()
    }

    pub fn full(&self) -> String {
        format!("{}{}", self.surname, self.forename)
    }
}

/// A name whose characters are all shared between scripts counts as
/// Traditional: either label is accurate and the corpus default is
/// traditional-script Hong Kong data.
fn classify_script(chars: impl Iterator<Item = char>, dict: &Dictionary) -> Script {
    let mut trad = false;
    let mut simp = false;
    for c in chars {
        match dict.char_script(c) {
            CharScript::TraditionalOnly => trad = true,
            CharScript::SimplifiedOnly => simp = true,
            CharScript::Shared => {}
        }
    }
    match (trad, simp) {
        (true, true) => Script::Mixed,
        (false, true) => Script::Simplified,
        _ => Script::Traditional,
    }
}

/// Split a full Chinese name into surname + forename by longest prefix match
/// against the surname table, probing longer prefixes first. The probe is
/// capped at one character short of the whole name so the forename is never
/// empty. No match: first character becomes the surname, flagged unmatched.
pub fn segment_full_name(text: &str, dict: &Dictionary) -> Result<Segmented, NameError> {
    let chars: Vec<char> = text.chars().collect();
    if let Some(&c) = chars.iter().find(|&&c| !is_han(c)) {
        return Err(NameError::NonHan(c));
    }
    if chars.len() < 2 {
        return Err(NameError::TooShort(chars.len()));
    }
    let cap = dict.max_surname_len().min(chars.len() - 1);
    for len in (1..=cap).rev() {
        let prefix: String = chars[..len].iter().collect();
        if dict.is_surname(&prefix) {
            let forename: String = chars[len..].iter().collect();
            return Ok(Segmented {
                name: HanName::new(&prefix, &forename, dict)?,
                surname_matched: true,
            });
        }
    }
    let surname: String = chars[..1].iter().collect();
    let forename: String = chars[1..].iter().collect();
    Ok(Segmented { name: HanName::new(&surname, &forename, dict)?, surname_matched: false })
}

/// Decide token order from which end of the sequence looks like a surname.
/// `surname_roms` is any collection of known surname romanisations, e.g.
/// from [`crate::romanise::surname_romanisations`]. Matching is
/// case-insensitive.
pub fn detect_order(tokens: &[&str], surname_roms: &BTreeSet<String>) -> NameOrder {
    if tokens.len() < 2 {
        return NameOrder::Ambiguous;
    }
    let hit = |t: &str| surname_roms.contains(&t.to_lowercase());
    let first = hit(tokens[0]);
    let last = hit(tokens[tokens.len() - 1]);
    match (first, last) {
        (true, false) => NameOrder::SurnameFirst,
        (false, true) => NameOrder::SurnameLast,
        _ => NameOrder::Ambiguous,
    }
}

/// Fold a middle-name field back into the forename; token order and the
/// overall token multiset are preserved.
pub fn repair_misplaced_middle(
    surname_field: &[String],
    forename_field: &[String],
    middle_field: &[String],
) -> (Vec<String>, Vec<String>) {
    let mut forename = forename_field.to_vec();
    forename.extend(middle_field.iter().cloned());
    (surname_field.to_vec(), forename)
}

/// Render a Han name in one scheme. Jyutping/HKG put a space between every
/// character's syllable; Pinyin concatenates within surname and forename.
/// For HKG the canonical variant is used and `style` is ignored (the scheme
/// carries no tones).
pub fn render_name(
    name: &HanName,
    dict: &Dictionary,
    table: &HkgVariantTable,
    scheme: NameScheme,
    style: RenderStyle,
    capitalise: bool,
) -> Result<String, RomaniseError> {
    let part = |text: &str, ctx: NameContext| -> Result<Vec<String>, RomaniseError> {
        text.chars().map(|ch| romanise_char(ch, dict, table, scheme, style, ctx)).collect()
    };
    let sur = part(&name.surname, NameContext::Surname)?;
    let fore = part(&name.forename, NameContext::Forename)?;
    let mut tokens: Vec<String> = match scheme {
        NameScheme::Jyutping | NameScheme::Hkg => sur.into_iter().chain(fore).collect(),
        NameScheme::Pinyin => {
            let mut t = vec![sur.concat()];
            if !fore.is_empty() {
                t.push(fore.concat());
            }
            t
        }
    };
    if capitalise {
        for t in &mut tokens {
            *t = capitalise_token(t);
        }
    }
    Ok(tokens.join(" "))
}

pub fn capitalise_token(token: &str) -> String {
    let mut chars = token.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
