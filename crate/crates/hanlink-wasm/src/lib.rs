//! Thin JSON shims over hanlink-core for the browser demo. Every export
//! takes strings, returns a JSON string, and reports problems as
//! `{"error": "..."}` rather than throwing across the FFI boundary.
//!
//! The exports are ordinary functions on non-wasm targets, so the whole
//! crate builds and tests on the host.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use hanlink_core::corpusio::{bundled_processed, process_record, RawRecord};
use hanlink_core::linksim::hkg_spellings;
use hanlink_core::namekit::is_han;
use hanlink_core::prondict::{Dictionary, NameContext};
use hanlink_core::romanise::{hkg_candidates, surname_romanisations, HkgVariantTable};
use hanlink_core::stats::tone_sequence;
use hanlink_core::tonemodel::ToneNgramModel;
use hanlink_core::Scheme;

fn surname_roms() -> &'static BTreeSet<String> {
    static ROMS: OnceLock<BTreeSet<String>> = OnceLock::new();
    ROMS.get_or_init(|| surname_romanisations(Dictionary::bundled(), HkgVariantTable::bundled()))
}

/// Tone n-gram model fitted once per scheme on the bundled corpus.
fn corpus_model(scheme: Scheme) -> &'static ToneNgramModel {
    static JYUTPING: OnceLock<ToneNgramModel> = OnceLock::new();
    static PINYIN: OnceLock<ToneNgramModel> = OnceLock::new();
    let slot = match scheme {
        Scheme::Jyutping => &JYUTPING,
        Scheme::Pinyin => &PINYIN,
    };
    slot.get_or_init(|| {
        let dict = Dictionary::bundled();
        let seqs: Vec<Vec<u8>> = bundled_processed(false)
            .iter()
            .filter_map(|r| r.name.as_ref())
            .filter_map(|n| tone_sequence(n, dict, scheme))
            .collect();
        ToneNgramModel::fit(
            &seqs,
            ToneNgramModel::DEFAULT_ORDER,
            scheme,
            ToneNgramModel::DEFAULT_ALPHA,
        )
        .expect("bundled corpus fits")
    })
}

fn err(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Segment, classify and render one name. `english` may be empty.
#[wasm_bindgen]
pub fn convert_name(chinese: &str, english: &str) -> String {
    let raw = RawRecord {
        record_id: "web".to_string(),
        chinese_name: chinese.to_string(),
        english_name: english.to_string(),
        extras: Default::default(),
    };
    let rec = process_record(
        &raw,
        Dictionary::bundled(),
        HkgVariantTable::bundled(),
        surname_roms(),
        false,
    );
    if rec.unprocessable {
        return err(rec.warnings.join("; "));
    }
    let name = rec.name.as_ref().expect("processable record has a name");
    json!({
        "surname": name.surname,
        "forename": name.forename,
        "surname_matched": rec.surname_matched,
        "origin": rec.origin.name(),
        "forename_kind": rec.forename_kind.name(),
        "renderings": rec.renderings,
        "warnings": rec.warnings,
    })
    .to_string()
}

/// Spelling lookup, both directions: Han characters in the query map to
/// their recorded spellings, a romanised token maps to candidate characters.
#[wasm_bindgen]
pub fn lookup_spellings(query: &str) -> String {
    let dict = Dictionary::bundled();
    let table = HkgVariantTable::bundled();
    let query = query.trim();
    let han: Vec<char> = query.chars().filter(|c| is_han(*c)).collect();
    if !han.is_empty() {
        let rows: Vec<Value> = han
            .iter()
            .map(|&ch| {
                let spellings = hkg_spellings(ch, dict, table);
                json!({
                    "character": ch.to_string(),
                    "canonical": spellings.first(),
                    "variants": spellings,
                })
            })
            .collect();
        return json!({ "direction": "character_to_spelling", "rows": rows }).to_string();
    }
    let token = query.to_lowercase();
    let rows: Vec<Value> = hkg_candidates(&token, table, dict)
        .into_iter()
        .map(|(ch, syl)| {
            let pinyin = dict
                .primary_reading(ch, Scheme::Pinyin, NameContext::Unknown)
                .map(|r| r.syllable.to_string())
                .unwrap_or_default();
            json!({
                "character": ch.to_string(),
                "jyutping": syl.to_string(),
                "pinyin": pinyin,
            })
        })
        .collect();
    json!({ "direction": "spelling_to_character", "token": token, "rows": rows }).to_string()
}

/// Tone imputation against the bundled-corpus model. `tones` is a comma or
/// space separated sequence; `_` or `?` marks the single gap to fill. With
/// no gap the next tone after the sequence is predicted.
#[wasm_bindgen]
pub fn impute_tones(tones: &str, scheme: &str) -> String {
    let scheme = match Scheme::from_name(scheme) {
        Some(s) => s,
        None => return err(format!("unknown scheme `{scheme}`")),
    };
    let mut sequence: Vec<Option<u8>> = Vec::new();
    for part in tones.split([',', ' ', '\t']).filter(|p| !p.is_empty()) {
        if part == "_" || part == "?" {
            sequence.push(None);
            continue;
        }
        match part.parse::<u8>() {
            Ok(t) if (1..=scheme.max_tone()).contains(&t) => sequence.push(Some(t)),
            _ => return err(format!("`{part}` is not a {} tone", scheme.name())),
        }
    }
    if !sequence.iter().any(Option::is_none) {
        sequence.push(None);
    }
    let model = corpus_model(scheme);
    match model.impute_missing_tone(&sequence) {
        Ok(ranked) => {
            let rows: Vec<Value> = ranked
                .iter()
                .map(|&(tone, p)| json!({ "tone": tone, "probability": p }))
                .collect();
            json!({
                "scheme": scheme.name(),
                "order": model.order(),
                "candidates": rows,
            })
            .to_string()
        }
        Err(e) => err(e),
    }
}
