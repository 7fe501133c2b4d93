//! Consistency checks over the bundled data files: every dictionary reading
//! must be legal under its syllable grammar, and the bundled corpus must be
//! fully covered by the dictionary and the HKG variant table.

use hanlink_core::corpusio::{bundled_processed, ingest_str, CorpusFormat};
use hanlink_core::linksim::hkg_spellings;
use hanlink_core::prondict::Dictionary;
use hanlink_core::romanise::{HkgVariantTable, SchemeRendering};
use hanlink_core::syllable::is_legal_base;
use hanlink_core::Scheme;

#[test]
fn every_reading_is_grammatical() {
    let dict = Dictionary::bundled();
    let mut chars = 0;
    for ch in dict.chars() {
        chars += 1;
        for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
            let readings = dict.lookup(ch, scheme);
            assert!(!readings.is_empty(), "{ch} lacks {} readings", scheme.name());
            for (i, r) in readings.iter().enumerate() {
                assert!(
                    is_legal_base(&r.syllable.base, scheme),
                    "{ch}: `{}` not a legal {} base",
                    r.syllable.base,
                    scheme.name()
                );
                assert!(r.syllable.tone >= 1 && r.syllable.tone <= scheme.max_tone());
                assert_eq!(r.rank as usize, i + 1, "{ch}: ranks must be consecutive");
            }
        }
    }
    assert!(chars >= 150, "dictionary looks truncated: {chars} characters");
}

#[test]
fn hkg_table_is_well_formed() {
    let table = HkgVariantTable::bundled();
    assert!(table.len() >= 100);
    for ch in table.chars() {
        let variants = table.variants(ch);
        assert!(!variants.is_empty());
        for v in variants {
            assert!(
                v.chars().all(|c| c.is_ascii_lowercase()),
                "{ch}: variant `{v}` not lowercase ASCII"
            );
        }
        assert_eq!(table.canonical(ch), Some(variants[0].as_str()));
    }
}

#[test]
fn corpus_is_fully_covered() {
    let dict = Dictionary::bundled();
    let table = HkgVariantTable::bundled();
    let records = bundled_processed(false);
    assert_eq!(records.len(), 100);
    for r in &records {
        assert!(!r.unprocessable, "{}: unprocessable", r.record_id);
        let name = r.name.as_ref().unwrap();
        for ch in name.chars() {
            for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
                assert!(!dict.lookup(ch, scheme).is_empty(), "{ch} missing {}", scheme.name());
            }
            assert!(
                !hkg_spellings(ch, dict, table).is_empty(),
                "{ch} has no HKG spelling (even via its variant twin)"
            );
        }
        for rendering in SchemeRendering::ALL {
            assert!(
                r.renderings.contains_key(rendering.name()),
                "{}: missing {} rendering",
                r.record_id,
                rendering.name()
            );
        }
    }
}

#[test]
fn corpus_ids_are_unique_and_ordered() {
    let raw = ingest_str(
        include_str!("../data/corpus_100.csv"),
        "corpus_100.csv",
        CorpusFormat::Csv,
    )
    .unwrap();
    assert_eq!(raw.records.len(), 100);
    assert!(raw.warnings.is_empty(), "bundled corpus should ingest cleanly: {:?}", raw.warnings);
    let mut ids: Vec<&str> = raw.records.iter().map(|r| r.record_id.as_str()).collect();
    let sorted = {
        let mut s = ids.clone();
        s.sort();
        s.dedup();
        s
    };
    assert_eq!(sorted.len(), 100, "duplicate record ids");
    ids.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn surname_table_spans_scripts() {
    let dict = Dictionary::bundled();
    for s in ["陳", "陈", "張", "张", "歐陽", "欧阳", "黃", "王"] {
        assert!(dict.is_surname(s), "{s} should be a known surname");
    }
    assert!(dict.max_surname_len() >= 2);
    assert!(!dict.is_surname("明"));
}
