//! Acceptance suite. One test per criterion; each prints a single
//! `criterion NN <name>: PASS/FAIL` line (visible with `--nocapture`, and in
//! the failure output otherwise).
//!
//! Criteria 2–4 compare against published reference figures only when
//! `HANLINK_REFERENCE_CORPUS` points at the cleaned source dataset, which cannot
//! be redistributed here. Without it they fall back to the documented
//! substitute checks on the bundled corpus: every value recomputed by an
//! independent oracle that reads the raw data files and re-derives the
//! pipeline from scratch.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use hanlink_core::corpusio::bundled_processed;
use hanlink_core::linksim::{
    generate_pair_corpus, replicate_names, run_linkage, run_linkage_all_pairs, BlockScheme,
    BlockingKeySpec, Comparator, KeyTransform, PerturbationModel,
};
use hanlink_core::prondict::{Dictionary, NameContext};
use hanlink_core::romanise::{hkg_variants, HkgVariantTable, SchemeRendering};
use hanlink_core::stats::{
    compute_corpus_stats, format_delta_pct, tone_combo_distribution, topk_coverage,
    zipf_fit_counts, NamePart, StatScheme,
};
use hanlink_core::syllable::{legal_bases, parse_syllable, render_syllable, RenderStyle};
use hanlink_core::tonemodel::ToneNgramModel;
use hanlink_core::Scheme;

// ---------------------------------------------------------------- harness

fn check(number: u32, name: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    let outcome = body();
    let elapsed = started.elapsed();
    match outcome {
        Ok(detail) if elapsed <= limit => {
            println!("criterion {number:02} {name}: PASS ({detail}; {elapsed:.2?})");
        }
        Ok(_) => {
            let line = format!(
                "criterion {number:02} {name}: FAIL — over time budget ({elapsed:.2?} > {limit:?})"
            );
            println!("{line}");
            panic!("{line}");
        }
        Err(why) => {
            let line = format!("criterion {number:02} {name}: FAIL — {why}");
            println!("{line}");
            panic!("{line}");
        }
    }
}

macro_rules! expect {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn hanlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hanlink"))
        .args(args)
        .env_remove("HANLINK_DICT")
        .output()
        .expect("binary runs")
}

fn run_kv(args: &[&str]) -> Result<String, String> {
    let mut full = args.to_vec();
    full.extend_from_slice(&["--format", "kv"]);
    let out = hanlink(&full);
    let code = out.status.code().unwrap_or(-1);
    if code == 1 {
        return Err(format!(
            "`hanlink {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

/// Value of `key=` on the first kv line matching all `filters`.
fn kv_lookup(text: &str, filters: &[(&str, &str)], key: &str) -> Option<String> {
    'lines: for line in text.lines() {
        let fields: BTreeMap<&str, &str> =
            line.split('\t').filter_map(|f| f.split_once('=')).collect();
        for (fk, fv) in filters {
            if fields.get(fk) != Some(fv) {
                continue 'lines;
            }
        }
        return fields.get(key).map(|v| v.to_string());
    }
    None
}

fn reference_corpus() -> Option<PathBuf> {
    std::env::var_os("HANLINK_REFERENCE_CORPUS").map(PathBuf::from)
}

// ------------------------------------------------- independent data oracle

/// A from-scratch re-derivation of the rendering pipeline that reads the
/// raw data files directly, used to cross-check library outputs.
struct Oracle {
    // char → per scheme (0 jyutping, 1 pinyin) readings in rank order:
    // (base as written in the file, tone, surname flag)
    readings: BTreeMap<char, [Vec<(String, u8, bool)>; 2]>,
    twin: BTreeMap<char, char>,
    surnames: BTreeSet<String>,
    hkg: BTreeMap<char, Vec<String>>,
    max_surname: usize,
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../hanlink-core/data")
}

fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_dir().join(name)).expect("data file readable")
}

fn data_rows(src: &str) -> impl Iterator<Item = Vec<&str>> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
}

impl Oracle {
    fn load() -> Oracle {
        let mut readings: BTreeMap<char, [Vec<(String, u8, bool)>; 2]> = BTreeMap::new();
        let dict_src = read_data("dictionary.tsv");
        for row in data_rows(&dict_src) {
            assert_eq!(row.len(), 6, "dictionary row: {row:?}");
            let ch = row[0].chars().next().unwrap();
            let scheme = if row[1] == "jyutping" { 0 } else { 1 };
            let entry = readings.entry(ch).or_default();
            entry[scheme].push((
                row[2].to_string(),
                row[3].parse().unwrap(),
                row[5] == "1",
            ));
            // rank column must agree with file order
            assert_eq!(row[4].parse::<usize>().unwrap(), entry[scheme].len());
        }
        let mut twin = BTreeMap::new();
        let var_src = read_data("variants.tsv");
        for row in data_rows(&var_src) {
            let (a, b) = (row[0].chars().next().unwrap(), row[1].chars().next().unwrap());
            twin.insert(a, b);
            twin.insert(b, a);
        }
        let mut surnames = BTreeSet::new();
        let sur_src = read_data("surnames.tsv");
        for row in data_rows(&sur_src) {
            let s = row[0].to_string();
            // the loader mirrors each surname into the other script
            let converted: String =
                s.chars().map(|c| twin.get(&c).copied().unwrap_or(c)).collect();
            surnames.insert(converted);
            surnames.insert(s);
        }
        let max_surname = surnames.iter().map(|s| s.chars().count()).max().unwrap();
        let mut hkg: BTreeMap<char, Vec<String>> = BTreeMap::new();
        let hkg_src = read_data("hkg_variants.tsv");
        for row in data_rows(&hkg_src) {
            hkg.entry(row[0].chars().next().unwrap()).or_default().push(row[1].to_string());
        }
        Oracle { readings, twin, surnames, hkg, max_surname }
    }

    fn resolve(&self, ch: char) -> Option<char> {
        if self.readings.contains_key(&ch) {
            return Some(ch);
        }
        self.twin.get(&ch).copied().filter(|t| self.readings.contains_key(t))
    }

    /// (base as written, tone): surname context prefers the flagged reading.
    fn primary(&self, ch: char, scheme: usize, surname_ctx: bool) -> Option<(String, u8)> {
        let list = &self.readings.get(&self.resolve(ch)?)?[scheme];
        let pick = surname_ctx
            .then(|| list.iter().find(|(_, _, flag)| *flag))
            .flatten()
            .or_else(|| list.first())?;
        Some((pick.0.clone(), pick.1))
    }

    fn hkg_canonical(&self, ch: char) -> Option<String> {
        let key = if self.hkg.contains_key(&ch) { ch } else { *self.twin.get(&ch)? };
        self.hkg.get(&key)?.first().cloned()
    }

    /// Longest-match segmentation probing at most len-1 characters.
    fn segment(&self, name: &str) -> (String, String) {
        let chars: Vec<char> = name.chars().collect();
        let cap = self.max_surname.min(chars.len().saturating_sub(1));
        for take in (1..=cap).rev() {
            let prefix: String = chars[..take].iter().collect();
            if self.surnames.contains(&prefix) {
                return (prefix, chars[take..].iter().collect());
            }
        }
        (chars[..1].iter().collect(), chars[1..].iter().collect())
    }

    /// The five rendered strings for one name part, mirroring the display
    /// conventions: Jyutping/HKG space every syllable, Pinyin concatenates
    /// within a part, toneless Pinyin restores ü from the v substitution.
    fn field(&self, part_chars: &str, scheme: &str, surname_ctx: bool) -> Option<String> {
        if scheme == "chinese" {
            return Some(part_chars.to_string());
        }
        let mut tokens = Vec::new();
        for ch in part_chars.chars() {
            let token = match scheme {
                "jyutping" => {
                    let (base, tone) = self.primary(ch, 0, surname_ctx)?;
                    format!("{base}{tone}")
                }
                "pinyin" => {
                    let (base, tone) = self.primary(ch, 1, surname_ctx)?;
                    format!("{base}{tone}")
                }
                "pinyin_notone" => self.primary(ch, 1, surname_ctx)?.0.replace('v', "ü"),
                "hkg" => self.hkg_canonical(ch)?,
                _ => unreachable!(),
            };
            tokens.push(token);
        }
        Some(match scheme {
            "pinyin" | "pinyin_notone" => tokens.concat(),
            _ => tokens.join(" "),
        })
    }

    fn fullname(&self, sur: &str, fore: &str, scheme: &str) -> Option<String> {
        if scheme == "chinese" {
            return Some(format!("{sur}{fore}"));
        }
        let s = self.field(sur, scheme, true)?;
        let f = self.field(fore, scheme, false)?;
        Some(if f.is_empty() { s } else { format!("{s} {f}") })
    }

    /// Jyutping and Pinyin tone sequences of a full name.
    fn tones(&self, sur: &str, fore: &str, scheme: usize) -> Option<Vec<u8>> {
        let mut seq = Vec::new();
        for ch in sur.chars() {
            seq.push(self.primary(ch, scheme, true)?.1);
        }
        for ch in fore.chars() {
            seq.push(self.primary(ch, scheme, false)?.1);
        }
        Some(seq)
    }
}

/// The bundled corpus rows, parsed with nothing but line splitting (the
/// file is comma-free by construction).
fn corpus_rows() -> Vec<(String, String)> {
    let src = read_data("corpus_100.csv");
    src.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 3, "unexpected corpus row: {l}");
            (cols[1].to_string(), cols[2].to_string())
        })
        .collect()
}

const SCHEMES: [&str; 5] = ["chinese", "jyutping", "pinyin", "pinyin_notone", "hkg"];

/// Distinct-count grid per (part, scheme) recomputed from raw files.
fn oracle_grid() -> BTreeMap<(&'static str, &'static str), usize> {
    let oracle = Oracle::load();
    let mut sets: BTreeMap<(&'static str, &'static str), BTreeSet<String>> = BTreeMap::new();
    for (chinese, _) in corpus_rows() {
        let (sur, fore) = oracle.segment(&chinese);
        for scheme in SCHEMES {
            if let Some(v) = oracle.field(&sur, scheme, true) {
                sets.entry(("surname", scheme)).or_default().insert(v);
            }
            if let Some(v) = oracle.field(&fore, scheme, false) {
                sets.entry(("forename", scheme)).or_default().insert(v);
            }
            if let Some(v) = oracle.fullname(&sur, &fore, scheme) {
                sets.entry(("fullname", scheme)).or_default().insert(v);
            }
        }
    }
    sets.into_iter().map(|(k, v)| (k, v.len())).collect()
}

// ---------------------------------------------------------------- criteria

#[test]
fn criterion_01_reference_mappings() {
    check(1, "reference mappings", Duration::from_secs(1), || {
        let d = Dictionary::bundled();
        let t = HkgVariantTable::bundled();
        let pri = |ch: char, s: Scheme| {
            d.primary_reading(ch, s, NameContext::Surname)
                .map(|r| render_syllable(&r.syllable, RenderStyle::Numeric).unwrap())
                .unwrap_or_default()
        };
        for (ch, jyut) in [('楊', "joeng4"), ('周', "zau1"), ('黃', "wong4"), ('王', "wong4"), ('趙', "ziu6"), ('邱', "jau1")] {
            expect!(pri(ch, Scheme::Jyutping) == jyut, "{ch} jyutping = {}, want {jyut}", pri(ch, Scheme::Jyutping));
        }
        for (ch, pin) in [('周', "zhou1"), ('颜', "yan2"), ('严', "yan2"), ('趙', "zhao4"), ('邱', "qiu1")] {
            expect!(pri(ch, Scheme::Pinyin) == pin, "{ch} pinyin = {}, want {pin}", pri(ch, Scheme::Pinyin));
        }
        let yeung: BTreeSet<String> = hkg_variants('楊', t);
        let want: BTreeSet<String> =
            ["yeung", "yang", "young", "yep", "yong", "yeang", "yung"].iter().map(|s| s.to_string()).collect();
        expect!(yeung == want, "楊 variants {yeung:?} != the seven-item list");
        let chow = hkg_variants('周', t);
        for v in ["chow", "chau", "chiau"] {
            expect!(chow.contains(v), "周 variants missing {v}");
        }
        Ok("12 character mappings + variant lists exact".to_string())
    });
}

#[test]
fn criterion_02_table2() {
    check(2, "distinct-value grid", Duration::from_secs(5), || {
        if let Some(path) = reference_corpus() {
            let text = run_kv(&["stats", "--input", path.to_str().unwrap()])?;
            let table: [(&str, [usize; 5], [&str; 4]); 3] = [
                ("surname", [123, 117, 120, 108, 152], ["-4.9%", "-2.4%", "-12.2%", "+23.6%"]),
                ("forename", [743, 642, 679, 648, 687], ["-13.6%", "-8.6%", "-12.8%", "-7.5%"]),
                ("fullname", [771, 767, 769, 763, 770], ["-0.5%", "-0.3%", "-1.0%", "-0.1%"]),
            ];
            for (part, counts, deltas) in table {
                for (scheme, want) in SCHEMES.iter().zip(counts) {
                    let got = kv_lookup(&text, &[("kind", "distinct_values"), ("field", part)], scheme)
                        .ok_or_else(|| format!("no {part}/{scheme} cell"))?;
                    let count: usize = got
                        .split(' ')
                        .next()
                        .unwrap()
                        .parse()
                        .map_err(|_| format!("unparseable cell `{got}`"))?;
                    expect!(count == want, "{part}/{scheme}: {count}, published {want}");
                    if *scheme != "chinese" {
                        let idx = SCHEMES.iter().position(|s| s == scheme).unwrap() - 1;
                        expect!(
                            got.contains(deltas[idx]),
                            "{part}/{scheme}: `{got}` missing delta {}",
                            deltas[idx]
                        );
                    }
                }
            }
            return Ok("published dataset matches Table 2 exactly".to_string());
        }
        // substitute: independent re-derivation of every count from the raw
        // data files, checked against both the library and the binary
        let oracle = oracle_grid();
        let records = bundled_processed(false);
        let stats = compute_corpus_stats(&records, Dictionary::bundled(), HkgVariantTable::bundled())
            .map_err(|e| e.to_string())?;
        let text = run_kv(&["stats"])?;
        for part in NamePart::ALL {
            for scheme in StatScheme::ALL {
                let want = oracle[&(part.name(), scheme.name())];
                let cell = &stats.cells[&(part, scheme)];
                expect!(
                    cell.unique == want,
                    "library {}/{}: {} vs oracle {want}",
                    part.name(),
                    scheme.name(),
                    cell.unique
                );
                expect!(cell.excluded == 0, "{}/{} excluded {}", part.name(), scheme.name(), cell.excluded);
                let got = kv_lookup(&text, &[("kind", "distinct_values"), ("field", part.name())], scheme.name())
                    .ok_or_else(|| format!("no {}/{} cell in CLI output", part.name(), scheme.name()))?;
                let expected_cell = match cell.delta_pct {
                    None => want.to_string(),
                    Some(d) => format!("{want} ({})", format_delta_pct(d)),
                };
                expect!(got == expected_cell, "CLI cell `{got}` != `{expected_cell}`");
            }
        }
        Ok("published dataset absent; 15-cell bundled grid equals the file-level oracle".to_string())
    });
}

#[test]
fn criterion_03_table1() {
    check(3, "composition splits", Duration::from_secs(5), || {
        if let Some(path) = reference_corpus() {
            let text = run_kv(&["stats", "--input", path.to_str().unwrap(), "--strict-origin"])?;
            let want = [
                ("forename romanised_only", 647),
                ("forename english_only", 27),
                ("forename mixed", 97),
                ("origin cantonese", 751),
                ("origin mandarin", 20),
            ];
            for (measure, count) in want {
                let got = kv_lookup(&text, &[("kind", "corpus"), ("measure", measure)], "value")
                    .ok_or_else(|| format!("missing `{measure}`"))?;
                expect!(got == count.to_string(), "{measure}: {got}, published {count}");
            }
            return Ok("published dataset matches Table 1 splits exactly".to_string());
        }
        // substitute: the bundled composition, cross-checked between the
        // library and the binary, plus the strict-mode folding identity
        let loose = bundled_processed(false);
        let strict = bundled_processed(true);
        let tally = |records: &[hanlink_core::corpusio::ProcessedRecord], f: &dyn Fn(&hanlink_core::corpusio::ProcessedRecord) -> String| {
            let mut m: BTreeMap<String, usize> = BTreeMap::new();
            for r in records {
                *m.entry(f(r)).or_default() += 1;
            }
            m
        };
        let kinds = tally(&loose, &|r| r.forename_kind.name().to_string());
        expect!(kinds.get("romanised_only") == Some(&93), "romanised_only {kinds:?}");
        expect!(kinds.get("english_only") == Some(&4), "english_only {kinds:?}");
        expect!(kinds.get("mixed") == Some(&3), "mixed {kinds:?}");
        let loose_origins = tally(&loose, &|r| r.origin.name().to_string());
        let strict_origins = tally(&strict, &|r| r.origin.name().to_string());
        expect!(strict_origins.get("unknown").is_none(), "strict mode left unknowns: {strict_origins:?}");
        expect!(
            strict_origins.get("cantonese").copied().unwrap_or(0)
                == loose_origins.get("cantonese").copied().unwrap_or(0)
                    + loose_origins.get("unknown").copied().unwrap_or(0),
            "strict fold identity broken: {loose_origins:?} vs {strict_origins:?}"
        );
        expect!(strict_origins.get("cantonese") == Some(&95), "strict cantonese {strict_origins:?}");
        expect!(strict_origins.get("mandarin") == Some(&5), "strict mandarin {strict_origins:?}");
        let text = run_kv(&["stats", "--strict-origin"])?;
        for (measure, count) in
            [("forename romanised_only", 93), ("origin cantonese", 95), ("origin mandarin", 5)]
        {
            let got = kv_lookup(&text, &[("kind", "corpus"), ("measure", measure)], "value")
                .ok_or_else(|| format!("missing `{measure}`"))?;
            expect!(got == count.to_string(), "CLI {measure}: {got} != {count}");
        }
        Ok("published dataset absent; bundled splits 93/4/3 and 95/5 verified on both paths".to_string())
    });
}

#[test]
fn criterion_04_figure2() {
    check(4, "tone-combination coverage", Duration::from_secs(10), || {
        if let Some(path) = reference_corpus() {
            for (scheme, want) in [("jyutping", 38.3f64), ("pinyin", 45.0f64)] {
                let text =
                    run_kv(&["tones", "--input", path.to_str().unwrap(), "--schemes", scheme, "--k", "10"])?;
                let got = kv_lookup(&text, &[("kind", "summary"), ("measure", "top-10 coverage")], "value")
                    .ok_or("missing coverage line")?;
                let got: f64 = got.trim_end_matches('%').parse().map_err(|_| format!("bad `{got}`"))?;
                expect!((got - want).abs() <= 0.1, "{scheme} coverage {got} vs published {want}");
            }
            return Ok("published coverage 38.3% / 45.0% reproduced".to_string());
        }
        // substitute: tallies equal the file-level oracle, coverage is
        // monotone in k, and the binary agrees with the library
        let oracle = Oracle::load();
        let records = bundled_processed(false);
        for (scheme, stat, idx) in
            [("jyutping", StatScheme::Jyutping, 0usize), ("pinyin", StatScheme::Pinyin, 1usize)]
        {
            let freq = tone_combo_distribution(&records, Dictionary::bundled(), stat, None)
                .map_err(|e| e.to_string())?;
            let mut hand: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
            for (chinese, _) in corpus_rows() {
                let (sur, fore) = oracle.segment(&chinese);
                let seq = oracle.tones(&sur, &fore, idx).ok_or(format!("oracle gap in {chinese}"))?;
                *hand.entry(seq).or_default() += 1;
            }
            expect!(freq.counts == hand, "{scheme} tallies diverge from the oracle");
            let mut last = 0.0;
            for k in 1..=freq.counts.len() + 1 {
                let c = topk_coverage(&freq, k).map_err(|e| e.to_string())?;
                expect!(c >= last, "{scheme} coverage shrank at k={k}");
                last = c;
            }
            expect!((last - 1.0).abs() < 1e-12, "{scheme} full coverage != 1");
            let expected = format!("{:.1}%", topk_coverage(&freq, 10).unwrap() * 100.0);
            let text = run_kv(&["tones", "--schemes", scheme, "--k", "10"])?;
            let got = kv_lookup(&text, &[("kind", "summary"), ("measure", "top-10 coverage")], "value")
                .ok_or("missing coverage line")?;
            expect!(got == expected, "{scheme} CLI coverage {got} != {expected}");
        }
        Ok("published dataset absent; tallies equal the oracle, coverage monotone".to_string())
    });
}

#[test]
fn criterion_05_syllable_round_trip() {
    check(5, "syllable round trip", Duration::from_secs(10), || {
        let mut cases = 0usize;
        for base in legal_bases(Scheme::Jyutping) {
            for tone in 1..=6u8 {
                let text = format!("{base}{tone}");
                let syl = parse_syllable(&text, Scheme::Jyutping).map_err(|e| e.to_string())?;
                expect!(
                    render_syllable(&syl, RenderStyle::Numeric).unwrap() == text,
                    "jyutping {text} does not round-trip"
                );
                cases += 1;
            }
        }
        let mut marked_forms = BTreeSet::new();
        let mut pinyin_cases = 0usize;
        for base in legal_bases(Scheme::Pinyin) {
            for tone in 1..=5u8 {
                let syl = hanlink_core::Syllable::new(base, tone, Scheme::Pinyin)
                    .map_err(|e| e.to_string())?;
                let numeric = render_syllable(&syl, RenderStyle::Numeric).unwrap();
                let reparsed = parse_syllable(&numeric, Scheme::Pinyin).map_err(|e| e.to_string())?;
                expect!(reparsed == syl, "pinyin {numeric} does not round-trip numerically");
                let marked = render_syllable(&syl, RenderStyle::Diacritic).unwrap();
                let reparsed = parse_syllable(&marked, Scheme::Pinyin).map_err(|e| e.to_string())?;
                expect!(reparsed == syl, "pinyin {marked} does not round-trip through diacritics");
                marked_forms.insert(marked);
                pinyin_cases += 1;
            }
        }
        expect!(
            marked_forms.len() == pinyin_cases,
            "diacritic rendering is not injective: {} forms from {pinyin_cases} syllables",
            marked_forms.len()
        );
        expect!(
            render_syllable(
                &hanlink_core::Syllable::new("zau", 1, Scheme::Jyutping).unwrap(),
                RenderStyle::Diacritic
            )
            .is_err(),
            "jyutping accepted a diacritic rendering"
        );
        Ok(format!("{cases} jyutping + {pinyin_cases} pinyin syllables, bijective diacritics"))
    });
}

#[test]
fn criterion_06_tone_model_arithmetic() {
    check(6, "tone model arithmetic", Duration::from_secs(5), || {
        let mut seqs = vec![vec![2u8, 3, 2]; 4];
        seqs.push(vec![2, 3, 4]);
        let model = ToneNgramModel::fit(&seqs, 3, Scheme::Pinyin, 1.0).map_err(|e| e.to_string())?;
        let dist = model.next_tone_distribution(&[2, 3]);
        expect!(dist[1] == 0.5, "P(2|2,3) = {}, want exactly 0.5", dist[1]);
        expect!(dist[3] == 0.2, "P(4|2,3) = {}, want exactly 0.2", dist[3]);
        let ratio = model.likelihood_ratio(&[2, 3], 2, 4);
        expect!(ratio == 2.5, "ratio = {ratio}, want exactly 2.5");
        // 1,000 generated queries: every distribution is a probability mass
        let mut state = 0x243F6A8885A308D3u64; // xorshift; fixed seed
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for scheme in [Scheme::Jyutping, Scheme::Pinyin] {
            let training: Vec<Vec<u8>> = (0..50)
                .map(|_| (0..3).map(|_| (next() % scheme.max_tone() as u64) as u8 + 1).collect())
                .collect();
            let model = ToneNgramModel::fit(&training, 3, scheme, 0.7).map_err(|e| e.to_string())?;
            for _ in 0..500 {
                let len = (next() % 4) as usize;
                let prefix: Vec<u8> =
                    (0..len).map(|_| (next() % scheme.max_tone() as u64) as u8 + 1).collect();
                let dist = model.next_tone_distribution(&prefix);
                let sum: f64 = dist.iter().sum();
                expect!((sum - 1.0).abs() <= 1e-9, "{prefix:?}: sum {sum}");
                expect!(dist.iter().all(|p| *p > 0.0), "{prefix:?}: zero mass");
            }
        }
        Ok("worked example exact; 1000 query distributions sum to 1".to_string())
    });
}

#[test]
fn criterion_07_zipf_sanity() {
    check(7, "zipf fit sanity", Duration::from_secs(1), || {
        let synthetic: Vec<u64> =
            (1..=20u64).map(|r| ((1000.0 / r as f64).round()) as u64).collect();
        let fit = zipf_fit_counts(&synthetic).map_err(|e| e.to_string())?;
        expect!((fit.exponent - 1.0).abs() <= 0.05, "synthetic exponent {}", fit.exponent);
        let uniform = vec![17u64; 12];
        let fit = zipf_fit_counts(&uniform).map_err(|e| e.to_string())?;
        expect!(fit.exponent.abs() <= 0.05, "uniform exponent {}", fit.exponent);
        Ok("1/r exponent within 1±0.05, uniform within 0±0.05".to_string())
    });
}

#[test]
fn criterion_08_linkage_directions() {
    check(8, "linkage directional claims", Duration::from_secs(60), || {
        let d = Dictionary::bundled();
        let t = HkgVariantTable::bundled();
        let names: Vec<_> = bundled_processed(false).into_iter().filter_map(|r| r.name).collect();
        let base = replicate_names(&names, 500);
        let pm = PerturbationModel { p_hkg_variant: 0.3, seed: 20260814, ..Default::default() };
        let corpus = generate_pair_corpus(&base, &pm, SchemeRendering::Hkg, d, t)
            .map_err(|e| e.to_string())?;
        let fraction =
            corpus.log.syllables_perturbed as f64 / corpus.log.syllables_total as f64;
        expect!((fraction - 0.3).abs() <= 0.07, "perturbed fraction {fraction}");

        // (a) Jyutping-normalised vs raw-HKG recall, oracle- and block-level
        let raw_oracle =
            run_linkage_all_pairs(&corpus, Comparator::Exact, SchemeRendering::Hkg, 1.0, d, t)
                .map_err(|e| e.to_string())?;
        let norm_oracle =
            run_linkage_all_pairs(&corpus, Comparator::Exact, SchemeRendering::Jyutping, 1.0, d, t)
                .map_err(|e| e.to_string())?;
        expect!(
            norm_oracle.recall > raw_oracle.recall,
            "all-pairs: normalised {} !> raw {}",
            norm_oracle.recall,
            raw_oracle.recall
        );
        let spec = |scheme| BlockingKeySpec {
            scheme: BlockScheme::Rendering(scheme),
            field: NamePart::Surname,
            transform: KeyTransform::Full,
        };
        let raw = run_linkage(&corpus, &spec(SchemeRendering::Hkg), Comparator::Exact, SchemeRendering::Hkg, 1.0, d, t)
            .map_err(|e| e.to_string())?;
        let norm = run_linkage(&corpus, &spec(SchemeRendering::Jyutping), Comparator::Exact, SchemeRendering::Jyutping, 1.0, d, t)
            .map_err(|e| e.to_string())?;
        expect!(norm.recall > raw.recall, "blocked: normalised {} !> raw {}", norm.recall, raw.recall);
        expect!(raw.recall <= raw_oracle.recall + 1e-12, "blocked raw recall exceeds its oracle");
        expect!(norm.recall <= norm_oracle.recall + 1e-12, "blocked normalised recall exceeds its oracle");
        expect!(
            raw.true_matches_found + raw.missed_matches == corpus.truth.len(),
            "raw TP+FN != |truth|"
        );

        // (b) ABE first-syllable forename blocking widens candidates and
        // false matches
        let abe = BlockingKeySpec {
            scheme: BlockScheme::Rendering(SchemeRendering::Hkg),
            field: NamePart::Forename,
            transform: KeyTransform::FirstSyllableAbe,
        };
        let full = BlockingKeySpec { transform: KeyTransform::Full, ..abe };
        let abe_run = run_linkage(&corpus, &abe, Comparator::PerSyllableAgreement, SchemeRendering::Jyutping, 0.5, d, t)
            .map_err(|e| e.to_string())?;
        let full_run = run_linkage(&corpus, &full, Comparator::PerSyllableAgreement, SchemeRendering::Jyutping, 0.5, d, t)
            .map_err(|e| e.to_string())?;
        expect!(
            abe_run.candidate_pairs >= full_run.candidate_pairs,
            "ABE candidates {} < full {}",
            abe_run.candidate_pairs,
            full_run.candidate_pairs
        );
        expect!(
            abe_run.false_matches >= full_run.false_matches,
            "ABE false matches {} < full {}",
            abe_run.false_matches,
            full_run.false_matches
        );
        Ok(format!(
            "recall {:.3}→{:.3} (oracle {:.3}→{:.3}); ABE pairs {}≥{}, false {}≥{}",
            raw.recall,
            norm.recall,
            raw_oracle.recall,
            norm_oracle.recall,
            abe_run.candidate_pairs,
            full_run.candidate_pairs,
            abe_run.false_matches,
            full_run.false_matches
        ))
    });
}

#[test]
fn criterion_09_determinism() {
    check(9, "byte-identical reruns", Duration::from_secs(60), || {
        let dir = tempfile::tempdir().unwrap();
        let mini = dir.path().join("mini.csv");
        std::fs::write(
            &mini,
            "record_id,chinese_name,english_name\nT1,周永明,Chow Wing Ming\nT2,歐陽俊熙,Au Yeung Chun Hei\n",
        )
        .unwrap();
        let queries = dir.path().join("q.txt");
        std::fs::write(&queries, "2,3,_\n_,1,4\n").unwrap();
        let mini_s = mini.to_str().unwrap();
        let q_s = queries.to_str().unwrap();
        let runs: Vec<Vec<&str>> = vec![
            vec!["convert", "--input", mini_s, "--classify"],
            vec!["stats", "--format", "kv"],
            vec!["tones", "--schemes", "pinyin", "--k", "5"],
            vec!["impute", "--queries", q_s, "--schemes", "jyutping", "--ratio", "2,4"],
            vec![
                "linksim", "--schemes", "hkg", "--n", "150", "--seed", "99",
                "--perturb-hkg-variant", "0.4", "--perturb-tone-drop", "0.2",
                "--perturb-order-swap", "0.1", "--perturb-middle-split", "0.2",
                "--normalise", "jyutping", "--comparator", "per_syllable",
                "--threshold", "0.5", "--oracle", "--strategy", "jyutping:surname:full",
                "--strategy", "hkg:forename:first_syllable_abe",
            ],
            vec!["variants", "楊"],
        ];
        for args in &runs {
            let first = hanlink(args);
            let second = hanlink(args);
            expect!(
                first.status.code() == second.status.code(),
                "`hanlink {}`: exit codes differ",
                args.join(" ")
            );
            expect!(
                first.stdout == second.stdout,
                "`hanlink {}`: stdout differs between runs",
                args.join(" ")
            );
        }
        // file outputs too
        let out1 = dir.path().join("a.csv");
        let out2 = dir.path().join("b.csv");
        for out in [&out1, &out2] {
            let st = hanlink(&["convert", "--input", mini_s, "--output", out.to_str().unwrap()]);
            expect!(st.status.code() == Some(0), "convert to file failed");
        }
        expect!(
            std::fs::read(&out1).unwrap() == std::fs::read(&out2).unwrap(),
            "file outputs differ"
        );
        Ok(format!("{} subcommands byte-identical across reruns", runs.len()))
    });
}
