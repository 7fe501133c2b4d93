//! Two-file record-linkage simulation: perturb romanised copies of a name
//! corpus under a seeded noise model, block on configurable keys, compare
//! candidate pairs (optionally normalising HKG spellings to Jyutping), and
//! score the decisions against the synthetic ground truth.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::namekit::{detect_order, repair_misplaced_middle, HanName, NameOrder};
use crate::prondict::Dictionary;
use crate::romanise::{
    hkg_candidates, romanise_name, HkgVariantTable, RomaniseError, SchemeRendering,
};
use crate::stats::NamePart;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationModel {
    /// Per syllable: replace an HKG spelling with a different variant of the
    /// same character (effective only when the corpus scheme is HKG).
    pub p_hkg_variant: f64,
    /// Per record: strip tone digits from every token.
    pub p_tone_drop: f64,
    /// Per record: swap the surname and forename field contents.
    pub p_order_swap: f64,
    /// Per record: move all but the first forename token into a middle-name
    /// field.
    pub p_middle_split: f64,
    pub seed: u64,
}

impl Default for PerturbationModel {
    fn default() -> Self {
        PerturbationModel {
            p_hkg_variant: 0.0,
            p_tone_drop: 0.0,
            p_order_swap: 0.0,
            p_middle_split: 0.0,
            seed: 0,
        }
    }
}

impl PerturbationModel {
    pub fn validate(&self) -> Result<(), LinkError> {
        for (name, p) in [
            ("p_hkg_variant", self.p_hkg_variant),
            ("p_tone_drop", self.p_tone_drop),
            ("p_order_swap", self.p_order_swap),
            ("p_middle_split", self.p_middle_split),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(LinkError::Probability { name, value: p });
            }
        }
        Ok(())
    }
}

/// One observed record in a simulated file. Tokens are per-character
/// syllables in `scheme`; `name` is the underlying truth used only where the
/// simulation posits character data (e.g. Chinese-character blocking).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimRecord {
    pub id: String,
    pub name: HanName,
    pub scheme: SchemeRendering,
    pub surname_field: Vec<String>,
    pub forename_field: Vec<String>,
    pub middle_field: Vec<String>,
    pub tones_dropped: bool,
    pub fields_swapped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PerturbationLog {
    pub syllables_total: usize,
    /// Syllables the variant perturbation selected (including fallbacks that
    /// kept the canonical spelling for lack of an alternative).
    pub syllables_perturbed: usize,
    /// Syllables whose spelling actually changed.
    pub syllables_swapped: usize,
    pub records_tone_dropped: usize,
    pub records_order_swapped: usize,
    pub records_middle_split: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCorpus {
    pub file_a: Vec<SimRecord>,
    pub file_b: Vec<SimRecord>,
    /// Identity pairing (id in A, id in B).
    pub truth: Vec<(String, String)>,
    pub log: PerturbationLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyTransform {
    Full,
    FirstSyllableAbe,
    Toneless,
}

impl KeyTransform {
    pub fn name(self) -> &'static str {
        match self {
            KeyTransform::Full => "full",
            KeyTransform::FirstSyllableAbe => "first_syllable_abe",
            KeyTransform::Toneless => "toneless",
        }
    }

    pub fn from_name(s: &str) -> Option<KeyTransform> {
        match s.to_lowercase().as_str() {
            "full" => Some(KeyTransform::Full),
            "first_syllable_abe" | "abe" => Some(KeyTransform::FirstSyllableAbe),
            "toneless" => Some(KeyTransform::Toneless),
            _ => None,
        }
    }
}

/// Key scheme for blocking: a rendering, or None for raw Chinese characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockScheme {
    Chinese,
    Rendering(SchemeRendering),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockingKeySpec {
    pub scheme: BlockScheme,
    pub field: NamePart,
    pub transform: KeyTransform,
}

impl BlockingKeySpec {
    pub fn validate(&self) -> Result<(), LinkError> {
        if self.transform == KeyTransform::Toneless {
            let tonal = matches!(
                self.scheme,
                BlockScheme::Rendering(SchemeRendering::Jyutping)
                    | BlockScheme::Rendering(SchemeRendering::PinyinNumeric)
                    | BlockScheme::Rendering(SchemeRendering::PinyinDiacritic)
            );
            if !tonal {
                return Err(LinkError::TonelessNonTonal);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparator {
    Exact,
    PerSyllableAgreement,
}

impl Comparator {
    pub fn name(self) -> &'static str {
        match self {
            Comparator::Exact => "exact",
            Comparator::PerSyllableAgreement => "per_syllable",
        }
    }

    pub fn from_name(s: &str) -> Option<Comparator> {
        match s.to_lowercase().as_str() {
            "exact" => Some(Comparator::Exact),
            "per_syllable" | "per_syllable_agreement" => Some(Comparator::PerSyllableAgreement),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinkageResult {
    pub true_matches_found: usize,
    pub false_matches: usize,
    pub missed_matches: usize,
    /// Truth pairs that never became candidates (blocking removed them);
    /// included in missed_matches, reported separately.
    pub blocked_out_misses: usize,
    pub candidate_pairs: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// False when no links were declared: precision is then reported as 0 by
    /// convention.
    pub precision_defined: bool,
}

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("{name} must be in [0,1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("threshold must be in [0,1], got {0}")]
    Threshold(f64),
    #[error("toneless transform requires a tonal scheme")]
    TonelessNonTonal,
    #[error("cannot derive {wanted} blocking keys from {have} records")]
    UnsupportedScheme { have: &'static str, wanted: &'static str },
    #[error("empty token sequence")]
    EmptyTokens,
    #[error(transparent)]
    Render(#[from] RomaniseError),
}

/// Cycle through `names` until `n` records exist.
pub fn replicate_names(names: &[HanName], n: usize) -> Vec<(String, HanName)> {
    (0..n).map(|i| (format!("r{i:04}"), names[i % names.len()].clone())).collect()
}

fn canonical_record(
    id: &str,
    name: &HanName,
    scheme: SchemeRendering,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Result<SimRecord, LinkError> {
    let rn = romanise_name(name, dict, table, scheme)?;
    Ok(SimRecord {
        id: id.to_string(),
        name: name.clone(),
        scheme,
        surname_field: rn.surname,
        forename_field: rn.forename,
        middle_field: Vec::new(),
        tones_dropped: false,
        fields_swapped: false,
    })
}

fn strip_tone_digits(token: &str) -> String {
    token.trim_end_matches(|c: char| c.is_ascii_digit()).to_string()
}

/// HKG spellings of a character, following the variant-twin fallback the
/// renderer uses for characters listed under the other script.
pub fn hkg_spellings<'t>(
    ch: char,
    dict: &Dictionary,
    table: &'t HkgVariantTable,
) -> &'t [String] {
    let direct = table.variants(ch);
    if direct.is_empty() {
        if let Some(twin) = dict.variant_of(ch) {
            return table.variants(twin);
        }
    }
    direct
}

/// Build the two files plus ground truth. The generator is consumed in a
/// fixed order per record — surname-syllable draws, forename-syllable draws,
/// tone-drop, order-swap, middle-split, every draw taken whether or not it
/// has an effect — so a replay with the same seed reproduces each decision.
/// A variant swap picks uniformly among the character's other spellings;
/// characters with a single spelling fall back to it with a logged note.
pub fn generate_pair_corpus(
    base: &[(String, HanName)],
    pm: &PerturbationModel,
    scheme: SchemeRendering,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Result<PairCorpus, LinkError> {
    pm.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(pm.seed);
    let mut corpus = PairCorpus {
        file_a: Vec::with_capacity(base.len()),
        file_b: Vec::with_capacity(base.len()),
        truth: Vec::with_capacity(base.len()),
        log: PerturbationLog::default(),
    };
    for (id, name) in base {
        let clean = canonical_record(id, name, scheme, dict, table)?;
        let mut noisy = clean.clone();
        let chars: Vec<char> = name.chars().collect();
        let sur_len = noisy.surname_field.len();
        for (pos, ch) in chars.iter().enumerate() {
            corpus.log.syllables_total += 1;
            let wants_swap = rng.random::<f64>() < pm.p_hkg_variant;
            if !wants_swap || scheme != SchemeRendering::Hkg {
                continue;
            }
            corpus.log.syllables_perturbed += 1;
            let token = if pos < sur_len {
                &mut noisy.surname_field[pos]
            } else {
                &mut noisy.forename_field[pos - sur_len]
            };
            let alternatives: Vec<&String> =
                hkg_spellings(*ch, dict, table).iter().filter(|v| *v != token).collect();
            if alternatives.is_empty() {
                corpus.log.notes.push(format!(
                    "{id}: `{ch}` has no alternative spelling; kept `{token}`"
                ));
                continue;
            }
            *token = alternatives[rng.random_range(0..alternatives.len())].clone();
            corpus.log.syllables_swapped += 1;
        }
        if rng.random::<f64>() < pm.p_tone_drop {
            if matches!(scheme, SchemeRendering::Jyutping | SchemeRendering::PinyinNumeric) {
                for t in noisy.surname_field.iter_mut().chain(&mut noisy.forename_field) {
                    *t = strip_tone_digits(t);
                }
                noisy.tones_dropped = true;
                corpus.log.records_tone_dropped += 1;
            }
        }
        if rng.random::<f64>() < pm.p_order_swap {
            std::mem::swap(&mut noisy.surname_field, &mut noisy.forename_field);
            noisy.fields_swapped = true;
            corpus.log.records_order_swapped += 1;
        }
        if rng.random::<f64>() < pm.p_middle_split && noisy.forename_field.len() >= 2 {
            noisy.middle_field = noisy.forename_field.split_off(1);
            corpus.log.records_middle_split += 1;
        }
        corpus.truth.push((clean.id.clone(), noisy.id.clone()));
        corpus.file_a.push(clean);
        corpus.file_b.push(noisy);
    }
    Ok(corpus)
}

/// First token, lowercased: the officer-style cluster key for multi-part
/// forenames.
pub fn abe_cluster(forename_tokens: &[String]) -> Result<String, LinkError> {
    forename_tokens.first().map(|t| t.to_lowercase()).ok_or(LinkError::EmptyTokens)
}

/// Jyutping strings a token may stand for, via the HKG table. In surname
/// position the candidate characters narrow to surname-table members unless
/// that empties the set.
fn jyutping_set(
    token: &str,
    surname_position: bool,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> BTreeSet<String> {
    let cands = hkg_candidates(token, table, dict);
    let filtered: Vec<_> = if surname_position {
        let f: Vec<_> =
            cands.iter().filter(|(ch, _)| dict.is_surname(&ch.to_string())).cloned().collect();
        if f.is_empty() {
            cands
        } else {
            f
        }
    } else {
        cands
    };
    filtered.into_iter().map(|(_, syl)| syl.to_string()).collect()
}

fn observed_tokens(record: &SimRecord, field: NamePart) -> Vec<(String, bool)> {
    let tag = |v: &[String], surname: bool| -> Vec<(String, bool)> {
        v.iter().map(|t| (t.clone(), surname)).collect()
    };
    match field {
        NamePart::Surname => tag(&record.surname_field, true),
        NamePart::Forename => {
            let mut t = tag(&record.forename_field, false);
            t.extend(tag(&record.middle_field, false));
            t
        }
        NamePart::FullName => {
            let mut t = tag(&record.surname_field, true);
            t.extend(tag(&record.forename_field, false));
            t.extend(tag(&record.middle_field, false));
            t
        }
    }
}

/// The blocking key of one record under a spec, or an error naming the
/// unsupported combination.
pub fn blocking_key(
    record: &SimRecord,
    spec: &BlockingKeySpec,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Result<String, LinkError> {
    spec.validate()?;
    if let BlockScheme::Chinese = spec.scheme {
        let key = match spec.field {
            NamePart::Surname => record.name.surname.clone(),
            NamePart::Forename => record.name.forename.clone(),
            NamePart::FullName => record.name.full(),
        };
        return Ok(match spec.transform {
            KeyTransform::Full => key,
            KeyTransform::FirstSyllableAbe => key.chars().take(1).collect(),
            KeyTransform::Toneless => unreachable!("validate rejects toneless Chinese"),
        });
    }
    let BlockScheme::Rendering(wanted) = spec.scheme else { unreachable!() };
    let mut tokens = observed_tokens(record, spec.field);
    if spec.transform == KeyTransform::FirstSyllableAbe {
        if tokens.is_empty() {
            return Err(LinkError::EmptyTokens);
        }
        tokens.truncate(1);
    }
    let rendered: Result<Vec<String>, LinkError> = tokens
        .iter()
        .map(|(t, surname_pos)| {
            if wanted == record.scheme {
                Ok(match spec.transform {
                    KeyTransform::Toneless => strip_tone_digits(t),
                    _ => t.clone(),
                })
            } else if record.scheme == SchemeRendering::Hkg && wanted == SchemeRendering::Jyutping
            {
                let set = jyutping_set(t, *surname_pos, dict, table);
                let key: Vec<String> = set.into_iter().collect();
                Ok(match spec.transform {
                    KeyTransform::Toneless => key
                        .iter()
                        .map(|k| strip_tone_digits(k))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect::<Vec<_>>()
                        .join("|"),
                    _ => key.join("|"),
                })
            } else {
                Err(LinkError::UnsupportedScheme {
                    have: record.scheme.name(),
                    wanted: wanted.name(),
                })
            }
        })
        .collect();
    Ok(rendered?.join(" ").to_lowercase())
}

#[derive(Clone, Debug, Default)]
pub struct Blocking {
    pub keys: BTreeMap<String, Vec<usize>>,
    pub excluded: Vec<String>,
}

/// Group record indices by blocking key; records that cannot produce a key
/// are excluded with a warning.
pub fn block(
    records: &[SimRecord],
    spec: &BlockingKeySpec,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Blocking {
    let mut out = Blocking::default();
    for (i, r) in records.iter().enumerate() {
        match blocking_key(r, spec, dict, table) {
            Ok(key) => out.keys.entry(key).or_default().push(i),
            Err(e) => out.excluded.push(format!("{}: {e}", r.id)),
        }
    }
    out
}

/// Fold middle tokens back into the forename and undo an apparent
/// surname/forename swap (detected from which end carries a known surname
/// romanisation).
fn effective_fields(
    record: &SimRecord,
    surname_roms: &BTreeSet<String>,
) -> (Vec<String>, Vec<String>) {
    let (sur, fore) = repair_misplaced_middle(
        &record.surname_field,
        &record.forename_field,
        &record.middle_field,
    );
    let seq: Vec<&str> = sur.iter().chain(&fore).map(String::as_str).collect();
    if detect_order(&seq, surname_roms) == NameOrder::SurnameLast && !fore.is_empty() {
        let split = fore.len() - 1;
        let new_sur = fore[split..].to_vec();
        let mut new_fore = sur;
        new_fore.extend_from_slice(&fore[..split]);
        return (new_sur, new_fore);
    }
    (sur, fore)
}

/// Equivalence sets per aligned position: two positions agree when their
/// sets intersect. A record already in the normalisation scheme contributes
/// the singleton of its token.
fn position_sets(
    record: &SimRecord,
    normalisation: SchemeRendering,
    surname_roms: &BTreeSet<String>,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Vec<BTreeSet<String>> {
    let (sur, fore) = effective_fields(record, surname_roms);
    let sur_len = sur.len();
    sur.into_iter()
        .chain(fore)
        .enumerate()
        .map(|(i, t)| {
            if record.scheme == SchemeRendering::Hkg && normalisation == SchemeRendering::Jyutping
            {
                jyutping_set(&t, i < sur_len, dict, table)
            } else if record.scheme == SchemeRendering::Jyutping
                && normalisation == SchemeRendering::Jyutping
                && record.tones_dropped
            {
                // a tone-dropped token stays as written; it simply fails to
                // match its toned counterpart
                BTreeSet::from([t])
            } else if normalisation == SchemeRendering::PinyinNoTone
                && record.scheme == SchemeRendering::PinyinNumeric
            {
                BTreeSet::from([strip_tone_digits(&t)])
            } else {
                BTreeSet::from([t])
            }
        })
        .collect()
}

/// Score one candidate pair. Exact: 1.0 iff equal length and every aligned
/// position agrees. Per-syllable: agreeing positions ÷ the longer length.
pub fn compare(
    rec_a: &SimRecord,
    rec_b: &SimRecord,
    comparator: Comparator,
    normalisation: SchemeRendering,
    surname_roms: &BTreeSet<String>,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> f64 {
    let a = position_sets(rec_a, normalisation, surname_roms, dict, table);
    let b = position_sets(rec_b, normalisation, surname_roms, dict, table);
    let agreements = a
        .iter()
        .zip(&b)
        .filter(|(sa, sb)| sa.intersection(sb).next().is_some())
        .count();
    match comparator {
        Comparator::Exact => {
            if a.len() == b.len() && agreements == a.len() && !a.is_empty() {
                1.0
            } else {
                0.0
            }
        }
        Comparator::PerSyllableAgreement => {
            let denom = a.len().max(b.len());
            if denom == 0 {
                0.0
            } else {
                agreements as f64 / denom as f64
            }
        }
    }
}

/// Confusion-matrix tally of scored pairs against truth. Duplicate pairs on
/// either side collapse (a rescored pair keeps its best score). Truth pairs
/// that never appear among the decisions count as blocked-out misses (still
/// missed matches).
pub fn evaluate(
    decisions: &[(String, String, f64)],
    truth: &[(String, String)],
    threshold: f64,
) -> Result<LinkageResult, LinkError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(LinkError::Threshold(threshold));
    }
    let truth_set: BTreeSet<(&str, &str)> =
        truth.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    // a pair scored more than once counts once, at its best score
    let mut best: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for (a, b, score) in decisions {
        let e = best.entry((a.as_str(), b.as_str())).or_insert(f64::NEG_INFINITY);
        if *score > *e {
            *e = *score;
        }
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    for (pair, score) in &best {
        if *score >= threshold {
            if truth_set.contains(pair) {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let blocked_out = truth_set.iter().filter(|p| !best.contains_key(*p)).count();
    let fn_ = truth_set.len() - tp;
    let candidate_pairs = best.len();
    let precision_defined = tp + fp > 0;
    let precision = if precision_defined { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if truth_set.is_empty() { 0.0 } else { tp as f64 / truth_set.len() as f64 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(LinkageResult {
        true_matches_found: tp,
        false_matches: fp,
        missed_matches: fn_,
        blocked_out_misses: blocked_out,
        candidate_pairs,
        precision,
        recall,
        f1,
        precision_defined,
    })
}

/// Block both files, score within-block cross products, evaluate.
pub fn run_linkage(
    corpus: &PairCorpus,
    spec: &BlockingKeySpec,
    comparator: Comparator,
    normalisation: SchemeRendering,
    threshold: f64,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Result<LinkageResult, LinkError> {
    spec.validate()?;
    let surname_roms = crate::romanise::surname_romanisations(dict, table);
    let blocks_a = block(&corpus.file_a, spec, dict, table);
    let blocks_b = block(&corpus.file_b, spec, dict, table);
    let mut decisions = Vec::new();
    for (key, ids_a) in &blocks_a.keys {
        let Some(ids_b) = blocks_b.keys.get(key) else { continue };
        for &ia in ids_a {
            for &ib in ids_b {
                let (ra, rb) = (&corpus.file_a[ia], &corpus.file_b[ib]);
                let score =
                    compare(ra, rb, comparator, normalisation, &surname_roms, dict, table);
                decisions.push((ra.id.clone(), rb.id.clone(), score));
            }
        }
    }
    evaluate(&decisions, &corpus.truth, threshold)
}

/// The blocking-free oracle: every A×B pair is scored.
pub fn run_linkage_all_pairs(
    corpus: &PairCorpus,
    comparator: Comparator,
    normalisation: SchemeRendering,
    threshold: f64,
    dict: &Dictionary,
    table: &HkgVariantTable,
) -> Result<LinkageResult, LinkError> {
    let surname_roms = crate::romanise::surname_romanisations(dict, table);
    let mut decisions = Vec::with_capacity(corpus.file_a.len() * corpus.file_b.len());
    for ra in &corpus.file_a {
        for rb in &corpus.file_b {
            let score = compare(ra, rb, comparator, normalisation, &surname_roms, dict, table);
            decisions.push((ra.id.clone(), rb.id.clone(), score));
        }
    }
    evaluate(&decisions, &corpus.truth, threshold)
}
