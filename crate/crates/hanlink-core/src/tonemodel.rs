//! Additive-smoothed tone n-gram model: fit context→next-tone counts from a
//! corpus of tone sequences, query next-tone distributions, and impute a
//! single missing tone from its left context.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syllable::Scheme;

#[derive(Clone, Debug, PartialEq)]
pub struct ToneNgramModel {
    order: usize,
    alpha: f64,
    scheme: Scheme,
    /// context (≤ order−1 trailing tones) → next tone → count
    counts: BTreeMap<Vec<u8>, BTreeMap<u8, u64>>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ToneModelError {
    #[error("order must be ≥ 1, got {0}")]
    BadOrder(usize),
    #[error("smoothing constant must be > 0, got {0}")]
    BadAlpha(f64),
    #[error("sequence {sequence}: tone {tone} outside the {scheme} alphabet")]
    OutOfAlphabet { sequence: usize, tone: u8, scheme: Scheme },
    #[error("expected exactly one gap, got {0}")]
    GapCount(usize),
    #[error("{file}:{line}: {msg} in `{text}`")]
    Malformed { file: String, line: usize, msg: String, text: String },
}

impl ToneNgramModel {
    pub const DEFAULT_ORDER: usize = 3;
    pub const DEFAULT_ALPHA: f64 = 1.0;

    /// Count (context, next-tone) pairs over sliding windows. Contexts at
    /// sequence starts are shorter than order−1, down to the empty root.
    pub fn fit(
        sequences: &[Vec<u8>],
        order: usize,
        scheme: Scheme,
        alpha: f64,
    ) -> Result<ToneNgramModel, ToneModelError> {
        if order < 1 {
            return Err(ToneModelError::BadOrder(order));
        }
        if !(alpha > 0.0) {
            return Err(ToneModelError::BadAlpha(alpha));
        }
        let mut model =
            ToneNgramModel { order, alpha, scheme, counts: BTreeMap::new() };
        for (index, seq) in sequences.iter().enumerate() {
            if let Some(&tone) = seq.iter().find(|&&t| !tone_in_alphabet(t, scheme)) {
                return Err(ToneModelError::OutOfAlphabet { sequence: index, tone, scheme });
            }
            for i in 0..seq.len() {
                let start = i.saturating_sub(order - 1);
                let context = seq[start..i].to_vec();
                *model.counts.entry(context).or_default().entry(seq[i]).or_insert(0) += 1;
            }
        }
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn alphabet_size(&self) -> usize {
        self.scheme.max_tone() as usize
    }

    pub fn count(&self, context: &[u8], tone: u8) -> u64 {
        self.counts.get(context).and_then(|m| m.get(&tone)).copied().unwrap_or(0)
    }

    /// P(t | prefix) for every tone t, from the last order−1 tones of the
    /// prefix: (count + α) / (Σ counts + α·|alphabet|). Index i holds tone
    /// i+1. Always sums to 1; unseen contexts give the uniform vector.
    pub fn next_tone_distribution(&self, prefix: &[u8]) -> Vec<f64> {
        let tail_start = prefix.len().saturating_sub(self.order - 1);
        let context = &prefix[tail_start..];
        let a = self.alphabet_size();
        let by_tone = self.counts.get(context);
        let total: u64 =
            by_tone.map(|m| m.values().sum()).unwrap_or(0);
        let denom = total as f64 + self.alpha * a as f64;
        (1..=a as u8)
            .map(|t| {
                let c = by_tone.and_then(|m| m.get(&t)).copied().unwrap_or(0);
                (c as f64 + self.alpha) / denom
            })
            .collect()
    }

    /// Candidate tones for the single gap in `sequence`, ranked by
    /// probability descending then tone ascending. Only the left context
    /// feeds the distribution; tones after the gap are ignored.
    pub fn impute_missing_tone(
        &self,
        sequence: &[Option<u8>],
    ) -> Result<Vec<(u8, f64)>, ToneModelError> {
        let gaps: Vec<usize> = sequence
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.is_none().then_some(i))
            .collect();
        if gaps.len() != 1 {
            return Err(ToneModelError::GapCount(gaps.len()));
        }
        let prefix: Vec<u8> = sequence[..gaps[0]].iter().map(|t| t.unwrap()).collect();
        let dist = self.next_tone_distribution(&prefix);
        let mut ranked: Vec<(u8, f64)> =
            dist.iter().enumerate().map(|(i, &p)| (i as u8 + 1, p)).collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        Ok(ranked)
    }

    /// P(toneA | prefix) / P(toneB | prefix). Tones must be in the alphabet.
    pub fn likelihood_ratio(&self, prefix: &[u8], tone_a: u8, tone_b: u8) -> f64 {
        let a = self.alphabet_size() as u8;
        assert!(
            (1..=a).contains(&tone_a) && (1..=a).contains(&tone_b),
            "tones {tone_a}/{tone_b} outside the {} alphabet",
            self.scheme
        );
        let dist = self.next_tone_distribution(prefix);
        dist[tone_a as usize - 1] / dist[tone_b as usize - 1]
    }

    /// Tabular dump: `#!` directives carry the parameters, then one
    /// `context \t tone \t count` row per entry (root context = empty).
    pub fn to_tabular(&self) -> String {
        let mut out = String::from("# tone n-gram counts\n");
        out.push_str(&format!("#! order={}\n", self.order));
        out.push_str(&format!("#! alpha={}\n", self.alpha));
        out.push_str(&format!("#! scheme={}\n", self.scheme.name()));
        for (context, by_tone) in &self.counts {
            let ctx: Vec<String> = context.iter().map(u8::to_string).collect();
            for (tone, count) in by_tone {
                out.push_str(&format!("{}\t{tone}\t{count}\n", ctx.join(",")));
            }
        }
        out
    }

    pub fn from_tabular_str(src: &str, file: &str) -> Result<ToneNgramModel, ToneModelError> {
        let malformed = |line: usize, msg: String, text: &str| ToneModelError::Malformed {
            file: file.to_string(),
            line,
            msg,
            text: text.to_string(),
        };
        let mut order = None;
        let mut alpha = None;
        let mut scheme = None;
        let mut rows: Vec<(Vec<u8>, u8, u64)> = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let n = i + 1;
            if let Some(directive) = raw.strip_prefix("#!") {
                let (key, value) = directive
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| malformed(n, "directive needs key=value".into(), raw))?;
                match key.trim() {
                    "order" => {
                        order = Some(value.trim().parse::<usize>().map_err(|_| {
                            malformed(n, "order must be an integer".into(), raw)
                        })?)
                    }
                    "alpha" => {
                        alpha = Some(value.trim().parse::<f64>().map_err(|_| {
                            malformed(n, "alpha must be a number".into(), raw)
                        })?)
                    }
                    "scheme" => {
                        scheme = Some(Scheme::from_name(value.trim()).ok_or_else(|| {
                            malformed(n, format!("unknown scheme `{}`", value.trim()), raw)
                        })?)
                    }
                    other => return Err(malformed(n, format!("unknown directive `{other}`"), raw)),
                }
                continue;
            }
            let line = raw.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(malformed(n, format!("expected 3 columns, got {}", cols.len()), raw));
            }
            let context: Vec<u8> = if cols[0].is_empty() {
                Vec::new()
            } else {
                cols[0]
                    .split(',')
                    .map(|t| t.parse::<u8>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| malformed(n, "context must be comma-joined tones".into(), raw))?
            };
            let tone: u8 =
                cols[1].parse().map_err(|_| malformed(n, "tone must be an integer".into(), raw))?;
            let count: u64 =
                cols[2].parse().map_err(|_| malformed(n, "count must be an integer".into(), raw))?;
            rows.push((context, tone, count));
        }
        let order = order.ok_or_else(|| malformed(0, "missing `#! order=` directive".into(), ""))?;
        let alpha = alpha.ok_or_else(|| malformed(0, "missing `#! alpha=` directive".into(), ""))?;
        let scheme = scheme.ok_or_else(|| malformed(0, "missing `#! scheme=` directive".into(), ""))?;
        if order < 1 {
            return Err(ToneModelError::BadOrder(order));
        }
        if !(alpha > 0.0) {
            return Err(ToneModelError::BadAlpha(alpha));
        }
        let mut model = ToneNgramModel { order, alpha, scheme, counts: BTreeMap::new() };
        for (context, tone, count) in rows {
            if !tone_in_alphabet(tone, scheme) {
                return Err(ToneModelError::OutOfAlphabet { sequence: 0, tone, scheme });
            }
            *model.counts.entry(context).or_default().entry(tone).or_insert(0) += count;
        }
        Ok(model)
    }
}

fn tone_in_alphabet(tone: u8, scheme: Scheme) -> bool {
    (1..=scheme.max_tone()).contains(&tone)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The worked example: four (2,3,2) and one (2,3,4), Pinyin, order 3.
    fn worked_model() -> ToneNgramModel {
        let mut seqs = vec![vec![2, 3, 2]; 4];
        seqs.push(vec![2, 3, 4]);
        ToneNgramModel::fit(&seqs, 3, Scheme::Pinyin, 1.0).unwrap()
    }

    #[test]
    fn fit_hand_tallies() {
        let m = ToneNgramModel::fit(&[vec![2, 3, 2], vec![2, 3, 2]], 3, Scheme::Pinyin, 1.0).unwrap();
        assert_eq!(m.count(&[2, 3], 2), 2);
        assert_eq!(m.count(&[2, 3], 4), 0);
        assert_eq!(m.count(&[], 2), 2);
        assert_eq!(m.count(&[2], 3), 2);
        let m = ToneNgramModel::fit(&[vec![1]], 2, Scheme::Pinyin, 1.0).unwrap();
        assert_eq!(m.count(&[], 1), 1);
    }

    #[test]
    fn fit_validation() {
        assert_eq!(
            ToneNgramModel::fit(&[], 0, Scheme::Pinyin, 1.0),
            Err(ToneModelError::BadOrder(0))
        );
        assert_eq!(
            ToneNgramModel::fit(&[], 3, Scheme::Pinyin, 0.0),
            Err(ToneModelError::BadAlpha(0.0))
        );
        assert_eq!(
            ToneNgramModel::fit(&[vec![2, 3], vec![2, 6]], 3, Scheme::Pinyin, 1.0),
            Err(ToneModelError::OutOfAlphabet { sequence: 1, tone: 6, scheme: Scheme::Pinyin })
        );
        // tone 6 is fine for Jyutping, tone 0 never is
        assert!(ToneNgramModel::fit(&[vec![2, 6]], 3, Scheme::Jyutping, 1.0).is_ok());
        assert_eq!(
            ToneNgramModel::fit(&[vec![0]], 3, Scheme::Jyutping, 1.0),
            Err(ToneModelError::OutOfAlphabet { sequence: 0, tone: 0, scheme: Scheme::Jyutping })
        );
    }

    #[test]
    fn worked_example_distribution() {
        let m = worked_model();
        let dist = m.next_tone_distribution(&[2, 3]);
        assert!((dist[1] - 0.5).abs() < 1e-12, "P(2) = {}", dist[1]);
        assert!((dist[3] - 0.2).abs() < 1e-12, "P(4) = {}", dist[3]);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((m.likelihood_ratio(&[2, 3], 2, 4) - 2.5).abs() < 1e-12);
        assert_eq!(m.likelihood_ratio(&[2, 3], 4, 4), 1.0);
        // reciprocal property
        let ab = m.likelihood_ratio(&[2, 3], 2, 4);
        let ba = m.likelihood_ratio(&[2, 3], 4, 2);
        assert!((ab * ba - 1.0).abs() < 1e-9);
    }

    #[test]
    fn untrained_model_is_uniform() {
        let m = ToneNgramModel::fit(&[], 3, Scheme::Pinyin, 1.0).unwrap();
        let dist = m.next_tone_distribution(&[4, 1]);
        assert_eq!(dist.len(), 5);
        for p in &dist {
            assert!((p - 0.2).abs() < 1e-12);
        }
        assert_eq!(m.likelihood_ratio(&[1], 3, 5), 1.0);
        let ranked = m.impute_missing_tone(&[Some(2), Some(3), None]).unwrap();
        let tones: Vec<u8> = ranked.iter().map(|&(t, _)| t).collect();
        assert_eq!(tones, vec![1, 2, 3, 4, 5]); // tie-break ascending
    }

    #[test]
    fn distributions_always_normalise() {
        let m = worked_model();
        for a in 1..=5u8 {
            for b in 1..=5u8 {
                let dist = m.next_tone_distribution(&[a, b]);
                assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(dist.iter().all(|&p| p > 0.0));
            }
            let dist = m.next_tone_distribution(&[a]);
            assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let dist = m.next_tone_distribution(&[]);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn imputation_rules() {
        let m = worked_model();
        let ranked = m.impute_missing_tone(&[Some(2), Some(3), None]).unwrap();
        assert_eq!(ranked[0].0, 2);
        assert!((ranked[0].1 - 0.5).abs() < 1e-12);
        // non-final gap: only the left context is used
        let mid = m.impute_missing_tone(&[Some(2), None, Some(4)]).unwrap();
        let from_prefix = m.next_tone_distribution(&[2]);
        assert!((mid[0].1 - from_prefix.iter().cloned().fold(f64::MIN, f64::max)).abs() < 1e-12);
        // gap-count errors
        assert_eq!(
            m.impute_missing_tone(&[Some(2), Some(3)]),
            Err(ToneModelError::GapCount(0))
        );
        assert_eq!(
            m.impute_missing_tone(&[None, Some(3), None]),
            Err(ToneModelError::GapCount(2))
        );
    }

    #[test]
    fn fitting_is_order_independent() {
        let a = vec![vec![2, 3, 2], vec![1, 4, 4], vec![2, 3, 4], vec![5, 5, 1]];
        let mut b = a.clone();
        b.reverse();
        b.rotate_left(1);
        let ma = ToneNgramModel::fit(&a, 3, Scheme::Pinyin, 1.0).unwrap();
        let mb = ToneNgramModel::fit(&b, 3, Scheme::Pinyin, 1.0).unwrap();
        assert_eq!(ma, mb);
    }

    #[test]
    fn larger_alpha_shrinks_to_uniform() {
        let seqs = vec![vec![2, 3, 2]; 10];
        let sharp = ToneNgramModel::fit(&seqs, 3, Scheme::Pinyin, 1.0).unwrap();
        let smooth = ToneNgramModel::fit(&seqs, 3, Scheme::Pinyin, 100.0).unwrap();
        let dev = |m: &ToneNgramModel| {
            m.next_tone_distribution(&[2, 3])
                .iter()
                .map(|p| (p - 0.2).abs())
                .fold(0.0, f64::max)
        };
        assert!(dev(&smooth) < dev(&sharp));
    }

    #[test]
    fn tabular_round_trip() {
        let m = worked_model();
        let dump = m.to_tabular();
        assert!(dump.contains("#! order=3"));
        assert!(dump.contains("#! scheme=pinyin"));
        assert!(dump.contains("2,3\t2\t4"));
        let back = ToneNgramModel::from_tabular_str(&dump, "dump").unwrap();
        assert_eq!(m, back);
        // root context row round-trips through the empty first column
        let root = ToneNgramModel::fit(&[vec![1]], 2, Scheme::Pinyin, 1.0).unwrap();
        let back = ToneNgramModel::from_tabular_str(&root.to_tabular(), "dump").unwrap();
        assert_eq!(back.count(&[], 1), 1);
    }

    #[test]
    fn tabular_errors() {
        let e = ToneNgramModel::from_tabular_str("#! order=3\n#! alpha=1\n2,3\t2\n", "f");
        assert!(matches!(e, Err(ToneModelError::Malformed { line: 3, .. })));
        let e = ToneNgramModel::from_tabular_str("#! order=3\n#! alpha=1\n#! scheme=pinyin\nx\t2\t1\n", "f");
        assert!(matches!(e, Err(ToneModelError::Malformed { line: 4, .. })));
        let e = ToneNgramModel::from_tabular_str("2,3\t2\t1\n", "f");
        assert!(matches!(e, Err(ToneModelError::Malformed { .. })));
        let e = ToneNgramModel::from_tabular_str(
            "#! order=3\n#! alpha=1\n#! scheme=pinyin\n2,3\t9\t1\n",
            "f",
        );
        assert!(matches!(e, Err(ToneModelError::OutOfAlphabet { tone: 9, .. })));
    }
}
