use std::fs;

use anyhow::{bail, Context, Result};

use hanlink_core::stats::{tone_sequence, StatScheme};
use hanlink_core::tonemodel::ToneNgramModel;
use hanlink_core::Scheme;

use super::{emit, finish, load_processed, output_path, Ctx, Outcome};
use crate::report::{render, Section};
use crate::ImputeArgs;

/// `2,3,_` → [Some(2), Some(3), None]; `_`, `gap`, `?` all mark the gap.
pub fn parse_query(line: &str, scheme: Scheme) -> Result<Vec<Option<u8>>> {
    let mut out = Vec::new();
    for tok in line.split([',', ' ', '\t']).map(str::trim).filter(|t| !t.is_empty()) {
        if tok == "_" || tok == "?" || tok.eq_ignore_ascii_case("gap") {
            out.push(None);
            continue;
        }
        let tone: u8 = tok.parse().with_context(|| format!("bad tone `{tok}`"))?;
        if tone < 1 || tone > scheme.max_tone() {
            bail!("tone {tone} outside the {} alphabet 1..={}", scheme.name(), scheme.max_tone());
        }
        out.push(Some(tone));
    }
    if out.is_empty() {
        bail!("empty query");
    }
    Ok(out)
}

fn query_label(q: &[Option<u8>]) -> String {
    q.iter()
        .map(|t| t.map(|v| v.to_string()).unwrap_or_else(|| "_".to_string()))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn run(args: ImputeArgs, ctx: &Ctx) -> Result<Outcome> {
    let scheme_name =
        ctx.cfg.str_opt(args.schemes, "schemes").unwrap_or_else(|| "jyutping".to_string());
    let scheme = match StatScheme::from_name(&scheme_name) {
        Some(StatScheme::Jyutping) => Scheme::Jyutping,
        Some(StatScheme::Pinyin) => Scheme::Pinyin,
        Some(_) => bail!("tone models need a tonal scheme (jyutping or pinyin), got `{scheme_name}`"),
        None => bail!("unknown scheme `{scheme_name}`"),
    };
    let order = ctx.cfg.parse_or(args.order, "order", ToneNgramModel::DEFAULT_ORDER)?;
    let alpha = ctx.cfg.parse_or(args.alpha, "alpha", ToneNgramModel::DEFAULT_ALPHA)?;
    let untrained = ctx.cfg.bool_or(args.untrained, "untrained")?;
    let model_path = ctx.cfg.path_opt(args.model, "model", None);

    let mut warnings: Vec<String> = Vec::new();
    let model = match (&model_path, untrained) {
        (Some(_), true) => bail!("--model and --untrained are mutually exclusive"),
        (Some(path), false) => {
            let src = fs::read_to_string(path)
                .with_context(|| format!("cannot read model {}", path.display()))?;
            ToneNgramModel::from_tabular_str(&src, &path.display().to_string())?
        }
        (None, true) => ToneNgramModel::fit(&[], order, scheme, alpha)?,
        (None, false) => {
            let input = ctx.cfg.path_opt(args.input, "input", None);
            let (records, w) = load_processed(input.as_deref(), ctx, false)?;
            warnings = w;
            let sequences: Vec<Vec<u8>> = records
                .iter()
                .filter_map(|r| r.name.as_ref())
                .filter_map(|n| tone_sequence(n, &ctx.dict, scheme))
                .collect();
            ToneNgramModel::fit(&sequences, order, scheme, alpha)?
        }
    };

    if let Some(path) = ctx.cfg.path_opt(args.save_model, "save_model", None) {
        emit(Some(&path), &model.to_tabular())?;
    }

    let ratio_pair = match ctx.cfg.str_opt(args.ratio, "ratio") {
        None => None,
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                bail!("--ratio wants two tones, e.g. 2,4");
            }
            let a: u8 = parts[0].parse().with_context(|| format!("bad tone `{}`", parts[0]))?;
            let b: u8 = parts[1].parse().with_context(|| format!("bad tone `{}`", parts[1]))?;
            for t in [a, b] {
                if t < 1 || t > scheme.max_tone() {
                    bail!("tone {t} outside the {} alphabet", scheme.name());
                }
            }
            Some((a, b))
        }
    };

    let mut header = vec!["query", "candidates"];
    if ratio_pair.is_some() {
        header.push("ratio");
    }
    let mut rows = Section::new("imputation", header);
    if let Some(path) = ctx.cfg.path_opt(args.queries, "queries", None) {
        let src = fs::read_to_string(&path)
            .with_context(|| format!("cannot read queries {}", path.display()))?;
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let query = match parse_query(line, scheme) {
                Ok(q) => q,
                Err(e) => {
                    warnings.push(format!("query line {}: {e}", i + 1));
                    continue;
                }
            };
            let ranked = match model.impute_missing_tone(&query) {
                Ok(r) => r,
                Err(e) => {
                    warnings.push(format!("query line {}: {e}", i + 1));
                    continue;
                }
            };
            let candidates = ranked
                .iter()
                .map(|(t, p)| format!("{t}:{p:.6}"))
                .collect::<Vec<_>>()
                .join(" ");
            let mut row = vec![query_label(&query), candidates];
            if let Some((a, b)) = ratio_pair {
                let gap = query.iter().position(Option::is_none).unwrap();
                let prefix: Vec<u8> = query[..gap].iter().map(|t| t.unwrap()).collect();
                row.push(format!("{:.4}", model.likelihood_ratio(&prefix, a, b)));
            }
            rows.push(row);
        }
    }

    let mut summary = Section::new("model", vec!["measure", "value"]);
    summary.push(vec!["scheme".to_string(), model.scheme().name().to_string()]);
    summary.push(vec!["order".to_string(), model.order().to_string()]);
    summary.push(vec!["alpha".to_string(), format!("{}", model.alpha())]);

    let text = render(&[rows, summary], ctx.format);
    emit(output_path(args.output, &ctx.cfg).as_deref(), &text)?;
    Ok(finish(&warnings))
}
