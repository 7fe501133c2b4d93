use anyhow::{bail, Context, Result};

use hanlink_core::stats::{tone_combo_distribution, topk_coverage, zipf_fit, StatScheme, StatsError};

use super::{emit, finish, load_processed, output_path, Ctx, Outcome};
use crate::report::{render, Section};
use crate::TonesArgs;

pub fn combo_label(tones: &[u8]) -> String {
    tones.iter().map(u8::to_string).collect::<Vec<_>>().join("-")
}

pub fn run(args: TonesArgs, ctx: &Ctx) -> Result<Outcome> {
    let input = ctx.cfg.path_opt(args.input, "input", None);
    let strict = ctx.cfg.bool_or(args.strict_origin, "strict_origin")?;
    let scheme_name =
        ctx.cfg.str_opt(args.schemes, "schemes").unwrap_or_else(|| "jyutping".to_string());
    let scheme = StatScheme::from_name(&scheme_name)
        .with_context(|| format!("unknown scheme `{scheme_name}`"))?;
    let k = ctx.cfg.parse_or(args.k, "k", 10usize)?;
    let length = match ctx.cfg.str_opt(args.length.map(|v| v.to_string()), "length") {
        None => None,
        Some(s) => Some(s.parse::<usize>().with_context(|| format!("bad length `{s}`"))?),
    };
    if k == 0 {
        bail!("k must be at least 1");
    }

    let (records, warnings) = load_processed(input.as_deref(), ctx, strict)?;
    let freq = tone_combo_distribution(&records, &ctx.dict, scheme, length)?;
    let ranked = freq.ranked();

    let mut combos = Section::new("tone_combinations", vec!["rank", "tones", "count", "share"]);
    for (i, (tones, count)) in ranked.iter().enumerate() {
        combos.push(vec![
            (i + 1).to_string(),
            combo_label(tones),
            count.to_string(),
            format!("{:.1}%", *count as f64 / freq.total as f64 * 100.0),
        ]);
    }

    let mut summary = Section::new("summary", vec!["measure", "value"]);
    summary.push(vec!["scheme".to_string(), scheme.name().to_string()]);
    summary.push(vec!["names".to_string(), freq.total.to_string()]);
    summary.push(vec!["combinations".to_string(), freq.counts.len().to_string()]);
    let coverage = topk_coverage(&freq, k)?;
    summary.push(vec![format!("top-{k} coverage"), format!("{:.1}%", coverage * 100.0)]);
    match zipf_fit(&freq) {
        Ok(fit) => {
            summary.push(vec!["zipf exponent".to_string(), format!("{:.3}", fit.exponent)]);
            summary.push(vec!["zipf fit r^2".to_string(), format!("{:.3}", fit.goodness)]);
            summary.push(vec!["zipf points".to_string(), fit.points.to_string()]);
        }
        Err(StatsError::TooFewPoints(n)) => {
            summary.push(vec![
                "zipf".to_string(),
                format!("not fitted: {n} usable point(s), need 3"),
            ]);
        }
        Err(e) => return Err(e.into()),
    }

    if let Some(plot) = ctx.cfg.path_opt(args.plot, "plot", None) {
        let mut text = String::from("rank\tcount\n");
        for (i, (_, count)) in ranked.iter().enumerate() {
            text.push_str(&format!("{}\t{}\n", i + 1, count));
        }
        emit(Some(&plot), &text)?;
    }

    let text = render(&[combos, summary], ctx.format);
    emit(output_path(args.output, &ctx.cfg).as_deref(), &text)?;
    Ok(finish(&warnings))
}
