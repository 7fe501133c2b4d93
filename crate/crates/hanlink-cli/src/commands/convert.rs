use anyhow::{bail, Result};

use hanlink_core::corpusio::export_string;
use hanlink_core::romanise::SchemeRendering;

use super::{corpus_format, emit, finish, load_processed, output_path, Ctx, Outcome};
use crate::ConvertArgs;

pub fn parse_schemes(spec: Option<String>) -> Result<Vec<SchemeRendering>> {
    let Some(spec) = spec else { return Ok(SchemeRendering::ALL.to_vec()) };
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match SchemeRendering::from_name(part) {
            Some(s) => out.push(s),
            None => bail!("unknown scheme rendering `{part}`"),
        }
    }
    if out.is_empty() {
        bail!("no schemes requested");
    }
    Ok(out)
}

pub fn run(args: ConvertArgs, ctx: &Ctx) -> Result<Outcome> {
    let input = ctx.cfg.path_opt(args.input, "input", None);
    let schemes = parse_schemes(ctx.cfg.str_opt(args.schemes, "schemes"))?;
    let strict = ctx.cfg.bool_or(args.strict_origin, "strict_origin")?;
    let classify = ctx.cfg.bool_or(args.classify, "classify")?;
    let (records, warnings) = load_processed(input.as_deref(), ctx, strict)?;

    let output = output_path(args.output, &ctx.cfg);
    let format = output.as_deref().map(corpus_format).unwrap_or_else(|| {
        input.as_deref().map(corpus_format).unwrap_or(hanlink_core::corpusio::CorpusFormat::Csv)
    });
    let text = export_string(&records, format, &schemes, classify)?;
    emit(output.as_deref(), &text)?;
    Ok(finish(&warnings))
}
