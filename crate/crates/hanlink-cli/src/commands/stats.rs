use std::collections::BTreeMap;

use anyhow::Result;

use hanlink_core::stats::{compute_corpus_stats, format_delta_pct, NamePart, StatScheme};

use super::{emit, finish, load_processed, output_path, Ctx, Outcome};
use crate::report::{render, Section};
use crate::StatsArgs;

pub fn run(args: StatsArgs, ctx: &Ctx) -> Result<Outcome> {
    let input = ctx.cfg.path_opt(args.input, "input", None);
    let strict = ctx.cfg.bool_or(args.strict_origin, "strict_origin")?;
    let (records, warnings) = load_processed(input.as_deref(), ctx, strict)?;
    let stats = compute_corpus_stats(&records, &ctx.dict, &ctx.table)?;

    let mut grid = Section::new(
        "distinct_values",
        vec!["field", "chinese", "jyutping", "pinyin", "pinyin_notone", "hkg"],
    );
    for part in NamePart::ALL {
        let mut row = vec![part.name().to_string()];
        for scheme in StatScheme::ALL {
            let cell = &stats.cells[&(part, scheme)];
            row.push(match cell.delta_pct {
                None => cell.unique.to_string(),
                Some(d) => format!("{} ({})", cell.unique, format_delta_pct(d)),
            });
        }
        grid.push(row);
    }

    let mut scripts = BTreeMap::new();
    let mut origins = BTreeMap::new();
    let mut kinds = BTreeMap::new();
    let mut unprocessable = 0usize;
    for r in &records {
        match &r.name {
            Some(n) => *scripts.entry(n.script.name().to_string()).or_insert(0usize) += 1,
            None => unprocessable += 1,
        }
        *origins.entry(r.origin.name().to_string()).or_insert(0usize) += 1;
        *kinds.entry(r.forename_kind.name().to_string()).or_insert(0usize) += 1;
    }
    let mut describe = Section::new("corpus", vec!["measure", "value"]);
    describe.push(vec!["records".to_string(), stats.records.to_string()]);
    describe.push(vec!["unprocessable".to_string(), unprocessable.to_string()]);
    for (label, counts) in [("script", scripts), ("origin", origins), ("forename", kinds)] {
        for (k, v) in counts {
            describe.push(vec![format!("{label} {k}"), v.to_string()]);
        }
    }

    let text = render(&[grid, describe], ctx.format);
    emit(output_path(args.output, &ctx.cfg).as_deref(), &text)?;
    Ok(finish(&warnings))
}
