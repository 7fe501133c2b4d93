use anyhow::Result;

use hanlink_core::namekit::is_han;
use hanlink_core::prondict::NameContext;
use hanlink_core::romanise::hkg_candidates;
use hanlink_core::Scheme;

use super::{emit, finish, output_path, Ctx, Outcome};
use crate::report::{render, Section};
use crate::VariantsArgs;

pub fn run(args: VariantsArgs, ctx: &Ctx) -> Result<Outcome> {
    let query = args.query.trim();
    let mut sections = Vec::new();

    let han: Vec<char> = query.chars().filter(|c| is_han(*c)).collect();
    if !han.is_empty() {
        let mut s = Section::new("spellings", vec!["character", "spelling", "role"]);
        for ch in han {
            let spellings = hanlink_core::linksim::hkg_spellings(ch, &ctx.dict, &ctx.table);
            for (i, v) in spellings.iter().enumerate() {
                s.push(vec![
                    ch.to_string(),
                    v.clone(),
                    if i == 0 { "canonical".to_string() } else { "variant".to_string() },
                ]);
            }
        }
        sections.push(s);
    } else {
        let mut s = Section::new("candidates", vec!["token", "character", "jyutping", "pinyin"]);
        for (ch, syl) in hkg_candidates(&query.to_lowercase(), &ctx.table, &ctx.dict) {
            let pinyin = ctx
                .dict
                .primary_reading(ch, Scheme::Pinyin, NameContext::Unknown)
                .map(|r| r.syllable.to_string())
                .unwrap_or_default();
            s.push(vec![query.to_lowercase(), ch.to_string(), syl.to_string(), pinyin]);
        }
        sections.push(s);
    }

    let text = render(&sections, ctx.format);
    emit(output_path(args.output, &ctx.cfg).as_deref(), &text)?;
    Ok(finish(&[]))
}
