use anyhow::{bail, Context, Result};

use hanlink_core::linksim::{
    generate_pair_corpus, replicate_names, run_linkage, run_linkage_all_pairs, BlockScheme,
    BlockingKeySpec, Comparator, KeyTransform, LinkageResult, PerturbationModel,
};
use hanlink_core::romanise::SchemeRendering;
use hanlink_core::stats::NamePart;

use super::{emit, finish, load_processed, output_path, Ctx, Outcome};
use crate::report::{render, Section};
use crate::LinksimArgs;

/// `scheme:field:transform`, e.g. `jyutping:surname:full` or
/// `chinese:fullname:full`.
pub fn parse_strategy(spec: &str) -> Result<BlockingKeySpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("strategy `{spec}` must be scheme:field:transform");
    }
    let scheme = if parts[0].eq_ignore_ascii_case("chinese") {
        BlockScheme::Chinese
    } else {
        BlockScheme::Rendering(
            SchemeRendering::from_name(parts[0])
                .with_context(|| format!("strategy `{spec}`: unknown scheme `{}`", parts[0]))?,
        )
    };
    let field = NamePart::from_name(parts[1])
        .with_context(|| format!("strategy `{spec}`: unknown field `{}`", parts[1]))?;
    let transform = KeyTransform::from_name(parts[2])
        .with_context(|| format!("strategy `{spec}`: unknown transform `{}`", parts[2]))?;
    let out = BlockingKeySpec { scheme, field, transform };
    out.validate()?;
    Ok(out)
}

fn strategy_label(spec: &BlockingKeySpec) -> String {
    let scheme = match spec.scheme {
        BlockScheme::Chinese => "chinese",
        BlockScheme::Rendering(r) => r.name(),
    };
    format!("{scheme}:{}:{}", spec.field.name(), spec.transform.name())
}

fn result_row(label: String, r: &LinkageResult) -> Vec<String> {
    vec![
        label,
        r.candidate_pairs.to_string(),
        r.true_matches_found.to_string(),
        r.false_matches.to_string(),
        r.missed_matches.to_string(),
        r.blocked_out_misses.to_string(),
        if r.precision_defined { format!("{:.4}", r.precision) } else { "0.0000*".to_string() },
        format!("{:.4}", r.recall),
        format!("{:.4}", r.f1),
    ]
}

pub fn run(args: LinksimArgs, ctx: &Ctx) -> Result<Outcome> {
    let scheme_name =
        ctx.cfg.str_opt(args.schemes, "schemes").unwrap_or_else(|| "jyutping".to_string());
    let scheme = SchemeRendering::from_name(&scheme_name)
        .with_context(|| format!("unknown scheme rendering `{scheme_name}`"))?;
    let n = ctx.cfg.parse_or(args.n, "n", 200usize)?;
    if n == 0 {
        bail!("n must be at least 1");
    }
    let pm = PerturbationModel {
        p_hkg_variant: ctx.cfg.parse_or(args.perturb_hkg_variant, "perturb_hkg_variant", 0.0)?,
        p_tone_drop: ctx.cfg.parse_or(args.perturb_tone_drop, "perturb_tone_drop", 0.0)?,
        p_order_swap: ctx.cfg.parse_or(args.perturb_order_swap, "perturb_order_swap", 0.0)?,
        p_middle_split: ctx.cfg.parse_or(args.perturb_middle_split, "perturb_middle_split", 0.0)?,
        seed: ctx.cfg.parse_or(args.seed, "seed", 0u64)?,
    };
    pm.validate()?;
    let threshold = ctx.cfg.parse_or(args.threshold, "threshold", 1.0f64)?;
    let comparator = {
        let name = ctx
            .cfg
            .str_opt(args.comparator, "comparator")
            .unwrap_or_else(|| "exact".to_string());
        Comparator::from_name(&name).with_context(|| format!("unknown comparator `{name}`"))?
    };
    let normalise = match ctx.cfg.str_opt(args.normalise, "normalise") {
        None => scheme,
        Some(name) => SchemeRendering::from_name(&name)
            .with_context(|| format!("unknown normalisation `{name}`"))?,
    };
    let strategies: Vec<BlockingKeySpec> = {
        let specs = ctx.cfg.list_or(args.strategies, "strategy");
        if specs.is_empty() {
            vec![BlockingKeySpec {
                scheme: BlockScheme::Rendering(scheme),
                field: NamePart::Surname,
                transform: KeyTransform::Full,
            }]
        } else {
            specs.iter().map(|s| parse_strategy(s)).collect::<Result<_>>()?
        }
    };
    let oracle = ctx.cfg.bool_or(args.oracle, "oracle")?;

    let input = ctx.cfg.path_opt(args.input, "input", None);
    let (records, mut warnings) = load_processed(input.as_deref(), ctx, false)?;
    let names: Vec<_> = records.into_iter().filter_map(|r| r.name).collect();
    if names.is_empty() {
        bail!("no usable names in the input corpus");
    }
    let base = replicate_names(&names, n);
    let corpus = generate_pair_corpus(&base, &pm, scheme, &ctx.dict, &ctx.table)?;

    let mut setup = Section::new("simulation", vec!["measure", "value"]);
    for (k, v) in [
        ("records per file", n.to_string()),
        ("scheme", scheme.name().to_string()),
        ("seed", pm.seed.to_string()),
        ("comparator", comparator.name().to_string()),
        ("normalisation", normalise.name().to_string()),
        ("threshold", format!("{threshold}")),
        ("syllables total", corpus.log.syllables_total.to_string()),
        ("syllables perturbed", corpus.log.syllables_perturbed.to_string()),
        ("syllables swapped", corpus.log.syllables_swapped.to_string()),
        ("records tone-dropped", corpus.log.records_tone_dropped.to_string()),
        ("records order-swapped", corpus.log.records_order_swapped.to_string()),
        ("records middle-split", corpus.log.records_middle_split.to_string()),
        ("fallback notes", corpus.log.notes.len().to_string()),
    ] {
        setup.push(vec![k.to_string(), v]);
    }

    let mut results = Section::new(
        "linkage",
        vec![
            "strategy",
            "candidates",
            "matches",
            "false",
            "missed",
            "blocked_out",
            "precision",
            "recall",
            "f1",
        ],
    );
    for spec in &strategies {
        let r = run_linkage(&corpus, spec, comparator, normalise, threshold, &ctx.dict, &ctx.table)?;
        if !r.precision_defined {
            warnings.push(format!(
                "strategy {}: no links declared at threshold {threshold}; precision reported as 0",
                strategy_label(spec)
            ));
        }
        results.push(result_row(strategy_label(spec), &r));
    }
    if oracle {
        let r = run_linkage_all_pairs(&corpus, comparator, normalise, threshold, &ctx.dict, &ctx.table)?;
        results.push(result_row("all-pairs".to_string(), &r));
    }

    let text = render(&[setup, results], ctx.format);
    emit(output_path(args.output, &ctx.cfg).as_deref(), &text)?;
    Ok(finish(&warnings))
}
