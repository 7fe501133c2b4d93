//! Subcommand implementations and the shared execution context.

mod convert;
mod impute;
mod linksim;
mod stats;
mod tones;
mod variants;

use std::fs;
use std::ops::Deref;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use hanlink_core::corpusio::{
    bundled_corpus_csv, ingest, ingest_str, process_all, CorpusFormat, Ingested, ProcessedRecord,
};
use hanlink_core::prondict::{DictFormat, Dictionary};
use hanlink_core::romanise::HkgVariantTable;

use crate::report::OutFormat;
use crate::settings::{Config, DICT_ENV};
use crate::{Cli, Command};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Warned,
}

/// Bundled-or-loaded resource handle.
pub enum Loaded<T: 'static> {
    Bundled(&'static T),
    Owned(Box<T>),
}

impl<T> Deref for Loaded<T> {
    type Target = T;
    fn deref(&self) -> &T {
        match self {
            Loaded::Bundled(t) => t,
            Loaded::Owned(t) => t,
        }
    }
}

pub struct Ctx {
    pub dict: Loaded<Dictionary>,
    pub table: Loaded<HkgVariantTable>,
    pub format: OutFormat,
    pub cfg: Config,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let cfg = Config::load(cli.config.as_deref())?;

    let dict = match cfg.path_opt(cli.dict, "dict", Some(DICT_ENV)) {
        None => Loaded::Bundled(Dictionary::bundled()),
        Some(path) => {
            let format = match cfg.str_opt(cli.dict_format, "dict_format").as_deref() {
                None | Some("tabular") => DictFormat::Tabular,
                Some("cc-canto") => DictFormat::CcCanto,
                Some(other) => bail!("unknown dictionary format `{other}`"),
            };
            Loaded::Owned(Box::new(Dictionary::load(&path, format)?))
        }
    };
    let table = match cfg.path_opt(cli.hkg_table, "hkg_table", None) {
        None => Loaded::Bundled(HkgVariantTable::bundled()),
        Some(path) => Loaded::Owned(Box::new(HkgVariantTable::load(&path, "hkg")?)),
    };
    let format = match cfg.str_opt(cli.format, "format") {
        None => OutFormat::Table,
        Some(name) => OutFormat::from_name(&name)
            .with_context(|| format!("unknown output format `{name}`"))?,
    };
    let ctx = Ctx { dict, table, format, cfg };

    match cli.command {
        Command::Convert(args) => convert::run(args, &ctx),
        Command::Stats(args) => stats::run(args, &ctx),
        Command::Tones(args) => tones::run(args, &ctx),
        Command::Impute(args) => impute::run(args, &ctx),
        Command::Linksim(args) => linksim::run(args, &ctx),
        Command::Variants(args) => variants::run(args, &ctx),
    }
}

/// CSV unless the extension says TSV.
pub fn corpus_format(path: &Path) -> CorpusFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("tsv") => CorpusFormat::Tsv,
        _ => CorpusFormat::Csv,
    }
}

/// Read the corpus named by `input` (the bundled one when absent).
pub fn load_corpus(input: Option<&Path>) -> Result<Ingested> {
    match input {
        None => Ok(ingest_str(bundled_corpus_csv(), "corpus_100.csv", CorpusFormat::Csv)?),
        Some(path) => Ok(ingest(path, corpus_format(path))?),
    }
}

/// Ingest + process + per-record warning collection in one step. Returns
/// the records and every warning (file-level first).
pub fn load_processed(
    input: Option<&Path>,
    ctx: &Ctx,
    strict: bool,
) -> Result<(Vec<ProcessedRecord>, Vec<String>)> {
    let ingested = load_corpus(input)?;
    let mut warnings = ingested.warnings.clone();
    let records = process_all(&ingested.records, &ctx.dict, &ctx.table, strict);
    for r in &records {
        for w in &r.warnings {
            warnings.push(format!("{}: {w}", r.record_id));
        }
    }
    Ok((records, warnings))
}

/// Print warnings to stderr and fold them into the exit outcome.
pub fn finish(warnings: &[String]) -> Outcome {
    if warnings.is_empty() {
        return Outcome::Clean;
    }
    for w in warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{} warning(s)", warnings.len());
    Outcome::Warned
}

/// Write the report to the chosen destination (stdout when none).
pub fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
    }
}

/// Resolve an output path setting.
pub fn output_path(flag: Option<PathBuf>, cfg: &Config) -> Option<PathBuf> {
    cfg.path_opt(flag, "output", None)
}
