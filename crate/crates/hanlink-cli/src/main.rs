//! `hanlink` — batch interface to the name toolkit: scheme conversion,
//! corpus statistics, tone modelling, and linkage simulation.
//!
//! Exit codes: 0 clean, 2 completed with warnings, 1 fatal.

mod commands;
mod report;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "hanlink", version, about = "Chinese personal-name romanisation toolkit")]
pub struct Cli {
    /// Flat key=value config file; command-line flags win over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Pronunciation dictionary; defaults to $HANLINK_DICT, then the bundled
    /// tables.
    #[arg(long, global = true)]
    pub dict: Option<PathBuf>,
    /// Dictionary file format.
    #[arg(long, global = true, value_parser = ["tabular", "cc-canto"])]
    pub dict_format: Option<String>,
    /// HKG spelling table (character<TAB>variant, canonical first).
    #[arg(long, global = true)]
    pub hkg_table: Option<PathBuf>,
    /// Report style: aligned table or line-delimited key=value records.
    #[arg(long, global = true, value_parser = ["table", "kv"])]
    pub format: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Ingest a corpus and export it with romanised columns added.
    Convert(ConvertArgs),
    /// Distinct-value grid per field and scheme, with deltas against the
    /// Chinese baseline, plus corpus composition counts.
    Stats(StatsArgs),
    /// Tone-combination distribution: ranked table, top-k coverage, Zipf fit.
    Tones(TonesArgs),
    /// Fit a tone n-gram model and answer gap queries.
    Impute(ImputeArgs),
    /// Two-file linkage simulation under seeded perturbation.
    Linksim(LinksimArgs),
    /// Spellings of a character, or candidate characters of a spelling.
    Variants(VariantsArgs),
}

#[derive(Args)]
pub struct ConvertArgs {
    /// Corpus file (CSV or TSV by extension). Omit for the bundled corpus.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated renderings to add (default: all five).
    #[arg(long)]
    pub schemes: Option<String>,
    /// Fold Unknown origins into Cantonese.
    #[arg(long)]
    pub strict_origin: bool,
    /// Also add origin and forename-kind columns.
    #[arg(long)]
    pub classify: bool,
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub strict_origin: bool,
}

#[derive(Args)]
pub struct TonesArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Tonal scheme: jyutping or pinyin.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Coverage cut-off (default 10).
    #[arg(long)]
    pub k: Option<usize>,
    /// Restrict to names of exactly this many characters.
    #[arg(long)]
    pub length: Option<usize>,
    /// Write rank<TAB>count pairs for plotting.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    pub strict_origin: bool,
}

#[derive(Args)]
pub struct ImputeArgs {
    /// Training corpus; omit for the bundled corpus.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// One query per line, e.g. `2,3,_` (underscore marks the gap).
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Tonal scheme: jyutping or pinyin.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Context length of the n-gram model.
    #[arg(long)]
    pub order: Option<usize>,
    /// Additive smoothing constant.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Skip training: answer from the uniform (empty) model.
    #[arg(long)]
    pub untrained: bool,
    /// Load a serialised model instead of fitting.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Serialise the fitted model here.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
    /// Also report the likelihood ratio of two tones, e.g. `2,4`.
    #[arg(long)]
    pub ratio: Option<String>,
}

#[derive(Args)]
pub struct LinksimArgs {
    /// Name source corpus; omit for the bundled corpus.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Rendering the simulated files are written in.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Corpus size (names are recycled as needed).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub perturb_hkg_variant: Option<f64>,
    #[arg(long)]
    pub perturb_tone_drop: Option<f64>,
    #[arg(long)]
    pub perturb_order_swap: Option<f64>,
    #[arg(long)]
    pub perturb_middle_split: Option<f64>,
    /// Blocking strategy `scheme:field:transform`; repeatable.
    #[arg(long = "strategy")]
    pub strategies: Vec<String>,
    /// Pair comparator: exact or per_syllable.
    #[arg(long)]
    pub comparator: Option<String>,
    /// Rendering pairs are normalised to before comparison (default: the
    /// corpus rendering, i.e. raw comparison).
    #[arg(long)]
    pub normalise: Option<String>,
    /// Link declaration threshold in [0,1].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Also score every cross-file pair without blocking.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args)]
pub struct VariantsArgs {
    /// A character (楊) or a romanised token (chiu).
    pub query: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match commands::run(cli) {
        Ok(commands::Outcome::Clean) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Warned) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
