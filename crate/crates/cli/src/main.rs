//! `pedbench`: build pedestrian prediction datasets, generate synthetic
//! corpora, score predictors and audit resampling leakage.
//!
//! Every subcommand writes into `--out`. Failures print a single
//! `error: kind=<Kind> msg="..."` line on stderr, exit nonzero and leave no
//! partial outputs behind.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pedbench::{HorizonSet, ResampleMode, Split};

use crate::config::{RunConfig, Variant};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "pedbench", version, about = "Pedestrian trajectory prediction benchmark")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by all subcommands. They override the config file.
#[derive(Args, Debug, Default)]
struct Common {
    /// TOML run config; missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the train/val split, the motion-change sample and synthesis.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_resample)]
    resample: Option<ResampleMode>,
    /// Comma separated horizons in seconds, e.g. `1,2,3`.
    #[arg(long, global = true, value_parser = parse_horizons)]
    horizons: Option<HorizonSet>,
    #[arg(long, global = true, value_enum)]
    variant: Option<Variant>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cut a raw tracks file into the full and motion-changes instance files.
    BuildDataset {
        /// Raw tracks, one JSON record per line.
        #[arg(long, value_name = "PATH")]
        raw: Option<PathBuf>,
    },
    /// Generate a synthetic corpus and build its instance files.
    SynthGen {
        /// Number of scenarios.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Score a built-in predictor or a predictions file.
    Evaluate {
        /// Instances file, or a directory holding `<variant>.jsonl`.
        #[arg(long, value_name = "PATH")]
        instances: Option<PathBuf>,
        /// Built-in predictor: cv, da or ensemble. With `--predictions` this
        /// only names the rows (default: the file stem).
        #[arg(long)]
        predictor: Option<String>,
        /// External predictions, one JSON record per line.
        #[arg(long, value_name = "PATH")]
        predictions: Option<PathBuf>,
        /// Only score instances of this split.
        #[arg(long, value_parser = parse_split)]
        split: Option<Split>,
    },
    /// Compare motion onsets of raw and resampled tracks.
    LeakageAudit {
        #[arg(long, value_name = "PATH")]
        raw: Option<PathBuf>,
    },
    /// Merge `report.json` files from several evaluate runs into one table.
    Report {
        #[arg(required = true, value_name = "REPORT")]
        inputs: Vec<PathBuf>,
    },
}

fn parse_resample(s: &str) -> Result<ResampleMode, String> {
    s.parse()
}

fn parse_horizons(s: &str) -> Result<HorizonSet, String> {
    s.parse()
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse()
}

fn resolve(common: &Common, command: &Command) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    if let Some(mode) = common.resample {
        cfg.build.resample = mode;
    }
    if let Some(h) = &common.horizons {
        cfg.eval.horizons = h.clone();
    }
    if let Some(v) = common.variant {
        cfg.eval.variant = v;
    }
    if let Some(out) = &common.out {
        cfg.paths.out = Some(out.clone());
    }
    match command {
        Command::BuildDataset { raw } | Command::LeakageAudit { raw } => {
            if raw.is_some() {
                cfg.paths.raw = raw.clone();
            }
        }
        Command::SynthGen { n } => {
            if let Some(n) = n {
                cfg.synth.n = *n;
            }
        }
        Command::Evaluate { instances, predictions, split, .. } => {
            if instances.is_some() {
                cfg.paths.instances = instances.clone();
            }
            if predictions.is_some() {
                cfg.paths.predictions = predictions.clone();
            }
            if split.is_some() {
                cfg.eval.split = *split;
            }
        }
        Command::Report { .. } => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PEDBENCH_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::new("InvalidConfig", format!("PEDBENCH_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::new("InvalidConfig", e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let cfg = resolve(&cli.common, &cli.command)?;
    match cli.command {
        Command::BuildDataset { .. } => commands::build_dataset(&cfg),
        Command::SynthGen { .. } => commands::synth_gen(&cfg),
        Command::Evaluate { predictor, .. } => commands::evaluate(&cfg, predictor.as_deref()),
        Command::LeakageAudit { .. } => commands::leakage_audit(&cfg),
        Command::Report { inputs } => commands::report(&cfg, &inputs),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::usage(first));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
