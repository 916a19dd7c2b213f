//! Command-line front-end for the polarization toolkit.
//!
//! Every subcommand reads a TOML run configuration (all fields overridable
//! by flags; flags win), writes its outputs plus a `manifest.json` into the
//! output directory, and can be replayed byte-identically from that
//! manifest with `--manifest`.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use commands::{CliError, Ctx, SweepKindArg};
use config::{Format, KeywordMatch, Manifest, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polarnet", version, about = "Structural polarization of retweet networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an event file and report what it contains.
    IngestCheck(CommonArgs),
    /// Run the seed pipeline and export scores plus a metrics report.
    Ideology(CommonArgs),
    /// Run a degradation sweep (random, seed, or keyword).
    Sweep(SweepArgs),
    /// Split keywords by the mean ideology of their tweets.
    KeywordsBias(CommonArgs),
    /// Generate a synthetic labelled event corpus.
    Synth(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replay a previous run exactly from its manifest (ignores --config
    /// and override flags).
    #[arg(long, conflicts_with = "config")]
    manifest: Option<PathBuf>,
    /// Output directory (created if absent).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Validate the configuration and exit without computing.
    #[arg(long)]
    dry_run: bool,
    /// Cap the rayon worker count; results are identical for any value.
    #[arg(long)]
    threads: Option<usize>,

    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seeds: Option<PathBuf>,
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[arg(long, value_enum)]
    keyword_match: Option<KeywordMatch>,
    /// Anchor id for the negative end of the axis (repeatable).
    #[arg(long = "anchor")]
    anchor_ids: Vec<String>,
    /// Comma-separated event fractions for the random sweep.
    #[arg(long, value_delimiter = ',')]
    fractions: Vec<f64>,
    /// Comma-separated seed shares for the seed sweep.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    min_support: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: SweepKindArg,
    #[command(flatten)]
    common: CommonArgs,
}

impl CommonArgs {
    fn resolve(&self, command: &str) -> Result<RunConfig, CliError> {
        if let Some(path) = &self.manifest {
            let manifest = Manifest::from_file(path)
                .map_err(|e| CliError::config("unreadable_manifest", e.to_string()))?;
            if manifest.command != command {
                return Err(CliError::config(
                    "manifest_command_mismatch",
                    format!(
                        "manifest was written by '{}', not '{command}'",
                        manifest.command
                    ),
                ));
            }
            return Ok(manifest.config);
        }
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_toml_file(path)
                .map_err(|e| CliError::config("invalid_config", e.to_string()))?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            cfg.input = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        if let Some(v) = &self.seeds {
            cfg.seeds = Some(v.clone());
        }
        if let Some(v) = &self.keywords {
            cfg.keywords = Some(v.clone());
        }
        if let Some(v) = self.keyword_match {
            cfg.keyword_match = v;
        }
        if !self.anchor_ids.is_empty() {
            cfg.anchor_ids = self.anchor_ids.clone();
        }
        if !self.fractions.is_empty() {
            cfg.fractions = self.fractions.clone();
        }
        if !self.alphas.is_empty() {
            cfg.alphas = self.alphas.clone();
        }
        if let Some(v) = self.replicates {
            cfg.replicates = v;
        }
        if let Some(v) = self.rng_seed {
            cfg.rng_seed = v;
        }
        if let Some(v) = self.bootstrap {
            cfg.n_bootstrap = v;
        }
        if let Some(v) = self.bins {
            cfg.histogram_bins = v;
        }
        if let Some(v) = self.min_support {
            cfg.min_support = v;
        }
        Ok(cfg)
    }

    fn ctx(&self, command: &str) -> Result<Ctx, CliError> {
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(CliError::config("invalid_threads", "--threads must be >= 1"));
            }
            // A second invocation in the same process would fail; the global
            // pool can only be installed once, which is fine for a CLI.
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::config("thread_pool", e.to_string()))?;
        }
        let config = self.resolve(command)?;
        if !self.dry_run {
            std::fs::create_dir_all(&self.out).map_err(|e| {
                CliError::config(
                    "unwritable_out_dir",
                    format!("{}: {e}", self.out.display()),
                )
            })?;
        }
        Ok(Ctx {
            config,
            out_dir: self.out.clone(),
            dry_run: self.dry_run,
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::IngestCheck(args) => commands::cmd_ingest_check(&args.ctx("ingest-check")?),
        Command::Ideology(args) => commands::cmd_ideology(&args.ctx("ideology")?),
        Command::Sweep(args) => commands::cmd_sweep(&args.common.ctx("sweep")?, args.kind),
        Command::KeywordsBias(args) => commands::cmd_keywords_bias(&args.ctx("keywords-bias")?),
        Command::Synth(args) => commands::cmd_synth(&args.ctx("synth")?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {}", e.code, e.message);
            println!(
                "{}",
                serde_json::json!({ "error": e.code, "message": e.message })
            );
            ExitCode::from(e.exit as u8)
        }
    }
}
