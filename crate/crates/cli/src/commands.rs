//! Subcommand implementations. Every run writes `manifest.json` plus its
//! data files into the output directory; data also goes to standard output
//! as JSON, diagnostics to standard error.

use crate::config::{Manifest, RunConfig};
use polarnet::experiments::{
    export_histogram_csv, run_biased_keyword_comparison, run_keyword_experiment,
    run_random_sweep, run_seed_sweep, ExperimentError, KeywordBiasComparison, KeywordBiasResult,
    SweepResult,
};
use polarnet::ingest::{parse_events_with, ParseOptions, ParseReport};
use polarnet::synthetic::{export_jsonl, generate};
use polarnet::{
    dip_test, lwcc_relative_size, run_seed_pipeline, EventSet, KeywordSet, MetricsReport,
    PipelineError, RngStream,
};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Failure with the exit code it maps to: configuration or input problems
/// exit 2, pipeline failures exit 1. Both print a JSON error object.
#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    pub fn config(code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.to_string(),
            message: message.into(),
            exit: 2,
        }
    }

    pub fn pipeline(code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.to_string(),
            message: message.into(),
            exit: 1,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::pipeline(e.code(), e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        let msg = e.to_string();
        match e {
            ExperimentError::ConfigInvalid(_) | ExperimentError::Ingest(_) => {
                CliError::config("invalid_config", msg)
            }
            ExperimentError::ReferenceFailed(code) => {
                CliError::pipeline(&format!("reference_{code}"), msg)
            }
            ExperimentError::NoScoredTweets => CliError::pipeline("no_scored_tweets", msg),
            ExperimentError::EmptyKeywords => CliError::pipeline("empty_keywords", msg),
            ExperimentError::Pipeline(p) => p.into(),
            _ => CliError::pipeline("experiment_failed", msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::pipeline("io_error", e.to_string())
    }
}

pub struct Ctx {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub dry_run: bool,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write_manifest(&self, command: &str) -> Result<(), CliError> {
        write_json(
            &self.path("manifest.json"),
            &Manifest::new(command, self.config.clone()),
        )
    }

    fn load_events(&self) -> Result<(EventSet, ParseReport), CliError> {
        let input = self
            .config
            .input
            .as_ref()
            .ok_or_else(|| CliError::config("missing_input", "no input file configured"))?;
        let report = parse_events_with(
            input,
            self.config.format.into(),
            ParseOptions {
                allow_self_retweets: self.config.allow_self_retweets,
            },
        )
        .map_err(|e| CliError::config("unreadable_input", e.to_string()))?;
        eprintln!(
            "read {} events from {} ({} skipped, {} rejected)",
            report.events.len(),
            input.display(),
            report.skipped,
            report.rejected
        );
        Ok((report.events.clone(), report))
    }

    fn load_seeds(&self) -> Result<BTreeSet<String>, CliError> {
        let path = self
            .config
            .seeds
            .as_ref()
            .ok_or_else(|| CliError::config("missing_seeds", "no seed file configured"))?;
        let seeds = read_id_lines(path)?;
        if seeds.is_empty() {
            return Err(CliError::config(
                "empty_seeds",
                format!("seed file {} contains no ids", path.display()),
            ));
        }
        Ok(seeds)
    }

    fn anchor(&self, seeds: &BTreeSet<String>) -> BTreeSet<String> {
        if self.config.anchor_ids.is_empty() {
            seeds.clone()
        } else {
            self.config.anchor_ids.iter().cloned().collect()
        }
    }

    fn load_keywords(&self) -> Result<KeywordSet, CliError> {
        let path = self
            .config
            .keywords
            .as_ref()
            .ok_or_else(|| CliError::config("missing_keywords", "no keyword file configured"))?;
        KeywordSet::from_file(path, self.config.keyword_match.into())
            .map_err(|e| CliError::config("unreadable_keywords", e.to_string()))
    }
}

fn read_id_lines(path: &Path) -> Result<BTreeSet<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::config("unreadable_file", format!("{}: {e}", path.display()))
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with(';'))
        .map(str::to_string)
        .collect())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::pipeline("serialize_failed", e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable value")
    );
}

fn dry_run_notice(command: &str) {
    print_json(&serde_json::json!({ "command": command, "dry_run": true, "valid": true }));
}

fn sweep_rng(config: &RunConfig) -> RngStream {
    RngStream::new(config.rng_seed)
}

fn write_sweep_outputs(ctx: &Ctx, result: &SweepResult) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(ctx.path("sweep.csv"))?);
    result.export_csv(&mut w)?;
    write_json(&ctx.path("report.json"), &result.reference_report)?;
    let mut w = BufWriter::new(File::create(ctx.path("scores.csv"))?);
    result.reference_scores.export_csv(&mut w)?;
    let hist_dir = ctx.path("histograms");
    std::fs::create_dir_all(&hist_dir)?;
    let mut w = BufWriter::new(File::create(hist_dir.join("reference.csv"))?);
    export_histogram_csv(
        &result.reference_scores.user_score_vec(),
        ctx.config.histogram_bins,
        &mut w,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct IngestCheckReport {
    n_events: usize,
    skipped: usize,
    rejected: usize,
    n_retweeters: usize,
    n_influencers: usize,
}

pub fn cmd_ingest_check(ctx: &Ctx) -> Result<(), CliError> {
    if ctx.dry_run {
        ctx.config
            .input
            .as_ref()
            .ok_or_else(|| CliError::config("missing_input", "no input file configured"))?;
        dry_run_notice("ingest-check");
        return Ok(());
    }
    let (events, parse) = ctx.load_events()?;
    let retweeters: BTreeSet<&str> = events.events().iter().map(|e| e.retweeter_id.as_str()).collect();
    let influencers: BTreeSet<&str> = events.events().iter().map(|e| e.influencer_id.as_str()).collect();
    let report = IngestCheckReport {
        n_events: events.len(),
        skipped: parse.skipped,
        rejected: parse.rejected,
        n_retweeters: retweeters.len(),
        n_influencers: influencers.len(),
    };
    ctx.write_manifest("ingest-check")?;
    write_json(&ctx.path("report.json"), &report)?;
    print_json(&report);
    Ok(())
}

pub fn cmd_ideology(ctx: &Ctx) -> Result<(), CliError> {
    if ctx.dry_run {
        ctx.config
            .input
            .as_ref()
            .ok_or_else(|| CliError::config("missing_input", "no input file configured"))?;
        ctx.load_seeds()?;
        dry_run_notice("ideology");
        return Ok(());
    }
    let (events, _) = ctx.load_events()?;
    let seeds = ctx.load_seeds()?;
    let anchor = ctx.anchor(&seeds);
    let out = run_seed_pipeline(&events, &seeds, &anchor)?;
    let scores = out.scores.user_score_vec();
    let dip = dip_test(&scores, ctx.config.n_bootstrap, sweep_rng(&ctx.config))
        .map_err(|e| CliError::pipeline("dip_failed", e.to_string()))?;
    let lwcc = lwcc_relative_size(out.filtered.events())
        .map_err(|e| CliError::pipeline("empty_graph", e.to_string()))?;
    let report = MetricsReport {
        dip,
        wasserstein_to_reference: 0.0,
        lwcc_relative: lwcc,
        n_retweets: out.n_retweets,
        n_users: out.n_users,
        n_influencers: out.n_influencers,
    };
    ctx.write_manifest("ideology")?;
    let mut w = BufWriter::new(File::create(ctx.path("scores.csv"))?);
    out.scores.export_csv(&mut w)?;
    write_json(&ctx.path("report.json"), &report)?;
    let hist_dir = ctx.path("histograms");
    std::fs::create_dir_all(&hist_dir)?;
    let mut w = BufWriter::new(File::create(hist_dir.join("scores.csv"))?);
    export_histogram_csv(&scores, ctx.config.histogram_bins, &mut w)?;
    print_json(&report);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKindArg {
    Random,
    Seed,
    Keyword,
}

#[derive(Serialize)]
struct KeywordSweepReport {
    seeds_branch: MetricsReport,
    all_influencers_branch: MetricsReport,
}

pub fn cmd_sweep(ctx: &Ctx, kind: SweepKindArg) -> Result<(), CliError> {
    if ctx.dry_run {
        ctx.config
            .input
            .as_ref()
            .ok_or_else(|| CliError::config("missing_input", "no input file configured"))?;
        ctx.load_seeds()?;
        if kind == SweepKindArg::Keyword {
            ctx.load_keywords()?;
        }
        dry_run_notice("sweep");
        return Ok(());
    }
    let (events, _) = ctx.load_events()?;
    let seeds = ctx.load_seeds()?;
    let anchor = ctx.anchor(&seeds);
    let cfg = &ctx.config;
    match kind {
        SweepKindArg::Random => {
            let result = run_random_sweep(
                &events,
                &seeds,
                &anchor,
                &cfg.fractions,
                cfg.replicates,
                cfg.n_bootstrap,
                sweep_rng(cfg),
                cfg.lwcc_mode,
            )?;
            ctx.write_manifest("sweep")?;
            write_sweep_outputs(ctx, &result)?;
            print_json(&result.reference_report);
        }
        SweepKindArg::Seed => {
            let result = run_seed_sweep(
                &events,
                &seeds,
                &anchor,
                &cfg.alphas,
                cfg.n_bootstrap,
                sweep_rng(cfg),
                cfg.lwcc_mode,
            )?;
            ctx.write_manifest("sweep")?;
            write_sweep_outputs(ctx, &result)?;
            print_json(&result.reference_report);
        }
        SweepKindArg::Keyword => {
            let kw = ctx.load_keywords()?;
            let result =
                run_keyword_experiment(&events, &kw, &seeds, &anchor, cfg.n_bootstrap, sweep_rng(cfg))?;
            ctx.write_manifest("sweep")?;
            let report = KeywordSweepReport {
                seeds_branch: result.seeds_branch.report.clone(),
                all_influencers_branch: result.all_influencers_branch.report.clone(),
            };
            write_json(&ctx.path("report.json"), &report)?;
            let mut w = BufWriter::new(File::create(ctx.path("scores.csv"))?);
            result.all_influencers_branch.scores.export_csv(&mut w)?;
            let hist_dir = ctx.path("histograms");
            std::fs::create_dir_all(&hist_dir)?;
            for (name, branch) in [
                ("seeds.csv", &result.seeds_branch),
                ("all_influencers.csv", &result.all_influencers_branch),
            ] {
                let mut w = BufWriter::new(File::create(hist_dir.join(name))?);
                export_histogram_csv(
                    &branch.scores.user_score_vec(),
                    cfg.histogram_bins,
                    &mut w,
                )?;
            }
            print_json(&report);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct KeywordBiasReport {
    bias: KeywordBiasResult,
    comparison: Option<KeywordBiasComparison>,
    comparison_error: Option<String>,
}

pub fn cmd_keywords_bias(ctx: &Ctx) -> Result<(), CliError> {
    if ctx.dry_run {
        ctx.config
            .input
            .as_ref()
            .ok_or_else(|| CliError::config("missing_input", "no input file configured"))?;
        ctx.load_seeds()?;
        ctx.load_keywords()?;
        dry_run_notice("keywords-bias");
        return Ok(());
    }
    let (events, _) = ctx.load_events()?;
    let seeds = ctx.load_seeds()?;
    let anchor = ctx.anchor(&seeds);
    let kw = ctx.load_keywords()?;
    let baseline = run_seed_pipeline(&events, &seeds, &anchor)?;
    let bias = polarnet::keyword_bias_split(&events, &kw, &baseline.scores, ctx.config.min_support)?;
    let (comparison, comparison_error) = match run_biased_keyword_comparison(
        &events,
        &bias,
        &kw,
        &seeds,
        &anchor,
        &baseline.scores,
    ) {
        Ok(c) => (Some(c), None),
        Err(e) => {
            eprintln!("biased comparison unavailable: {e}");
            (None, Some(CliError::from(e).code))
        }
    };
    let report = KeywordBiasReport {
        bias,
        comparison,
        comparison_error,
    };
    ctx.write_manifest("keywords-bias")?;
    write_json(&ctx.path("report.json"), &report)?;
    if let Some(c) = &report.comparison {
        let hist_dir = ctx.path("histograms");
        std::fs::create_dir_all(&hist_dir)?;
        for (name, values) in [
            ("left_only.csv", &c.left_only),
            ("right_only.csv", &c.right_only),
            ("union.csv", &c.union),
        ] {
            let mut w = BufWriter::new(File::create(hist_dir.join(name))?);
            export_histogram_csv(values, ctx.config.histogram_bins, &mut w)?;
        }
    }
    print_json(&report);
    Ok(())
}

#[derive(Serialize)]
struct SynthSummary {
    n_events: usize,
    n_users: usize,
    n_influencers: usize,
}

pub fn cmd_synth(ctx: &Ctx) -> Result<(), CliError> {
    let synth = ctx
        .config
        .synth
        .as_ref()
        .ok_or_else(|| CliError::config("missing_synth_config", "no [synth] section configured"))?;
    synth
        .validate()
        .map_err(|e| CliError::config("invalid_synth_config", e.to_string()))?;
    if ctx.dry_run {
        dry_run_notice("synth");
        return Ok(());
    }
    let (events, truth) = generate(synth, RngStream::new(synth.rng_seed))
        .map_err(|e| CliError::config("invalid_synth_config", e.to_string()))?;
    ctx.write_manifest("synth")?;
    let mut w = BufWriter::new(File::create(ctx.path("events.jsonl"))?);
    export_jsonl(&events, &mut w)?;
    let mut w = BufWriter::new(File::create(ctx.path("labels.csv"))?);
    truth.export_csv(&mut w)?;
    let summary = SynthSummary {
        n_events: events.len(),
        n_users: truth.user_faction.len(),
        n_influencers: truth.influencer_faction.len(),
    };
    write_json(&ctx.path("report.json"), &summary)?;
    print_json(&summary);
    Ok(())
}
