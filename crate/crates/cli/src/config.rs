//! Run configuration: TOML file, command-line overrides, and the manifest
//! written alongside every run so it can be reproduced exactly.

use polarnet::experiments::LwccMode;
use polarnet::synthetic::SyntheticConfig;
use polarnet::InputFormat;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Input file format as named in config files and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Jsonl,
    Csv,
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> InputFormat {
        match f {
            Format::Jsonl => InputFormat::JsonLines,
            Format::Csv => InputFormat::Csv,
        }
    }
}

/// Keyword matching mode as named in config files and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KeywordMatch {
    WordBoundary,
    Substring,
}

impl From<KeywordMatch> for polarnet::MatchMode {
    fn from(m: KeywordMatch) -> polarnet::MatchMode {
        match m {
            KeywordMatch::WordBoundary => polarnet::MatchMode::SubstringWordBoundary,
            KeywordMatch::Substring => polarnet::MatchMode::PlainSubstring,
        }
    }
}

/// Everything a run needs, resolvable from a TOML file with every field
/// overridable by a flag. The fully resolved value is echoed into the
/// manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Event file (JSONL or CSV).
    pub input: Option<PathBuf>,
    pub format: Format,
    pub allow_self_retweets: bool,
    /// Seed (influencer) id list, one id per line.
    pub seeds: Option<PathBuf>,
    /// Keyword list, one term per line; ';' starts a comment line.
    pub keywords: Option<PathBuf>,
    pub keyword_match: KeywordMatch,
    /// Ids anchoring the negative end of the score axis. Defaults to the
    /// seed set when empty.
    pub anchor_ids: Vec<String>,
    /// Event fractions for the random sweep.
    pub fractions: Vec<f64>,
    /// Seed-share values for the seed sweep.
    pub alphas: Vec<f64>,
    pub replicates: usize,
    pub rng_seed: u64,
    pub n_bootstrap: usize,
    pub histogram_bins: usize,
    /// Minimum matching tweets for a keyword to enter the bias split.
    pub min_support: usize,
    pub lwcc_mode: LwccMode,
    /// Generator settings for the synth subcommand.
    pub synth: Option<SyntheticConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            format: Format::Jsonl,
            allow_self_retweets: false,
            seeds: None,
            keywords: None,
            keyword_match: KeywordMatch::WordBoundary,
            anchor_ids: Vec::new(),
            fractions: vec![0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0],
            alphas: vec![0.01, 0.03, 0.05, 0.1, 0.2, 0.5, 1.0],
            replicates: 5,
            rng_seed: 42,
            n_bootstrap: 1000,
            histogram_bins: 50,
            min_support: 1,
            lwcc_mode: LwccMode::SampledGraph,
            synth: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Ok(toml::from_str(&text)?)
    }
}

/// Written as `manifest.json` by every run. Rerunning a subcommand with
/// `--manifest` replays exactly this configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
        }
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read manifest {}: {e}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
