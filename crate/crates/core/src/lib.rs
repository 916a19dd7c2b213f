//! Structural polarization of retweet networks.
//!
//! The pipeline: ingest retweet events, build the sparse user x influencer
//! interaction matrix, estimate one-dimensional latent ideology scores by
//! correspondence analysis, and quantify polarization with Hartigan's dip
//! test, the 1-D Wasserstein distance to a reference distribution, and the
//! relative size of the largest weakly connected component.
//!
//! On top of the pipeline sit sampling experiments (random subsets,
//! top-retweeted seed fractions, keyword filters) that measure how partial
//! data distorts the polarization estimate, plus a synthetic generator of
//! planted two-faction networks used to verify the sweeps at desk scale.

pub mod dip;
pub mod experiments;
pub mod graph;
pub mod ideology;
pub mod ingest;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod synthetic;
pub mod types;
pub mod wasserstein;

pub use dip::{dip_pvalue, dip_statistic, dip_test, DipResult, Verdict};
pub use experiments::{
    keyword_bias_split, run_biased_keyword_comparison, run_keyword_experiment, run_random_sweep,
    run_seed_sweep, KeywordBiasResult, LwccMode, SweepPoint, SweepResult,
};
pub use graph::lwcc_relative_size;
pub use ideology::{
    correspondence_analysis, normalize_scores, sign_convention, IdeologyScores,
};
pub use ingest::{
    filter_by_keywords, filter_by_seeds, parse_events, random_sample, top_retweeted_seeds,
    InputFormat, KeywordSet, MatchMode,
};
pub use matrix::{build_matrix, prune_single_influencer_users, InteractionMatrix};
pub use pipeline::{run_seed_pipeline, PipelineError, PipelineOutput};
pub use metrics::MetricsReport;
pub use rng::RngStream;
pub use synthetic::{generate, Faction, GroundTruth, Popularity, SyntheticConfig};
pub use types::{validate_event, EventSet, RawEvent, RetweetEvent, SampleSpec};
