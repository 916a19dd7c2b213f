//! Sampling experiments: how random subsets, seed-set truncation, and
//! keyword filters distort the polarization estimate.
//!
//! Every sweep computes a reference run on the full data first; each sampled
//! point reports its dip test, Wasserstein distance to the reference score
//! distribution, and relative LWCC size. Pipeline failures at a point are
//! recorded as data, not raised: fragmentation is a finding.

use crate::dip::{dip_test, DipError, Verdict};
use crate::graph::{lwcc_size, GraphError};
use crate::ideology::IdeologyScores;
use crate::ingest::{filter_by_keywords, filter_by_seeds, random_sample, top_retweeted_seeds, IngestError, KeywordSet};
use crate::metrics::MetricsReport;
use crate::pipeline::{run_seed_pipeline, PipelineError, PipelineOutput};
use crate::rng::RngStream;
use crate::types::EventSet;
use crate::wasserstein::wasserstein_1d;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("reference pipeline failed: {0}")]
    ReferenceFailed(String),
    #[error("no keyword reaches the support threshold")]
    NoScoredTweets,
    #[error("keyword set for one side is empty")]
    EmptyKeywords,
    #[error("invalid sweep config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dip(#[from] DipError),
    #[error(transparent)]
    Wasserstein(#[from] crate::wasserstein::WassersteinError),
}

/// Denominator used for relative LWCC size at sweep points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LwccMode {
    /// Component size over the sampled graph's own node count.
    SampledGraph,
    /// Component size over the reference graph's node count.
    FullGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Random,
    Seed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub fractions: Vec<f64>,
    pub replicates: usize,
    pub n_bootstrap: usize,
    pub rng_seed: u64,
    pub rng_stream: u64,
    pub lwcc_mode: LwccMode,
}

/// One (fraction, replicate) cell. A point that could not be scored keeps
/// its sample-level quantities and carries the failure code instead of a
/// report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub fraction: f64,
    pub replicate: usize,
    pub n_retweets: usize,
    pub lwcc_relative: Option<f64>,
    pub report: Option<MetricsReport>,
    pub error_code: Option<String>,
}

impl SweepPoint {
    pub fn is_failed(&self) -> bool {
        self.report.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub reference_scores: IdeologyScores,
    pub reference_report: MetricsReport,
    /// Sorted by (fraction, replicate), fractions ascending.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str =
        "fraction,replicate,n_retweets,dip_statistic,dip_p_value,verdict,wasserstein,lwcc_relative,error";

    /// Long-format CSV, one row per point.
    pub fn export_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            let (d, pv, verdict, wass) = match &p.report {
                Some(r) => (
                    r.dip.statistic.to_string(),
                    r.dip.p_value.to_string(),
                    match r.dip.verdict {
                        Verdict::Multimodal => "multimodal",
                        Verdict::UnimodalNotRejected => "unimodal_not_rejected",
                    }
                    .to_string(),
                    r.wasserstein_to_reference.to_string(),
                ),
                None => (String::new(), String::new(), String::new(), String::new()),
            };
            let lwcc = p.lwcc_relative.map(|v| v.to_string()).unwrap_or_default();
            let err = p.error_code.clone().unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                p.fraction, p.replicate, p.n_retweets, d, pv, verdict, wass, lwcc, err
            )?;
        }
        Ok(())
    }
}

/// Histogram with equal-width bins over the value range; the last bin is
/// right-closed. Returns (bin_left, bin_right, count) rows.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    assert!(bins > 0);
    if values.is_empty() {
        return Vec::new();
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if max > min { (max - min) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    (0..bins)
        .map(|k| (min + k as f64 * width, min + (k + 1) as f64 * width, counts[k]))
        .collect()
}

pub fn export_histogram_csv(
    values: &[f64],
    bins: usize,
    mut w: impl std::io::Write,
) -> std::io::Result<()> {
    writeln!(w, "bin_left,bin_right,count")?;
    for (l, r, c) in histogram(values, bins) {
        writeln!(w, "{l},{r},{c}")?;
    }
    Ok(())
}

const BOOTSTRAP_SUBSTREAM: u64 = u64::MAX;

struct SweepContext<'a> {
    anchor: &'a BTreeSet<String>,
    n_bootstrap: usize,
    lwcc_mode: LwccMode,
    boot_stream: RngStream,
    reference_scores: Vec<f64>,
    reference_nodes: usize,
}

/// Score one sampled event set against the reference. The bootstrap stream
/// is shared across points so an identical sample reproduces the reference
/// dip result bit for bit.
fn evaluate_point(
    ctx: &SweepContext,
    fraction: f64,
    replicate: usize,
    sample: &EventSet,
    seeds: &BTreeSet<String>,
) -> SweepPoint {
    let filtered = filter_by_seeds(sample, seeds);
    let n_retweets = filtered.len();
    let lwcc_relative = lwcc_size(filtered.events()).ok().map(|(largest, n)| {
        let denom = match ctx.lwcc_mode {
            LwccMode::SampledGraph => n,
            LwccMode::FullGraph => ctx.reference_nodes,
        };
        largest as f64 / denom as f64
    });
    let fail = |code: &str| SweepPoint {
        fraction,
        replicate,
        n_retweets,
        lwcc_relative,
        report: None,
        error_code: Some(code.to_string()),
    };
    let out = match run_seed_pipeline(sample, seeds, ctx.anchor) {
        Ok(out) => out,
        Err(e) => return fail(e.code()),
    };
    let user_scores = out.scores.user_score_vec();
    let dip = match dip_test(&user_scores, ctx.n_bootstrap, ctx.boot_stream) {
        Ok(d) => d,
        Err(_) => return fail("too_few_samples"),
    };
    let wasserstein = wasserstein_1d(&user_scores, &ctx.reference_scores)
        .expect("both score sets non-empty");
    SweepPoint {
        fraction,
        replicate,
        n_retweets,
        lwcc_relative,
        report: Some(MetricsReport {
            dip,
            wasserstein_to_reference: wasserstein,
            lwcc_relative: lwcc_relative.unwrap_or(0.0),
            n_retweets,
            n_users: out.n_users,
            n_influencers: out.n_influencers,
        }),
        error_code: None,
    }
}

fn reference_context<'a>(
    events: &EventSet,
    seeds: &BTreeSet<String>,
    anchor: &'a BTreeSet<String>,
    n_bootstrap: usize,
    lwcc_mode: LwccMode,
    rng: RngStream,
) -> Result<(SweepContext<'a>, PipelineOutput, MetricsReport), ExperimentError> {
    let reference = run_seed_pipeline(events, seeds, anchor)
        .map_err(|e| ExperimentError::ReferenceFailed(e.code().to_string()))?;
    let boot_stream = rng.substream(BOOTSTRAP_SUBSTREAM);
    let reference_scores = reference.scores.user_score_vec();
    let (largest, nodes) = lwcc_size(reference.filtered.events())?;
    let dip = dip_test(&reference_scores, n_bootstrap, boot_stream)?;
    let report = MetricsReport {
        dip,
        wasserstein_to_reference: 0.0,
        lwcc_relative: largest as f64 / nodes as f64,
        n_retweets: reference.n_retweets,
        n_users: reference.n_users,
        n_influencers: reference.n_influencers,
    };
    let ctx = SweepContext {
        anchor,
        n_bootstrap,
        lwcc_mode,
        boot_stream,
        reference_scores,
        reference_nodes: nodes,
    };
    Ok((ctx, reference, report))
}

fn check_fractions(fractions: &[f64]) -> Result<Vec<f64>, ExperimentError> {
    if fractions.is_empty() {
        return Err(ExperimentError::ConfigInvalid("no fractions given".into()));
    }
    if fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
        return Err(ExperimentError::ConfigInvalid(
            "fractions must lie in (0, 1]".into(),
        ));
    }
    let mut sorted = fractions.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sorted)
}

/// Random-subsample sweep: for each fraction and replicate, draw a uniform
/// subset of all events and rerun the full estimation.
pub fn run_random_sweep(
    events: &EventSet,
    seeds: &BTreeSet<String>,
    anchor: &BTreeSet<String>,
    fractions: &[f64],
    replicates: usize,
    n_bootstrap: usize,
    rng: RngStream,
    lwcc_mode: LwccMode,
) -> Result<SweepResult, ExperimentError> {
    let fractions = check_fractions(fractions)?;
    if replicates == 0 {
        return Err(ExperimentError::ConfigInvalid("replicates must be >= 1".into()));
    }
    let (ctx, reference, reference_report) =
        reference_context(events, seeds, anchor, n_bootstrap, lwcc_mode, rng)?;

    let cells: Vec<(usize, f64, usize)> = fractions
        .iter()
        .enumerate()
        .flat_map(|(fi, &f)| (0..replicates).map(move |rep| (fi, f, rep)))
        .collect();
    let mut points: Vec<SweepPoint> = cells
        .par_iter()
        .map(|&(fi, fraction, rep)| {
            let sample_stream = rng.substream((fi * replicates + rep) as u64);
            let sample = random_sample(events, fraction, sample_stream)
                .expect("fractions validated above");
            evaluate_point(&ctx, fraction, rep, &sample, seeds)
        })
        .collect();
    points.sort_by(|a, b| {
        a.fraction
            .partial_cmp(&b.fraction)
            .unwrap()
            .then(a.replicate.cmp(&b.replicate))
    });

    Ok(SweepResult {
        config: SweepConfig {
            kind: SweepKind::Random,
            fractions,
            replicates,
            n_bootstrap,
            rng_seed: rng.seed,
            rng_stream: rng.stream_id,
            lwcc_mode,
        },
        reference_scores: reference.scores,
        reference_report,
        points,
    })
}

/// Seed-fraction sweep: for each alpha, keep only the top retweeted alpha
/// share of the seed set and rerun the estimation on all events. No sampling
/// randomness beyond the dip bootstrap.
pub fn run_seed_sweep(
    events: &EventSet,
    seeds: &BTreeSet<String>,
    anchor: &BTreeSet<String>,
    alphas: &[f64],
    n_bootstrap: usize,
    rng: RngStream,
    lwcc_mode: LwccMode,
) -> Result<SweepResult, ExperimentError> {
    let alphas = check_fractions(alphas)?;
    let (ctx, reference, reference_report) =
        reference_context(events, seeds, anchor, n_bootstrap, lwcc_mode, rng)?;

    let mut points: Vec<SweepPoint> = alphas
        .par_iter()
        .map(|&alpha| match top_retweeted_seeds(events, seeds, alpha) {
            Ok(subset) => evaluate_point(&ctx, alpha, 0, events, &subset),
            Err(e) => SweepPoint {
                fraction: alpha,
                replicate: 0,
                n_retweets: 0,
                lwcc_relative: None,
                report: None,
                error_code: Some(match e {
                    IngestError::NoSeedsPresent => "no_seeds_present".to_string(),
                    _ => "config_invalid".to_string(),
                }),
            },
        })
        .collect();
    points.sort_by(|a, b| a.fraction.partial_cmp(&b.fraction).unwrap());

    Ok(SweepResult {
        config: SweepConfig {
            kind: SweepKind::Seed,
            fractions: alphas,
            replicates: 1,
            n_bootstrap,
            rng_seed: rng.seed,
            rng_stream: rng.stream_id,
            lwcc_mode,
        },
        reference_scores: reference.scores,
        reference_report,
        points,
    })
}

/// Scores and report for one branch of the keyword experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchResult {
    pub report: MetricsReport,
    pub scores: IdeologyScores,
}

/// Result of [`run_keyword_experiment`]: the filtered data analyzed once
/// with the configured seed set and once with every retweeted account as an
/// influencer.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordExperimentResult {
    pub seeds_branch: BranchResult,
    pub all_influencers_branch: BranchResult,
}

/// Keyword filter, then the pipeline under two influencer definitions.
/// Wasserstein distances are taken against the unfiltered seed pipeline.
pub fn run_keyword_experiment(
    events: &EventSet,
    kw: &KeywordSet,
    seeds: &BTreeSet<String>,
    anchor: &BTreeSet<String>,
    n_bootstrap: usize,
    rng: RngStream,
) -> Result<KeywordExperimentResult, ExperimentError> {
    let baseline = run_seed_pipeline(events, seeds, anchor)
        .map_err(|e| ExperimentError::ReferenceFailed(e.code().to_string()))?;
    let baseline_scores = baseline.scores.user_score_vec();
    let boot_stream = rng.substream(BOOTSTRAP_SUBSTREAM);
    let filtered = filter_by_keywords(events, kw);

    let branch = |branch_seeds: &BTreeSet<String>| -> Result<BranchResult, ExperimentError> {
        let out = run_seed_pipeline(&filtered, branch_seeds, anchor)?;
        let user_scores = out.scores.user_score_vec();
        let dip = dip_test(&user_scores, n_bootstrap, boot_stream)?;
        let (largest, nodes) = lwcc_size(out.filtered.events())?;
        Ok(BranchResult {
            report: MetricsReport {
                dip,
                wasserstein_to_reference: wasserstein_1d(&user_scores, &baseline_scores)?,
                lwcc_relative: largest as f64 / nodes as f64,
                n_retweets: out.n_retweets,
                n_users: out.n_users,
                n_influencers: out.n_influencers,
            },
            scores: out.scores,
        })
    };

    let seeds_branch = branch(seeds)?;
    let all_influencers: BTreeSet<String> = filtered
        .events()
        .iter()
        .map(|e| e.influencer_id.clone())
        .collect();
    let all_influencers_branch = branch(&all_influencers)?;
    Ok(KeywordExperimentResult {
        seeds_branch,
        all_influencers_branch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordStats {
    pub n_tweets: usize,
    pub mean_ideology: f64,
    pub scores: Vec<f64>,
}

/// Keywords partitioned by the mean ideology of their tweets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordBiasResult {
    pub per_keyword: BTreeMap<String, KeywordStats>,
    pub left_set: Vec<String>,
    pub right_set: Vec<String>,
}

/// For each keyword with at least `min_support` scored tweets, compute the
/// mean score of the retweeting users; non-positive means go left.
pub fn keyword_bias_split(
    events: &EventSet,
    kw: &KeywordSet,
    scores: &IdeologyScores,
    min_support: usize,
) -> Result<KeywordBiasResult, ExperimentError> {
    let min_support = min_support.max(1);
    let mut collected: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for e in events.events() {
        let Some(&score) = scores.user_scores().get(&e.retweeter_id) else {
            continue;
        };
        for term in kw.matching_terms(&e.text) {
            collected.entry(term).or_default().push(score);
        }
    }
    let mut per_keyword = BTreeMap::new();
    let mut left_set = Vec::new();
    let mut right_set = Vec::new();
    for (term, scores) in collected {
        if scores.len() < min_support {
            continue;
        }
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        if mean <= 0.0 {
            left_set.push(term.to_string());
        } else {
            right_set.push(term.to_string());
        }
        per_keyword.insert(
            term.to_string(),
            KeywordStats {
                n_tweets: scores.len(),
                mean_ideology: mean,
                scores,
            },
        );
    }
    if per_keyword.is_empty() {
        return Err(ExperimentError::NoScoredTweets);
    }
    Ok(KeywordBiasResult {
        per_keyword,
        left_set,
        right_set,
    })
}

/// Baseline user score distributions restricted to the users reachable
/// through left-only, right-only, and union keyword filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordBiasComparison {
    pub left_only: Vec<f64>,
    pub right_only: Vec<f64>,
    pub union: Vec<f64>,
}

/// Rerun the seed pipeline on each biased keyword subset and collect the
/// baseline scores of the users that survive; the distributions shift with
/// the bias of the keyword list.
pub fn run_biased_keyword_comparison(
    events: &EventSet,
    bias: &KeywordBiasResult,
    kw: &KeywordSet,
    seeds: &BTreeSet<String>,
    anchor: &BTreeSet<String>,
    baseline: &IdeologyScores,
) -> Result<KeywordBiasComparison, ExperimentError> {
    if bias.left_set.is_empty() || bias.right_set.is_empty() {
        return Err(ExperimentError::EmptyKeywords);
    }
    let run = |terms: &[String]| -> Result<Vec<f64>, ExperimentError> {
        let subset = kw.restricted_to(terms)?;
        let filtered = filter_by_keywords(events, &subset);
        let out = run_seed_pipeline(&filtered, seeds, anchor)?;
        Ok(out
            .scores
            .user_scores()
            .keys()
            .filter_map(|id| baseline.user_scores().get(id))
            .copied()
            .collect())
    };
    let union: Vec<String> = bias
        .left_set
        .iter()
        .chain(&bias.right_set)
        .cloned()
        .collect();
    Ok(KeywordBiasComparison {
        left_only: run(&bias.left_set)?,
        right_only: run(&bias.right_set)?,
        union: run(&union)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::MatchMode;
    use crate::synthetic::{generate, Faction, SyntheticConfig};

    fn fixture() -> (EventSet, BTreeSet<String>, BTreeSet<String>) {
        let cfg = SyntheticConfig {
            n_users: 80,
            n_influencers: 10,
            n_events: 3000,
            ..SyntheticConfig::default()
        };
        let (events, truth) = generate(&cfg, RngStream::new(21)).unwrap();
        let seeds: BTreeSet<String> = truth.influencer_faction.keys().cloned().collect();
        let anchor: BTreeSet<String> = truth.influencers_of(Faction::Left).cloned().collect();
        (events, seeds, anchor)
    }

    #[test]
    fn full_fraction_point_matches_reference() {
        let (events, seeds, anchor) = fixture();
        let res = run_random_sweep(
            &events,
            &seeds,
            &anchor,
            &[1.0, 0.5],
            2,
            200,
            RngStream::new(1),
            LwccMode::SampledGraph,
        )
        .unwrap();
        assert_eq!(res.config.fractions, vec![0.5, 1.0]);
        assert_eq!(res.points.len(), 4);
        let full: Vec<&SweepPoint> =
            res.points.iter().filter(|p| p.fraction == 1.0).collect();
        for p in full {
            let r = p.report.as_ref().unwrap();
            assert_eq!(r.wasserstein_to_reference, 0.0);
            assert_eq!(r.dip, res.reference_report.dip);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let (events, seeds, anchor) = fixture();
        let run = || {
            run_random_sweep(
                &events,
                &seeds,
                &anchor,
                &[0.3, 0.7],
                3,
                200,
                RngStream::new(5),
                LwccMode::SampledGraph,
            )
            .unwrap()
        };
        let a = serde_json::to_string(&run()).unwrap();
        let b = serde_json::to_string(&run()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seed_sweep_alpha_one_is_the_reference() {
        let (events, seeds, anchor) = fixture();
        let res = run_seed_sweep(
            &events,
            &seeds,
            &anchor,
            &[0.5, 1.0],
            200,
            RngStream::new(2),
            LwccMode::SampledGraph,
        )
        .unwrap();
        let last = res.points.last().unwrap();
        assert_eq!(last.fraction, 1.0);
        assert_eq!(
            last.report.as_ref().unwrap().wasserstein_to_reference,
            0.0
        );
    }

    #[test]
    fn keyword_bias_split_sign_rule() {
        let (events, seeds, anchor) = fixture();
        let out = crate::pipeline::run_seed_pipeline(&events, &seeds, &anchor).unwrap();
        let kw = KeywordSet::new(
            vec![
                "redistribute".into(),
                "solidarity".into(),
                "union".into(),
                "tradition".into(),
                "sovereignty".into(),
                "market".into(),
            ],
            MatchMode::SubstringWordBoundary,
        )
        .unwrap();
        let bias = keyword_bias_split(&events, &kw, &out.scores, 5).unwrap();
        // anchor fixes left-faction vocabulary on the negative side
        for term in ["redistribute", "solidarity", "union"] {
            assert!(bias.left_set.iter().any(|t| t == term), "{term} not left");
        }
        for term in ["tradition", "sovereignty", "market"] {
            assert!(bias.right_set.iter().any(|t| t == term), "{term} not right");
        }
        for (term, stats) in &bias.per_keyword {
            assert!(stats.n_tweets >= 5, "{term}");
            assert_eq!(stats.scores.len(), stats.n_tweets);
        }
    }

    #[test]
    fn keyword_split_without_support_errors() {
        let (events, seeds, anchor) = fixture();
        let out = crate::pipeline::run_seed_pipeline(&events, &seeds, &anchor).unwrap();
        let kw = KeywordSet::new(vec!["absentterm".into()], MatchMode::SubstringWordBoundary)
            .unwrap();
        assert!(matches!(
            keyword_bias_split(&events, &kw, &out.scores, 1),
            Err(ExperimentError::NoScoredTweets)
        ));
    }

    #[test]
    fn histogram_partitions_the_sample() {
        let values = [0.0, 0.1, 0.5, 0.9, 1.0, 1.0];
        let h = histogram(&values, 4);
        assert_eq!(h.len(), 4);
        assert_eq!(h.iter().map(|&(_, _, c)| c).sum::<usize>(), values.len());
        assert_eq!(h[0].0, 0.0);
        assert_eq!(h[3].1, 1.0);
    }

    #[test]
    fn failed_points_keep_sample_counts() {
        let (events, seeds, anchor) = fixture();
        // fractions so small the pipeline cannot succeed
        let res = run_random_sweep(
            &events,
            &seeds,
            &anchor,
            &[0.002, 1.0],
            2,
            200,
            RngStream::new(9),
            LwccMode::SampledGraph,
        )
        .unwrap();
        let tiny: Vec<&SweepPoint> =
            res.points.iter().filter(|p| p.fraction == 0.002).collect();
        assert!(!tiny.is_empty());
        for p in tiny {
            if p.is_failed() {
                assert!(p.error_code.is_some());
                let mut csv = Vec::new();
                res.export_csv(&mut csv).unwrap();
            }
        }
    }
}
