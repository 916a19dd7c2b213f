//! The seed pipeline: restrict events to a seed influencer set, build and
//! prune the interaction matrix, run correspondence analysis, normalize,
//! and fix the sign with an anchor set.

use crate::ideology::{
    correspondence_analysis, normalize_scores, sign_convention, IdeologyError, IdeologyScores,
};
use crate::matrix::{build_matrix, prune_single_influencer_users, MatrixError};
use crate::types::EventSet;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("no events target the seed set")]
    NoSeedsPresent,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Ideology(#[from] IdeologyError),
}

impl PipelineError {
    /// Stable machine-readable code for error JSON and sweep tables.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::NoSeedsPresent => "no_seeds_present",
            PipelineError::Matrix(MatrixError::EmptyMatrix) => "empty_matrix",
            PipelineError::Matrix(MatrixError::MatrixDegenerate { .. }) => "matrix_degenerate",
            PipelineError::Matrix(_) => "matrix_invalid",
            PipelineError::Ideology(IdeologyError::NumericalFailure) => "numerical_failure",
            PipelineError::Ideology(IdeologyError::DegenerateSpectrum) => "degenerate_spectrum",
            PipelineError::Ideology(IdeologyError::ZeroVariance) => "zero_variance",
            PipelineError::Ideology(IdeologyError::AnchorAbsent) => "anchor_absent",
            PipelineError::Ideology(IdeologyError::NotPruned(_)) => "matrix_degenerate",
        }
    }
}

/// Scores plus the filtered events they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub scores: IdeologyScores,
    /// Events targeting the seed set, before matrix pruning.
    pub filtered: EventSet,
    pub n_retweets: usize,
    pub n_users: usize,
    pub n_influencers: usize,
}

/// Run the full estimation on `events` with the given influencer seed set.
/// Returned scores are normalized and sign-fixed against `anchor` (a subset
/// of influencer ids expected on the negative side).
pub fn run_seed_pipeline(
    events: &EventSet,
    seeds: &BTreeSet<String>,
    anchor: &BTreeSet<String>,
) -> Result<PipelineOutput, PipelineError> {
    let filtered = crate::ingest::filter_by_seeds(events, seeds);
    if filtered.is_empty() {
        return Err(PipelineError::NoSeedsPresent);
    }
    let matrix = build_matrix(&filtered, seeds)?;
    let pruned = prune_single_influencer_users(&matrix)?;
    let raw = correspondence_analysis(&pruned)?;
    let normalized = normalize_scores(&raw)?;
    let scores = sign_convention(&normalized, anchor)?;
    Ok(PipelineOutput {
        n_retweets: filtered.len(),
        n_users: pruned.n_rows(),
        n_influencers: pruned.n_cols(),
        scores,
        filtered,
    })
}
