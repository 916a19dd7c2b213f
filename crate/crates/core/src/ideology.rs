//! Correspondence analysis on the interaction matrix: one-dimensional latent
//! ideology scores for users and influencers.
//!
//! The matrix is normalized to `P = A / total`, centered by the outer product
//! of its row and column masses, and chi-square standardized:
//! `S = D_r^{-1/2} (P - r c^T) D_c^{-1/2}`. The user score is the row
//! standard coordinate on the axis of the leading singular value of `S`
//! (the centering already removes the trivial dimension); influencer scores
//! are the median of their retweeters' scores.

use crate::matrix::InteractionMatrix;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IdeologyError {
    #[error("SVD did not converge")]
    NumericalFailure,
    #[error("leading singular value below threshold: no structure")]
    DegenerateSpectrum,
    #[error("all user scores are equal")]
    ZeroVariance,
    #[error("no anchor id among scored influencers")]
    AnchorAbsent,
    #[error("matrix must be pruned first: {0}")]
    NotPruned(String),
}

/// Latent positions on the first correspondence-analysis axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdeologyScores {
    user_scores: BTreeMap<String, f64>,
    influencer_scores: BTreeMap<String, f64>,
    /// All singular values of the centered matrix, descending.
    singular_values: Vec<f64>,
    normalized: bool,
}

impl IdeologyScores {
    pub fn user_scores(&self) -> &BTreeMap<String, f64> {
        &self.user_scores
    }

    pub fn influencer_scores(&self) -> &BTreeMap<String, f64> {
        &self.influencer_scores
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// User scores as a vector, in id order.
    pub fn user_score_vec(&self) -> Vec<f64> {
        self.user_scores.values().copied().collect()
    }

    /// CSV export with columns `(id, role, score)`.
    pub fn export_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "id,role,score")?;
        for (id, score) in &self.user_scores {
            writeln!(w, "{id},user,{score}")?;
        }
        for (id, score) in &self.influencer_scores {
            writeln!(w, "{id},influencer,{score}")?;
        }
        Ok(())
    }
}

const SPECTRUM_EPS: f64 = 1e-12;

/// Run correspondence analysis on a pruned matrix. Returns unnormalized
/// scores.
pub fn correspondence_analysis(a: &InteractionMatrix) -> Result<IdeologyScores, IdeologyError> {
    let (n, m) = (a.n_rows(), a.n_cols());
    if n < 2 || m < 2 {
        return Err(IdeologyError::NotPruned(format!("{n} rows x {m} cols")));
    }
    let total = a.total() as f64;

    // Row and column masses of P = A / total.
    let mut r = vec![0.0f64; n];
    let mut c = vec![0.0f64; m];
    for i in 0..n {
        for &(j, count) in a.row(i) {
            let p = count as f64 / total;
            r[i] += p;
            c[j] += p;
        }
    }
    // Pruning guarantees no zero row/column; masses are therefore positive.
    debug_assert!(r.iter().all(|&x| x > 0.0) && c.iter().all(|&x| x > 0.0));

    let inv_sqrt_r: Vec<f64> = r.iter().map(|&x| 1.0 / x.sqrt()).collect();
    let inv_sqrt_c: Vec<f64> = c.iter().map(|&x| 1.0 / x.sqrt()).collect();

    // S = D_r^{-1/2} (P - r c^T) D_c^{-1/2}, dense.
    let mut s = DMatrix::<f64>::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            s[(i, j)] = -inv_sqrt_r[i] * r[i] * c[j] * inv_sqrt_c[j];
        }
        for &(j, count) in a.row(i) {
            s[(i, j)] += inv_sqrt_r[i] * (count as f64 / total) * inv_sqrt_c[j];
        }
    }

    // The leading left singular vector of S via the eigendecomposition of
    // the (small) m x m Gram matrix: u = S v / sigma.
    let gram = s.transpose() * &s;
    let eig = nalgebra::SymmetricEigen::try_new(gram, f64::EPSILON, 0)
        .ok_or(IdeologyError::NumericalFailure)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let leading = order[0];
    let singular_values: Vec<f64> = order
        .iter()
        .map(|&k| eig.eigenvalues[k].max(0.0).sqrt())
        .collect();
    let sigma = singular_values[0];
    if sigma < SPECTRUM_EPS || !sigma.is_finite() {
        return Err(IdeologyError::DegenerateSpectrum);
    }
    let u = &s * eig.eigenvectors.column(leading) / sigma;

    // Row standard coordinates on the leading axis.
    let mut user_scores = BTreeMap::new();
    for i in 0..n {
        user_scores.insert(a.row_ids()[i].clone(), u[i] * inv_sqrt_r[i]);
    }

    // Influencer score: median of the retweeters' scores.
    let mut per_col: Vec<Vec<f64>> = vec![Vec::new(); m];
    for i in 0..n {
        let score = user_scores[&a.row_ids()[i]];
        for &(j, _) in a.row(i) {
            per_col[j].push(score);
        }
    }
    let mut influencer_scores = BTreeMap::new();
    for (j, scores) in per_col.iter_mut().enumerate() {
        influencer_scores.insert(a.col_ids()[j].clone(), median(scores));
    }

    Ok(IdeologyScores {
        user_scores,
        influencer_scores,
        singular_values,
        normalized: false,
    })
}

/// Median; even-size sets take the mean of the two central values.
fn median(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Affine-transform user scores to mean 0 and sample standard deviation 1
/// (n-1 denominator), applying the same transform to influencer scores.
pub fn normalize_scores(s: &IdeologyScores) -> Result<IdeologyScores, IdeologyError> {
    let values: Vec<f64> = s.user_scores.values().copied().collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(IdeologyError::ZeroVariance);
    }
    let std = var.sqrt();
    let transform = |v: f64| (v - mean) / std;
    Ok(IdeologyScores {
        user_scores: s
            .user_scores
            .iter()
            .map(|(k, &v)| (k.clone(), transform(v)))
            .collect(),
        influencer_scores: s
            .influencer_scores
            .iter()
            .map(|(k, &v)| (k.clone(), transform(v)))
            .collect(),
        singular_values: s.singular_values.clone(),
        normalized: true,
    })
}

/// Fix the arbitrary SVD sign: if the mean score of the anchor influencers
/// (expected on the negative side) is positive, flip all scores.
pub fn sign_convention(
    s: &IdeologyScores,
    anchor: &BTreeSet<String>,
) -> Result<IdeologyScores, IdeologyError> {
    let anchor_scores: Vec<f64> = anchor
        .iter()
        .filter_map(|id| s.influencer_scores.get(id))
        .copied()
        .collect();
    if anchor_scores.is_empty() {
        return Err(IdeologyError::AnchorAbsent);
    }
    let mean = anchor_scores.iter().sum::<f64>() / anchor_scores.len() as f64;
    if mean <= 0.0 {
        return Ok(s.clone());
    }
    Ok(IdeologyScores {
        user_scores: s.user_scores.iter().map(|(k, &v)| (k.clone(), -v)).collect(),
        influencer_scores: s
            .influencer_scores
            .iter()
            .map(|(k, &v)| (k.clone(), -v))
            .collect(),
        singular_values: s.singular_values.clone(),
        normalized: s.normalized,
    })
}
