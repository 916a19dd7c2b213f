//! One-dimensional Wasserstein-1 distance between empirical distributions.
//!
//! In one dimension the optimal transport cost equals the integral of the
//! absolute difference of the two quantile functions, which for empirical
//! samples is a finite sum over the merged probability breakpoints.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WassersteinError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

/// Wasserstein-1 distance between the empirical distributions of `a` and `b`.
/// Samples may differ in size; inputs need not be sorted.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64, WassersteinError> {
    if a.is_empty() || b.is_empty() {
        return Err(WassersteinError::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(WassersteinError::NonFinite);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut p = 0.0f64;
    let mut dist = 0.0f64;
    // walk the merged breakpoints of the two quantile functions
    while i < xs.len() && j < ys.len() {
        let pi = (i + 1) as f64 / n;
        let pj = (j + 1) as f64 / m;
        let next = pi.min(pj);
        dist += (xs[i] - ys[j]).abs() * (next - p);
        p = next;
        if pi <= next + 1e-18 {
            i += 1;
        }
        if pj <= next + 1e-18 {
            j += 1;
        }
    }
    Ok(dist)
}
