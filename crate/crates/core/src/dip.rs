//! Hartigan's dip test for multimodality.
//!
//! The dip statistic of a sample is the smallest sup-distance between its
//! empirical CDF and any unimodal CDF. The significance level is estimated
//! by a bootstrap under the uniform null: the p-value is the fraction of
//! uniform samples of the same size whose dip is at least as large.

use crate::rng::RngStream;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DipError {
    #[error("dip test requires at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Multimodal,
    UnimodalNotRejected,
}

/// Significance threshold below which a sample is called multimodal.
pub const DIP_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub n_bootstrap: usize,
    pub verdict: Verdict,
}

/// The dip statistic. The input need not be sorted.
///
/// The computation follows the standard iterative scheme: maintain a working
/// interval, fit the greatest convex minorant and least concave majorant of
/// the empirical CDF on it, take the larger of the two deviations, and shrink
/// the interval to the modal segment until the candidate stops improving.
pub fn dip_statistic(values: &[f64]) -> Result<f64, DipError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(DipError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dip_sorted(&sorted)
}

fn dip_sorted(xs: &[f64]) -> Result<f64, DipError> {
    let n = xs.len();
    if n < 4 {
        return Err(DipError::TooFewSamples(n));
    }

    // 1-based arrays to mirror the classic formulation.
    let x = |i: usize| xs[i - 1];
    let mut mn = vec![0usize; n + 1];
    let mut mj = vec![0usize; n + 1];
    let mut gcm = vec![0usize; n + 1];
    let mut lcm = vec![0usize; n + 1];

    let mut low = 1usize;
    let mut high = n;
    let mut dip = 1.0f64;

    // mn[j]: previous touch point of the convex minorant ending at j.
    mn[1] = 1;
    for j in 2..=n {
        mn[j] = j - 1;
        loop {
            let mnj = mn[j];
            let mnmnj = mn[mnj];
            let lhs = (x(j) - x(mnj)) * (mnj as i64 - mnmnj as i64) as f64;
            if mnj == 1 || lhs < (x(mnj) - x(mnmnj)) * (j as i64 - mnj as i64) as f64 {
                break;
            }
            mn[j] = mnmnj;
        }
    }

    // mj[k]: next touch point of the concave majorant starting at k.
    mj[n] = n;
    for k in (1..n).rev() {
        mj[k] = k + 1;
        loop {
            let mjk = mj[k];
            let mjmjk = mj[mjk];
            let lhs = (x(k) - x(mjk)) * (mjk as i64 - mjmjk as i64) as f64;
            if mjk == n || lhs < (x(mjk) - x(mjmjk)) * (k as i64 - mjk as i64) as f64 {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    loop {
        // Change points of the minorant, high to low.
        gcm[1] = high;
        let mut i = 1;
        while gcm[i] > low {
            gcm[i + 1] = mn[gcm[i]];
            i += 1;
        }
        let l_gcm = i;
        let mut ig = l_gcm;
        let mut ix = ig - 1;

        // Change points of the majorant, low to high.
        lcm[1] = low;
        let mut i = 1;
        while lcm[i] < high {
            lcm[i + 1] = mj[lcm[i]];
            i += 1;
        }
        let l_lcm = i;
        let mut ih = l_lcm;
        let mut iv = 2;

        // Largest gap between minorant and majorant on [low, high].
        let mut d = 0.0f64;
        if l_gcm != 2 || l_lcm != 2 {
            loop {
                let gcmix = gcm[ix];
                let lcmiv = lcm[iv];
                if gcmix > lcmiv {
                    let gcmi1 = gcm[ix + 1];
                    let dx = (lcmiv as i64 - gcmi1 as i64 + 1) as f64
                        - (x(lcmiv) - x(gcmi1)) * (gcmix - gcmi1) as f64
                            / (x(gcmix) - x(gcmi1));
                    iv += 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    let lcmiv1 = lcm[iv - 1];
                    let dx = (x(gcmix) - x(lcmiv1)) * (lcmiv - lcmiv1) as f64
                        / (x(lcmiv) - x(lcmiv1))
                        - (gcmix as f64 - lcmiv1 as f64 - 1.0);
                    ix -= 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                if ix < 1 {
                    ix = 1;
                }
                if iv > l_lcm {
                    iv = l_lcm;
                }
                if gcm[ix] == lcm[iv] {
                    break;
                }
            }
        } else {
            d = 1.0;
        }
        if d < dip {
            break;
        }

        // Deviation of the CDF from the convex minorant over its modal side.
        let mut dip_l = 0.0f64;
        for j in ig..l_gcm {
            let jb = gcm[j + 1];
            let je = gcm[j];
            let mut max_t = 1.0f64;
            if je - jb > 1 && x(je) != x(jb) {
                let c = (je - jb) as f64 / (x(je) - x(jb));
                for jj in jb..=je {
                    let t = (jj - jb + 1) as f64 - (x(jj) - x(jb)) * c;
                    if t > max_t {
                        max_t = t;
                    }
                }
            }
            if max_t > dip_l {
                dip_l = max_t;
            }
        }

        // Same for the concave majorant.
        let mut dip_u = 0.0f64;
        for j in ih..l_lcm {
            let jb = lcm[j];
            let je = lcm[j + 1];
            let mut max_t = 1.0f64;
            if je - jb > 1 && x(je) != x(jb) {
                let c = (je - jb) as f64 / (x(je) - x(jb));
                for jj in jb..=je {
                    let t = (x(jj) - x(jb)) * c - (jj as f64 - jb as f64 - 1.0);
                    if t > max_t {
                        max_t = t;
                    }
                }
            }
            if max_t > dip_u {
                dip_u = max_t;
            }
        }

        let dipnew = dip_l.max(dip_u);
        if dipnew > dip {
            dip = dipnew;
        }
        low = gcm[ig];
        high = lcm[ih];
        if dip >= d {
            break;
        }
    }

    Ok(dip / (2.0 * n as f64))
}

/// Bootstrap p-value of an observed dip under the uniform null. Each
/// replicate draws its own substream so the result is independent of the
/// rayon schedule.
pub fn dip_pvalue(
    observed: f64,
    n: usize,
    n_bootstrap: usize,
    stream: RngStream,
) -> Result<f64, DipError> {
    if n < 4 {
        return Err(DipError::TooFewSamples(n));
    }
    let hits: usize = (0..n_bootstrap as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream.substream(rep).rng();
            let mut sample: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let d = dip_sorted(&sample).expect("bootstrap sample size checked above");
            usize::from(d >= observed)
        })
        .sum();
    Ok(hits as f64 / n_bootstrap as f64)
}

/// Dip statistic plus bootstrap significance in one call.
pub fn dip_test(
    values: &[f64],
    n_bootstrap: usize,
    stream: RngStream,
) -> Result<DipResult, DipError> {
    let statistic = dip_statistic(values)?;
    let p_value = dip_pvalue(statistic, values.len(), n_bootstrap, stream)?;
    let verdict = if p_value < DIP_ALPHA {
        Verdict::Multimodal
    } else {
        Verdict::UnimodalNotRejected
    };
    Ok(DipResult {
        statistic,
        p_value,
        n: values.len(),
        n_bootstrap,
        verdict,
    })
}
