//! Aggregated polarization measures for one analyzed sample.

use crate::dip::{DipResult, Verdict};
use serde::{Deserialize, Serialize};

/// Dip test, Wasserstein distance to the reference score distribution, and
/// relative LWCC size, plus the sample's headline counts. Serializes to a
/// flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(flatten)]
    pub dip: DipResult,
    pub wasserstein_to_reference: f64,
    pub lwcc_relative: f64,
    pub n_retweets: usize,
    pub n_users: usize,
    pub n_influencers: usize,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "dip_statistic,dip_p_value,dip_n,dip_n_bootstrap,verdict,wasserstein_to_reference,lwcc_relative,n_retweets,n_users,n_influencers";

    pub fn csv_row(&self) -> String {
        let verdict = match self.dip.verdict {
            Verdict::Multimodal => "multimodal",
            Verdict::UnimodalNotRejected => "unimodal_not_rejected",
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.dip.statistic,
            self.dip.p_value,
            self.dip.n,
            self.dip.n_bootstrap,
            verdict,
            self.wasserstein_to_reference,
            self.lwcc_relative,
            self.n_retweets,
            self.n_users,
            self.n_influencers
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> MetricsReport {
        MetricsReport {
            dip: DipResult {
                statistic: 0.08,
                p_value: 0.002,
                n: 120,
                n_bootstrap: 1000,
                verdict: Verdict::Multimodal,
            },
            wasserstein_to_reference: 0.15,
            lwcc_relative: 0.96,
            n_retweets: 4000,
            n_users: 120,
            n_influencers: 30,
        }
    }

    #[test]
    fn json_is_flat() {
        let v: serde_json::Value = serde_json::to_value(report()).unwrap();
        let obj = v.as_object().unwrap();
        assert!(obj.contains_key("statistic"));
        assert!(obj.contains_key("p_value"));
        assert!(obj.contains_key("wasserstein_to_reference"));
        assert!(obj.get("dip").is_none());
    }

    #[test]
    fn json_round_trip() {
        let r = report();
        let s = serde_json::to_string(&r).unwrap();
        let back: MetricsReport = serde_json::from_str(&s).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn csv_row_matches_header_arity() {
        let row = report().csv_row();
        assert_eq!(
            row.split(',').count(),
            MetricsReport::CSV_HEADER.split(',').count()
        );
        assert!(row.contains("multimodal"));
    }
}
