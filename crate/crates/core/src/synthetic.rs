//! Planted two-faction retweet network generator.
//!
//! Users and influencers are split into a left and a right faction. Each
//! event draws an active user, picks a side (its own faction with
//! probability `1 - cross_rate`), and targets an influencer on that side by
//! the configured popularity distribution. Moderate users target any
//! influencer uniformly, including an optional cluster of neutral hubs.
//! Tweet text is sampled from the acting user's faction vocabulary, so
//! keyword analyses have exact ground truth.

use crate::rng::RngStream;
use crate::types::{EventSet, RetweetEvent};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SyntheticError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
}

/// Popularity or activity profile: uniform, or Zipf with exponent `s`
/// (weight of rank k proportional to 1/k^s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Popularity {
    Uniform,
    Zipf { s: f64 },
}

impl Popularity {
    fn weights(&self, n: usize) -> Vec<f64> {
        match self {
            Popularity::Uniform => vec![1.0; n],
            Popularity::Zipf { s } => (1..=n).map(|k| (k as f64).powf(-s)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Faction {
    Left,
    Right,
    /// Moderate users and neutral hub influencers.
    Neutral,
}

/// Planted labels recorded alongside the generated events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub user_faction: BTreeMap<String, Faction>,
    pub influencer_faction: BTreeMap<String, Faction>,
}

impl GroundTruth {
    pub fn influencers_of(&self, faction: Faction) -> impl Iterator<Item = &String> {
        self.influencer_faction
            .iter()
            .filter(move |(_, &f)| f == faction)
            .map(|(id, _)| id)
    }

    /// Labels CSV with columns `(id, role, faction)`.
    pub fn export_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "id,role,faction")?;
        let name = |f: Faction| match f {
            Faction::Left => "left",
            Faction::Right => "right",
            Faction::Neutral => "neutral",
        };
        for (id, &f) in &self.user_faction {
            writeln!(w, "{id},user,{}", name(f))?;
        }
        for (id, &f) in &self.influencer_faction {
            writeln!(w, "{id},influencer,{}", name(f))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n_users: usize,
    pub n_influencers: usize,
    /// Extra influencers outside both factions, targeted only by moderates
    /// (and by the uniform choice moderates make over all influencers).
    pub n_neutral_influencers: usize,
    pub n_events: usize,
    /// Share of non-moderate users (and of faction influencers) on the left.
    pub faction_split: f64,
    /// Probability a partisan retweet targets the opposite faction.
    pub cross_rate: f64,
    /// Share of users that ignore faction lines entirely.
    pub moderate_share: f64,
    pub influencer_popularity: Popularity,
    pub user_activity: Popularity,
    pub vocab_left: Vec<String>,
    pub vocab_right: Vec<String>,
    pub vocab_neutral: Vec<String>,
    pub rng_seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_users: 500,
            n_influencers: 20,
            n_neutral_influencers: 0,
            n_events: 10_000,
            faction_split: 0.5,
            cross_rate: 0.02,
            moderate_share: 0.0,
            influencer_popularity: Popularity::Uniform,
            user_activity: Popularity::Uniform,
            vocab_left: vec!["redistribute".into(), "solidarity".into(), "union".into()],
            vocab_right: vec!["tradition".into(), "sovereignty".into(), "market".into()],
            vocab_neutral: vec!["weather".into(), "football".into(), "music".into()],
            rng_seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), SyntheticError> {
        let fail = |m: &str| Err(SyntheticError::ConfigInvalid(m.to_string()));
        if self.n_users < 2 {
            return fail("n_users must be at least 2");
        }
        if self.n_influencers < 2 {
            return fail("n_influencers must be at least 2");
        }
        if self.n_events < self.n_users {
            return fail("n_events must be at least n_users");
        }
        if !(self.faction_split > 0.0 && self.faction_split < 1.0) {
            return fail("faction_split must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.cross_rate) {
            return fail("cross_rate must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.moderate_share) {
            return fail("moderate_share must lie in [0, 1)");
        }
        if self.vocab_left.is_empty() || self.vocab_right.is_empty() {
            return fail("faction vocabularies must be non-empty");
        }
        if self.moderate_share > 0.0 && self.vocab_neutral.is_empty() {
            return fail("moderate users require a non-empty neutral vocabulary");
        }
        for p in [self.influencer_popularity, self.user_activity] {
            if let Popularity::Zipf { s } = p {
                if !(s > 0.0 && s.is_finite()) {
                    return fail("zipf exponent must be positive and finite");
                }
            }
        }
        Ok(())
    }
}

/// Generate an event set with planted labels. Deterministic given
/// `(config, rng)`.
pub fn generate(
    config: &SyntheticConfig,
    rng: RngStream,
) -> Result<(EventSet, GroundTruth), SyntheticError> {
    config.validate()?;
    let mut rng = rng.rng();

    let n_moderate = (config.moderate_share * config.n_users as f64).round() as usize;
    let n_partisan = config.n_users - n_moderate;
    let n_left_users = (config.faction_split * n_partisan as f64).round() as usize;
    let user_ids: Vec<String> = (0..config.n_users).map(|i| format!("u{i:05}")).collect();
    let user_faction: Vec<Faction> = (0..config.n_users)
        .map(|i| {
            if i < n_left_users {
                Faction::Left
            } else if i < n_partisan {
                Faction::Right
            } else {
                Faction::Neutral
            }
        })
        .collect();

    let n_left_inf = ((config.faction_split * config.n_influencers as f64).round() as usize)
        .clamp(1, config.n_influencers - 1);
    let n_total_inf = config.n_influencers + config.n_neutral_influencers;
    let inf_ids: Vec<String> = (0..n_total_inf).map(|i| format!("p{i:04}")).collect();
    let inf_faction: Vec<Faction> = (0..n_total_inf)
        .map(|i| {
            if i < n_left_inf {
                Faction::Left
            } else if i < config.n_influencers {
                Faction::Right
            } else {
                Faction::Neutral
            }
        })
        .collect();
    let left_inf: Vec<usize> = (0..n_left_inf).collect();
    let right_inf: Vec<usize> = (n_left_inf..config.n_influencers).collect();

    let activity = WeightedIndex::new(config.user_activity.weights(config.n_users))
        .expect("positive weights");
    let left_pop = WeightedIndex::new(config.influencer_popularity.weights(left_inf.len()))
        .expect("positive weights");
    let right_pop = WeightedIndex::new(config.influencer_popularity.weights(right_inf.len()))
        .expect("positive weights");

    let vocab_of = |f: Faction| match f {
        Faction::Left => &config.vocab_left,
        Faction::Right => &config.vocab_right,
        Faction::Neutral => &config.vocab_neutral,
    };

    let mut events = Vec::with_capacity(config.n_events);
    for t in 0..config.n_events {
        let u = activity.sample(&mut rng);
        let faction = user_faction[u];
        let inf = match faction {
            Faction::Neutral => rng.random_range(0..n_total_inf),
            _ => {
                let cross = rng.random::<f64>() < config.cross_rate;
                let left_side = (faction == Faction::Left) != cross;
                if left_side {
                    left_inf[left_pop.sample(&mut rng)]
                } else {
                    right_inf[right_pop.sample(&mut rng)]
                }
            }
        };
        let vocab = vocab_of(faction);
        let n_terms = rng.random_range(1..=3usize);
        let text = (0..n_terms)
            .map(|_| vocab[rng.random_range(0..vocab.len())].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        events.push(RetweetEvent {
            tweet_id: format!("t{t:07}"),
            retweeter_id: user_ids[u].clone(),
            influencer_id: inf_ids[inf].clone(),
            timestamp: t as i64,
            text,
        });
    }

    let truth = GroundTruth {
        user_faction: user_ids
            .iter()
            .cloned()
            .zip(user_faction.iter().copied())
            .collect(),
        influencer_faction: inf_ids
            .iter()
            .cloned()
            .zip(inf_faction.iter().copied())
            .collect(),
    };
    Ok((EventSet::new(events), truth))
}

/// Write events as JSONL, one event per line, in canonical order.
pub fn export_jsonl(set: &EventSet, mut w: impl std::io::Write) -> std::io::Result<()> {
    for e in set.events() {
        serde_json::to_writer(&mut w, e)?;
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism() {
        let cfg = SyntheticConfig::default();
        let a = generate(&cfg, RngStream::new(3)).unwrap();
        let b = generate(&cfg, RngStream::new(3)).unwrap();
        assert_eq!(a, b);
        let c = generate(&cfg, RngStream::new(4)).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn event_count_and_validity() {
        let cfg = SyntheticConfig {
            n_events: 1000,
            n_users: 50,
            ..SyntheticConfig::default()
        };
        let (set, truth) = generate(&cfg, RngStream::new(1)).unwrap();
        assert_eq!(set.len(), 1000);
        for e in set.events() {
            assert!(truth.user_faction.contains_key(&e.retweeter_id));
            assert!(truth.influencer_faction.contains_key(&e.influencer_id));
            assert_ne!(e.retweeter_id, e.influencer_id);
            assert!(!e.text.is_empty());
        }
    }

    #[test]
    fn pure_two_block_has_no_cross_edges() {
        let cfg = SyntheticConfig {
            cross_rate: 0.0,
            moderate_share: 0.0,
            ..SyntheticConfig::default()
        };
        let (set, truth) = generate(&cfg, RngStream::new(2)).unwrap();
        for e in set.events() {
            assert_eq!(
                truth.user_faction[&e.retweeter_id],
                truth.influencer_faction[&e.influencer_id]
            );
        }
    }

    #[test]
    fn vocab_follows_the_acting_user() {
        let cfg = SyntheticConfig {
            moderate_share: 0.3,
            n_neutral_influencers: 5,
            ..SyntheticConfig::default()
        };
        let (set, truth) = generate(&cfg, RngStream::new(5)).unwrap();
        for e in set.events() {
            let vocab = match truth.user_faction[&e.retweeter_id] {
                Faction::Left => &cfg.vocab_left,
                Faction::Right => &cfg.vocab_right,
                Faction::Neutral => &cfg.vocab_neutral,
            };
            for term in e.text.split(' ') {
                assert!(vocab.iter().any(|v| v == term), "stray term {term}");
            }
        }
    }

    #[test]
    fn moderates_reach_neutral_hubs() {
        let cfg = SyntheticConfig {
            moderate_share: 0.4,
            n_neutral_influencers: 10,
            n_events: 5000,
            ..SyntheticConfig::default()
        };
        let (set, truth) = generate(&cfg, RngStream::new(6)).unwrap();
        let hub_hits = set
            .events()
            .iter()
            .filter(|e| truth.influencer_faction[&e.influencer_id] == Faction::Neutral)
            .count();
        assert!(hub_hits > 0);
        // only moderates target hubs
        for e in set.events() {
            if truth.influencer_faction[&e.influencer_id] == Faction::Neutral {
                assert_eq!(truth.user_faction[&e.retweeter_id], Faction::Neutral);
            }
        }
    }

    #[test]
    fn zipf_popularity_is_head_heavy() {
        let cfg = SyntheticConfig {
            influencer_popularity: Popularity::Zipf { s: 1.2 },
            n_events: 20_000,
            ..SyntheticConfig::default()
        };
        let (set, _) = generate(&cfg, RngStream::new(7)).unwrap();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for e in set.events() {
            *counts.entry(e.influencer_id.as_str()).or_insert(0) += 1;
        }
        // first influencer of each faction outdraws the last by a wide margin
        assert!(counts["p0000"] > 3 * counts.get("p0009").copied().unwrap_or(0).max(1));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = SyntheticConfig {
            n_users: 1,
            ..SyntheticConfig::default()
        };
        assert!(matches!(
            generate(&bad, RngStream::new(0)),
            Err(SyntheticError::ConfigInvalid(_))
        ));
        let bad = SyntheticConfig {
            cross_rate: 1.0,
            ..SyntheticConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SyntheticConfig {
            moderate_share: 0.2,
            vocab_neutral: vec![],
            ..SyntheticConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let cfg = SyntheticConfig {
            n_events: 500,
            ..SyntheticConfig::default()
        };
        let (set, _) = generate(&cfg, RngStream::new(9)).unwrap();
        let mut buf = Vec::new();
        export_jsonl(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 500);
        let parsed: Vec<RetweetEvent> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(parsed, set.events());
    }
}
