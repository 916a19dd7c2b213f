//! Shared domain types: retweet events, canonical event sets, and the
//! declarative description of sampling steps.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// One interaction record: `retweeter_id` retweeted a tweet authored by
/// `influencer_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetweetEvent {
    pub tweet_id: String,
    pub retweeter_id: String,
    pub influencer_id: String,
    #[serde(default)]
    pub timestamp: i64,
    #[serde(default)]
    pub text: String,
}

/// A raw record as read from disk, before validation. All fields optional so
/// that missing-field errors are reported by name.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct RawEvent {
    pub tweet_id: Option<String>,
    pub retweeter_id: Option<String>,
    pub influencer_id: Option<String>,
    pub timestamp: Option<i64>,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("missing field: {0}")]
    MissingField(&'static str),
    #[error("self-retweet rejected: tweet {0}")]
    SelfRetweetRejected(String),
}

/// Validate a raw record. Missing `timestamp` defaults to 0, missing `text`
/// to the empty string. Records where the retweeter equals the influencer are
/// rejected unless `allow_self_retweets` is set.
pub fn validate_event(raw: RawEvent, allow_self_retweets: bool) -> Result<RetweetEvent, EventError> {
    let tweet_id = non_empty(raw.tweet_id, "tweet_id")?;
    let retweeter_id = non_empty(raw.retweeter_id, "retweeter_id")?;
    let influencer_id = non_empty(raw.influencer_id, "influencer_id")?;
    if retweeter_id == influencer_id && !allow_self_retweets {
        return Err(EventError::SelfRetweetRejected(tweet_id));
    }
    Ok(RetweetEvent {
        tweet_id,
        retweeter_id,
        influencer_id,
        timestamp: raw.timestamp.unwrap_or(0),
        text: raw.text.unwrap_or_default(),
    })
}

fn non_empty(field: Option<String>, name: &'static str) -> Result<String, EventError> {
    match field {
        Some(s) if !s.is_empty() => Ok(s),
        _ => Err(EventError::MissingField(name)),
    }
}

/// Declarative description of one sampling step, kept as provenance on the
/// event sets it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSpec {
    Random {
        fraction: f64,
        rng_seed: u64,
        rng_stream: u64,
    },
    Keyword {
        keywords: Vec<String>,
    },
    Seed {
        seed_ids: BTreeSet<String>,
    },
    TopSeedFraction {
        fraction: f64,
        seed_ids: BTreeSet<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleSpecError {
    #[error("fraction must lie in (0, 1], got {0}")]
    FractionOutOfRange(String),
    #[error("keyword sampling requires a non-empty keyword list")]
    EmptyKeywords,
    #[error("seed sampling requires a non-empty seed set")]
    EmptySeeds,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<(), SampleSpecError> {
        match self {
            SampleSpec::Random { fraction, .. } => check_fraction(*fraction),
            SampleSpec::Keyword { keywords } => {
                if keywords.is_empty() {
                    Err(SampleSpecError::EmptyKeywords)
                } else {
                    Ok(())
                }
            }
            SampleSpec::Seed { seed_ids } => {
                if seed_ids.is_empty() {
                    Err(SampleSpecError::EmptySeeds)
                } else {
                    Ok(())
                }
            }
            SampleSpec::TopSeedFraction { fraction, seed_ids } => {
                if seed_ids.is_empty() {
                    return Err(SampleSpecError::EmptySeeds);
                }
                check_fraction(*fraction)
            }
        }
    }
}

fn check_fraction(fraction: f64) -> Result<(), SampleSpecError> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(SampleSpecError::FractionOutOfRange(format!("{fraction}")))
    }
}

/// An ordered collection of events in canonical order (timestamp, then
/// tweet id), plus the sampling steps that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSet {
    events: Vec<RetweetEvent>,
    provenance: Vec<SampleSpec>,
}

impl EventSet {
    /// Build an event set, sorting into canonical order.
    pub fn new(mut events: Vec<RetweetEvent>) -> Self {
        canonicalize(&mut events);
        EventSet {
            events,
            provenance: Vec::new(),
        }
    }

    /// Build a derived set: canonical order restored, provenance extended.
    pub(crate) fn derive(&self, mut events: Vec<RetweetEvent>, step: SampleSpec) -> Self {
        canonicalize(&mut events);
        let mut provenance = self.provenance.clone();
        provenance.push(step);
        EventSet { events, provenance }
    }

    pub fn events(&self) -> &[RetweetEvent] {
        &self.events
    }

    pub fn provenance(&self) -> &[SampleSpec] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

fn canonicalize(events: &mut [RetweetEvent]) {
    events.sort_by(|a, b| {
        (a.timestamp, &a.tweet_id).cmp(&(b.timestamp, &b.tweet_id))
    });
}
