//! File ingestion and the sampling primitives: keyword filters, seed filters,
//! top-retweeted seed selection, and uniform random subsampling.

use crate::rng::RngStream;
use crate::types::{validate_event, EventSet, RawEvent, RetweetEvent, SampleSpec};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, BufReader};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    JsonLines,
    Csv,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no valid records in input")]
    EmptyInput,
    #[error("keyword set is empty")]
    EmptyKeywords,
    #[error("keyword term is empty")]
    EmptyTerm,
    #[error("seed set is empty")]
    EmptySeeds,
    #[error("fraction must lie in (0, 1], got {0}")]
    FractionOutOfRange(f64),
    #[error("no seed receives any retweet")]
    NoSeedsPresent,
}

/// Result of parsing an input file. Malformed lines and invalid records are
/// skipped and tallied, not fatal.
#[derive(Debug)]
pub struct ParseReport {
    pub events: EventSet,
    /// Lines that could not be parsed at all (format errors).
    pub skipped: usize,
    /// Parseable records rejected by validation (missing fields,
    /// self-retweets).
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub allow_self_retweets: bool,
}

/// Parse interaction records from a JSONL or CSV file.
pub fn parse_events(path: impl AsRef<Path>, format: InputFormat) -> Result<ParseReport, IngestError> {
    parse_events_with(path, format, ParseOptions::default())
}

pub fn parse_events_with(
    path: impl AsRef<Path>,
    format: InputFormat,
    opts: ParseOptions,
) -> Result<ParseReport, IngestError> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut events = Vec::new();
    let mut skipped = 0usize;
    let mut rejected = 0usize;

    match format {
        InputFormat::JsonLines => {
            for line in BufReader::new(file).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<RawEvent>(&line) {
                    Ok(raw) => match validate_event(raw, opts.allow_self_retweets) {
                        Ok(ev) => events.push(ev),
                        Err(_) => rejected += 1,
                    },
                    Err(_) => skipped += 1,
                }
            }
        }
        InputFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
            let headers = reader.headers().map_err(csv_io)?.clone();
            for record in reader.records() {
                let record = match record {
                    Ok(r) => r,
                    Err(_) => {
                        skipped += 1;
                        continue;
                    }
                };
                match raw_from_csv(&headers, &record) {
                    Ok(raw) => match validate_event(raw, opts.allow_self_retweets) {
                        Ok(ev) => events.push(ev),
                        Err(_) => rejected += 1,
                    },
                    Err(()) => skipped += 1,
                }
            }
        }
    }

    if events.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(ParseReport {
        events: EventSet::new(events),
        skipped,
        rejected,
    })
}

fn csv_io(err: csv::Error) -> IngestError {
    IngestError::Io(std::io::Error::other(err))
}

fn raw_from_csv(headers: &csv::StringRecord, record: &csv::StringRecord) -> Result<RawEvent, ()> {
    let mut raw = RawEvent::default();
    for (name, value) in headers.iter().zip(record.iter()) {
        match name {
            "tweet_id" => raw.tweet_id = Some(value.to_string()),
            "retweeter_id" => raw.retweeter_id = Some(value.to_string()),
            "influencer_id" => raw.influencer_id = Some(value.to_string()),
            "timestamp" => {
                if value.is_empty() {
                    raw.timestamp = None;
                } else {
                    raw.timestamp = Some(value.parse().map_err(|_| ())?);
                }
            }
            "text" => raw.text = Some(value.to_string()),
            _ => {}
        }
    }
    Ok(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Term must occur with non-alphanumeric (or boundary) characters on both
    /// sides. The default: avoids counting terms embedded inside longer words.
    SubstringWordBoundary,
    /// Plain substring containment; useful for hashtag prefixes.
    PlainSubstring,
}

/// A set of lowercase search terms plus the matching semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSet {
    terms: Vec<String>,
    match_mode: MatchMode,
}

impl KeywordSet {
    /// Terms are lowercased and deduplicated; empty terms are an error.
    pub fn new(terms: Vec<String>, match_mode: MatchMode) -> Result<Self, IngestError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for term in terms {
            let term = term.to_lowercase();
            if term.is_empty() {
                return Err(IngestError::EmptyTerm);
            }
            if seen.insert(term.clone()) {
                out.push(term);
            }
        }
        if out.is_empty() {
            return Err(IngestError::EmptyKeywords);
        }
        Ok(KeywordSet {
            terms: out,
            match_mode,
        })
    }

    /// Load one term per line. Lines starting with ';' are comments; lines
    /// starting with '#' are kept (hashtags are real terms).
    pub fn from_file(path: impl AsRef<Path>, match_mode: MatchMode) -> Result<Self, IngestError> {
        let content = std::fs::read_to_string(path)?;
        let terms: Vec<String> = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with(';'))
            .map(str::to_string)
            .collect();
        KeywordSet::new(terms, match_mode)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn match_mode(&self) -> MatchMode {
        self.match_mode
    }

    /// Restrict to a subset of terms (used by the keyword-bias experiment).
    pub fn restricted_to(&self, subset: &[String]) -> Result<Self, IngestError> {
        KeywordSet::new(subset.to_vec(), self.match_mode)
    }

    /// Does `text` contain at least one term?
    pub fn matches(&self, text: &str) -> bool {
        let lowered = text.to_lowercase();
        self.terms.iter().any(|t| self.term_matches(&lowered, t))
    }

    /// Which terms does `text` contain?
    pub fn matching_terms<'a>(&'a self, text: &str) -> Vec<&'a str> {
        let lowered = text.to_lowercase();
        self.terms
            .iter()
            .filter(|t| self.term_matches(&lowered, t))
            .map(String::as_str)
            .collect()
    }

    fn term_matches(&self, lowered_text: &str, term: &str) -> bool {
        match self.match_mode {
            MatchMode::PlainSubstring => lowered_text.contains(term),
            MatchMode::SubstringWordBoundary => {
                let mut start = 0;
                while let Some(pos) = lowered_text[start..].find(term) {
                    let at = start + pos;
                    let end = at + term.len();
                    let left_ok = at == 0
                        || !lowered_text[..at]
                            .chars()
                            .next_back()
                            .is_some_and(char::is_alphanumeric);
                    let right_ok = end == lowered_text.len()
                        || !lowered_text[end..]
                            .chars()
                            .next()
                            .is_some_and(char::is_alphanumeric);
                    if left_ok && right_ok {
                        return true;
                    }
                    // advance one char, not one byte
                    start = at
                        + lowered_text[at..]
                            .chars()
                            .next()
                            .map(char::len_utf8)
                            .unwrap_or(1);
                    if start >= lowered_text.len() {
                        break;
                    }
                }
                false
            }
        }
    }
}

/// Keep exactly the events whose text contains at least one keyword.
pub fn filter_by_keywords(events: &EventSet, kw: &KeywordSet) -> EventSet {
    let kept: Vec<RetweetEvent> = events
        .events()
        .iter()
        .filter(|e| kw.matches(&e.text))
        .cloned()
        .collect();
    events.derive(
        kept,
        SampleSpec::Keyword {
            keywords: kw.terms.clone(),
        },
    )
}

/// Keep exactly the events whose influencer is in the seed set.
pub fn filter_by_seeds(events: &EventSet, seeds: &BTreeSet<String>) -> EventSet {
    let kept: Vec<RetweetEvent> = events
        .events()
        .iter()
        .filter(|e| seeds.contains(&e.influencer_id))
        .cloned()
        .collect();
    events.derive(
        kept,
        SampleSpec::Seed {
            seed_ids: seeds.clone(),
        },
    )
}

/// Rank the seeds that appear in `events` by descending retweet count (ties
/// broken by ascending id) and return the top `ceil(fraction * k)` of the `k`
/// seeds present.
pub fn top_retweeted_seeds(
    events: &EventSet,
    seeds: &BTreeSet<String>,
    fraction: f64,
) -> Result<BTreeSet<String>, IngestError> {
    if seeds.is_empty() {
        return Err(IngestError::EmptySeeds);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(IngestError::FractionOutOfRange(fraction));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for ev in events.events() {
        if seeds.contains(&ev.influencer_id) {
            *counts.entry(ev.influencer_id.as_str()).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(IngestError::NoSeedsPresent);
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let take = (fraction * ranked.len() as f64).ceil() as usize;
    let take = take.clamp(1, ranked.len());
    Ok(ranked
        .into_iter()
        .take(take)
        .map(|(id, _)| id.to_string())
        .collect())
}

/// Uniform sample without replacement of `round(fraction * n)` events,
/// deterministic for a given stream. Output keeps canonical order.
pub fn random_sample(
    events: &EventSet,
    fraction: f64,
    rng: RngStream,
) -> Result<EventSet, IngestError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(IngestError::FractionOutOfRange(fraction));
    }
    let n = events.len();
    let k = ((fraction * n as f64).round() as usize).min(n);
    let mut indices: Vec<usize> = rand::seq::index::sample(&mut rng.rng(), n, k).into_vec();
    indices.sort_unstable();
    let kept: Vec<RetweetEvent> = indices
        .into_iter()
        .map(|i| events.events()[i].clone())
        .collect();
    Ok(events.derive(
        kept,
        SampleSpec::Random {
            fraction,
            rng_seed: rng.seed,
            rng_stream: rng.stream_id,
        },
    ))
}
