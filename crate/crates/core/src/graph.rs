//! Connectivity of the retweet graph.
//!
//! Events induce an undirected graph: one node per distinct account id
//! appearing as retweeter or influencer, one edge per distinct
//! (retweeter, influencer) pair. The summary statistic is the relative size
//! of the largest weakly connected component.

use crate::types::RetweetEvent;
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("no events: graph is empty")]
    EmptyGraph,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    fn largest(&mut self) -> usize {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for i in 0..self.parent.len() {
            let root = self.find(i);
            *counts.entry(root).or_insert(0) += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }
}

/// Size of the largest weakly connected component and total node count.
/// An id acting both as retweeter and as influencer is a single node.
pub fn lwcc_size(events: &[RetweetEvent]) -> Result<(usize, usize), GraphError> {
    if events.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let ids: BTreeSet<&str> = events
        .iter()
        .flat_map(|e| [e.retweeter_id.as_str(), e.influencer_id.as_str()])
        .collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for e in events {
        uf.union(
            index[e.retweeter_id.as_str()],
            index[e.influencer_id.as_str()],
        );
    }
    Ok((uf.largest(), ids.len()))
}

/// Relative size of the largest weakly connected component, in (0, 1].
pub fn lwcc_relative_size(events: &[RetweetEvent]) -> Result<f64, GraphError> {
    let (largest, n) = lwcc_size(events)?;
    Ok(largest as f64 / n as f64)
}
