//! The sparse user x influencer retweet-count matrix and the pruning rule
//! applied before ideology estimation.

use crate::types::EventSet;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("no event targets any influencer")]
    EmptyMatrix,
    #[error("matrix degenerate after pruning: {rows} rows x {cols} cols")]
    MatrixDegenerate { rows: usize, cols: usize },
    #[error("row and column ids must be duplicate-free")]
    DuplicateIds,
    #[error("entry out of bounds or zero count")]
    InvalidEntry,
}

/// Sparse count matrix `A` where `A[i][j]` is the number of retweets from
/// user `i` (row) to influencer `j` (column). No all-zero rows or columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    /// Per-row entries `(col, count)`, sorted by column index, counts >= 1.
    rows: Vec<Vec<(usize, u64)>>,
    total: u64,
}

impl InteractionMatrix {
    /// Build from explicit triplets; rows/columns keep the given order.
    pub fn from_triplets(
        row_ids: Vec<String>,
        col_ids: Vec<String>,
        entries: &[(usize, usize, u64)],
    ) -> Result<Self, MatrixError> {
        if row_ids.iter().collect::<BTreeSet<_>>().len() != row_ids.len()
            || col_ids.iter().collect::<BTreeSet<_>>().len() != col_ids.len()
        {
            return Err(MatrixError::DuplicateIds);
        }
        let mut cells: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &(r, c, count) in entries {
            if r >= row_ids.len() || c >= col_ids.len() || count == 0 {
                return Err(MatrixError::InvalidEntry);
            }
            *cells.entry((r, c)).or_insert(0) += count;
        }
        let mut rows = vec![Vec::new(); row_ids.len()];
        let mut col_seen = vec![false; col_ids.len()];
        let mut total = 0u64;
        for ((r, c), count) in cells {
            rows[r].push((c, count));
            col_seen[c] = true;
            total += count;
        }
        if rows.iter().any(Vec::is_empty) || col_seen.iter().any(|s| !s) {
            return Err(MatrixError::EmptyMatrix);
        }
        Ok(InteractionMatrix {
            row_ids,
            col_ids,
            rows,
            total,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn row(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0)
    }

    /// Coordinate-format dump `(row_id, col_id, count)` for external
    /// verification.
    pub fn dump_coordinates(&self, mut w: impl Write) -> std::io::Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, count) in row {
                writeln!(w, "{}\t{}\t{}", self.row_ids[i], self.col_ids[j], count)?;
            }
        }
        Ok(())
    }
}

/// Count retweets from each user to each influencer in the given set. Rows
/// are users with at least one counted event, columns are influencers with at
/// least one incoming retweet; both sorted by id.
pub fn build_matrix(
    events: &EventSet,
    influencers: &BTreeSet<String>,
) -> Result<InteractionMatrix, MatrixError> {
    let mut counts: HashMap<(&str, &str), u64> = HashMap::new();
    for ev in events.events() {
        if influencers.contains(&ev.influencer_id) {
            *counts
                .entry((ev.retweeter_id.as_str(), ev.influencer_id.as_str()))
                .or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(MatrixError::EmptyMatrix);
    }
    let row_ids: Vec<String> = counts
        .keys()
        .map(|&(u, _)| u.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let col_ids: Vec<String> = counts
        .keys()
        .map(|&(_, p)| p.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let row_index: HashMap<&str, usize> =
        row_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let col_index: HashMap<&str, usize> =
        col_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let entries: Vec<(usize, usize, u64)> = counts
        .into_iter()
        .map(|((u, p), count)| (row_index[u], col_index[p], count))
        .collect();
    InteractionMatrix::from_triplets(row_ids, col_ids, &entries)
}

/// Drop every user whose retweets span a single influencer, then drop
/// influencer columns left without retweets, repeating until a fixed point.
/// Errors if the fixed point has fewer than 2 rows or 2 columns.
pub fn prune_single_influencer_users(
    a: &InteractionMatrix,
) -> Result<InteractionMatrix, MatrixError> {
    let mut row_alive = vec![true; a.n_rows()];
    let mut col_alive = vec![true; a.n_cols()];
    loop {
        let mut changed = false;
        for i in 0..a.n_rows() {
            if !row_alive[i] {
                continue;
            }
            let distinct = a.rows[i].iter().filter(|&&(c, _)| col_alive[c]).count();
            if distinct < 2 {
                row_alive[i] = false;
                changed = true;
            }
        }
        let mut col_has_entry = vec![false; a.n_cols()];
        for i in 0..a.n_rows() {
            if !row_alive[i] {
                continue;
            }
            for &(c, _) in &a.rows[i] {
                col_has_entry[c] = true;
            }
        }
        for c in 0..a.n_cols() {
            if col_alive[c] && !col_has_entry[c] {
                col_alive[c] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let rows_kept = row_alive.iter().filter(|&&x| x).count();
    let cols_kept = col_alive.iter().filter(|&&x| x).count();
    if rows_kept < 2 || cols_kept < 2 {
        return Err(MatrixError::MatrixDegenerate {
            rows: rows_kept,
            cols: cols_kept,
        });
    }

    let col_map: Vec<Option<usize>> = {
        let mut next = 0;
        col_alive
            .iter()
            .map(|&alive| {
                if alive {
                    next += 1;
                    Some(next - 1)
                } else {
                    None
                }
            })
            .collect()
    };
    let row_ids: Vec<String> = (0..a.n_rows())
        .filter(|&i| row_alive[i])
        .map(|i| a.row_ids[i].clone())
        .collect();
    let col_ids: Vec<String> = (0..a.n_cols())
        .filter(|&c| col_alive[c])
        .map(|c| a.col_ids[c].clone())
        .collect();
    let mut rows = Vec::with_capacity(row_ids.len());
    let mut total = 0u64;
    for i in 0..a.n_rows() {
        if !row_alive[i] {
            continue;
        }
        let row: Vec<(usize, u64)> = a.rows[i]
            .iter()
            .filter_map(|&(c, count)| col_map[c].map(|nc| (nc, count)))
            .collect();
        total += row.iter().map(|&(_, n)| n).sum::<u64>();
        rows.push(row);
    }
    Ok(InteractionMatrix {
        row_ids,
        col_ids,
        rows,
        total,
    })
}
