//! Independent reference implementations used to cross-check production
//! code. Everything here is deliberately naive: plain-Vec arithmetic, linear
//! programming, breadth-first search.

#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Correspondence-analysis user scores from a dense count matrix, computed
/// with power iteration on the Gram matrix of the standardized residuals.
/// Returns row standard coordinates on the leading axis, unit-norm in the
/// left singular vector, sign unspecified.
pub fn ca_oracle(counts: &[Vec<u64>]) -> Vec<f64> {
    let n = counts.len();
    let m = counts[0].len();
    let total: u64 = counts.iter().flatten().sum();
    let t = total as f64;
    let r: Vec<f64> = counts
        .iter()
        .map(|row| row.iter().sum::<u64>() as f64 / t)
        .collect();
    let c: Vec<f64> = (0..m)
        .map(|j| counts.iter().map(|row| row[j]).sum::<u64>() as f64 / t)
        .collect();
    let mut s = vec![vec![0.0f64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let p = counts[i][j] as f64 / t;
            s[i][j] = (p - r[i] * c[j]) / (r[i] * c[j]).sqrt();
        }
    }
    // gram = S^T S
    let mut gram = vec![vec![0.0f64; m]; m];
    for a in 0..m {
        for b in 0..m {
            gram[a][b] = (0..n).map(|i| s[i][a] * s[i][b]).sum();
        }
    }
    // leading eigenvector of gram by cyclic Jacobi rotations
    let (eigvals, eigvecs) = jacobi_eigen(&gram);
    let lead = (0..m)
        .max_by(|&a, &b| eigvals[a].partial_cmp(&eigvals[b]).unwrap())
        .unwrap();
    let v: Vec<f64> = (0..m).map(|a| eigvecs[a][lead]).collect();
    // u = S v / sigma, normalized; score_i = u_i / sqrt(r_i)
    let mut u: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|j| s[i][j] * v[j]).sum())
        .collect();
    let nu = u.iter().map(|e| e * e).sum::<f64>().sqrt();
    u.iter_mut().for_each(|e| *e /= nu);
    (0..n).map(|i| u[i] / r[i].sqrt()).collect()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues and the matrix whose columns are the eigenvectors.
fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0f64; m]; m];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|p| ((p + 1)..m).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..m).map(|i| a[i][i]).collect(), v)
}

/// Dip statistic straight from the definition: for every candidate mode
/// position (each sample point, atom allowed; each gap between points, no
/// atom), solve a linear program for the closest unimodal CDF and take the
/// overall minimum of the sup-distance.
pub fn dip_oracle(values: &[f64]) -> f64 {
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut uniq: Vec<f64> = Vec::new();
    let mut cum: Vec<f64> = Vec::new();
    for &x in &xs {
        if uniq.last() == Some(&x) {
            *cum.last_mut().unwrap() += 1.0 / n;
        } else {
            let base = cum.last().copied().unwrap_or(0.0);
            uniq.push(x);
            cum.push(base + 1.0 / n);
        }
    }
    let m = uniq.len();
    let mut best = f64::INFINITY;
    for k in 0..m {
        best = best.min(dip_mode_lp(&uniq, &cum, k, true, GapCoupling::None));
    }
    // density mode strictly between points k and k+1: the chord across the
    // gap must be at least as steep as the flatter of its two neighbor
    // segments, an either/or condition solved as two programs
    for k in 0..m.saturating_sub(1) {
        if k >= 1 && k + 2 < m {
            best = best.min(dip_mode_lp(&uniq, &cum, k, false, GapCoupling::LeftSegment));
            best = best.min(dip_mode_lp(&uniq, &cum, k, false, GapCoupling::RightSegment));
        } else {
            best = best.min(dip_mode_lp(&uniq, &cum, k, false, GapCoupling::None));
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq)]
enum GapCoupling {
    None,
    LeftSegment,
    RightSegment,
}

/// LP for one mode hypothesis. `atom` = mode sits at point `k` and G may
/// jump there; otherwise the mode lies strictly between points k and k+1 and
/// G is continuous at every sample point.
///
/// Variables: d plus one G value per point; with an atom, point k gets a
/// left limit h and a value w. Constraints: value window |G(x_j) - F(x_j)|
/// <= d and left-limit window |G(x_j^-) - F(x_j^-)| <= d at every point,
/// monotonicity, convex slopes left of the mode, concave slopes right of it.
fn dip_mode_lp(x: &[f64], cum: &[f64], k: usize, atom: bool, coupling: GapCoupling) -> f64 {
    let m = x.len();
    let fm = |j: usize| cum[j]; // F at x_j
    let fl = |j: usize| if j == 0 { 0.0 } else { cum[j - 1] }; // F left limit
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let d = p.add_var(1.0, (0.0, 0.25));
    // left-side values g_0..g_{k-1}, the pre-jump limit h (atom case), then
    // right-side values; without an atom the split is between k and k+1.
    let g: Vec<_> = (0..m).map(|_| p.add_var(0.0, (0.0, 1.0))).collect();
    let h = if atom { Some(p.add_var(0.0, (0.0, 1.0))) } else { None };

    // windows
    for j in 0..m {
        if atom && j == k {
            // value within d of F(x_k), left limit within d of F(x_k^-)
            p.add_constraint([(g[j], 1.0), (d, -1.0)], ComparisonOp::Le, fm(j));
            p.add_constraint([(g[j], 1.0), (d, 1.0)], ComparisonOp::Ge, fm(j));
            let h = h.unwrap();
            p.add_constraint([(h, 1.0), (d, -1.0)], ComparisonOp::Le, fl(j));
            p.add_constraint([(h, 1.0), (d, 1.0)], ComparisonOp::Ge, fl(j));
        } else {
            // continuous at x_j: both windows bind the single value, and
            // their intersection is [F(x_j) - d, F(x_j^-) + d]
            p.add_constraint([(g[j], 1.0), (d, 1.0)], ComparisonOp::Ge, fm(j));
            p.add_constraint([(g[j], 1.0), (d, -1.0)], ComparisonOp::Le, fl(j));
        }
    }

    // monotonicity along the whole chain
    for j in 1..m {
        if atom && j == k {
            let h = h.unwrap();
            p.add_constraint([(h, 1.0), (g[j - 1], -1.0)], ComparisonOp::Ge, 0.0);
            p.add_constraint([(g[j], 1.0), (h, -1.0)], ComparisonOp::Ge, 0.0);
        } else {
            p.add_constraint([(g[j], 1.0), (g[j - 1], -1.0)], ComparisonOp::Ge, 0.0);
        }
    }

    // convexity on the left of the mode: slopes nondecreasing.
    // Left chain ends at h (atom) or at g_k (gap mode: mode past x_k).
    let left_val = |j: usize| -> (minilp::Variable, f64) {
        if atom && j == k {
            (h.unwrap(), 1.0)
        } else {
            (g[j], 1.0)
        }
    };
    let left_end = k; // last left-chain index
    for j in 0..left_end.saturating_sub(1) {
        // slope(j, j+1) <= slope(j+1, j+2), cross-multiplied
        let dx1 = x[j + 1] - x[j];
        let dx2 = x[j + 2] - x[j + 1];
        let (v0, _) = left_val(j);
        let (v1, _) = left_val(j + 1);
        let (v2, _) = left_val(j + 2);
        // (g2 - g1) * dx1 - (g1 - g0) * dx2 >= 0
        p.add_constraint(
            [(v2, dx1), (v1, -dx1 - dx2), (v0, dx2)],
            ComparisonOp::Ge,
            0.0,
        );
    }

    // concavity on the right of the mode: slopes nonincreasing.
    // Right chain starts at g_k (atom) or at g_{k+1} (gap mode).
    let right_start = if atom { k } else { k + 1 };
    for j in right_start..m.saturating_sub(2) {
        let dx1 = x[j + 1] - x[j];
        let dx2 = x[j + 2] - x[j + 1];
        // (g2 - g1) * dx1 - (g1 - g0) * dx2 <= 0
        p.add_constraint(
            [(g[j + 2], dx1), (g[j + 1], -dx1 - dx2), (g[j], dx2)],
            ComparisonOp::Le,
            0.0,
        );
    }

    // the gap chord: slope(g_k -> g_{k+1}) over (x_k, x_{k+1}) must be at
    // least the chosen neighbor segment's slope
    let dxg = if k + 1 < m { x[k + 1] - x[k] } else { 0.0 };
    match coupling {
        GapCoupling::None => {}
        GapCoupling::LeftSegment => {
            let dxl = x[k] - x[k - 1];
            p.add_constraint(
                [(g[k + 1], dxl), (g[k], -dxl - dxg), (g[k - 1], dxg)],
                ComparisonOp::Ge,
                0.0,
            );
        }
        GapCoupling::RightSegment => {
            let dxr = x[k + 2] - x[k + 1];
            p.add_constraint(
                [(g[k], -dxr), (g[k + 1], dxr + dxg), (g[k + 2], -dxg)],
                ComparisonOp::Ge,
                0.0,
            );
        }
    }

    match p.solve() {
        Ok(sol) => sol[d],
        Err(_) => f64::INFINITY,
    }
}

/// Wasserstein-1 via the transport linear program on the full cost matrix.
pub fn transport_oracle(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let mut gamma = vec![vec![]; n];
    for (i, row) in gamma.iter_mut().enumerate() {
        *row = (0..m)
            .map(|j| p.add_var((a[i] - b[j]).abs(), (0.0, 1.0)))
            .collect();
    }
    for row in gamma.iter() {
        let terms: Vec<_> = row.iter().map(|&v| (v, 1.0)).collect();
        p.add_constraint(terms, ComparisonOp::Eq, 1.0 / n as f64);
    }
    for j in 0..m {
        let terms: Vec<_> = gamma.iter().map(|row| (row[j], 1.0)).collect();
        p.add_constraint(terms, ComparisonOp::Eq, 1.0 / m as f64);
    }
    p.solve().expect("transport LP is always feasible").objective()
}

/// Connected components by breadth-first search over an undirected edge
/// list on string ids; returns (largest component size, node count).
pub fn bfs_components(edges: &[(String, String)]) -> (usize, usize) {
    use std::collections::{BTreeMap, BTreeSet, VecDeque};
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut largest = 0;
    let nodes = adj.len();
    let starts: Vec<&str> = adj.keys().copied().collect();
    for start in starts {
        if seen.contains(start) {
            continue;
        }
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in &adj[v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        largest = largest.max(size);
    }
    (largest, nodes)
}

/// Pruning by literal restatement: repeatedly delete rows with fewer than
/// two distinct nonzero columns and all-zero columns until nothing changes.
/// Returns (kept row indices, kept col indices) of the dense input.
pub fn prune_oracle(counts: &[Vec<u64>]) -> (Vec<usize>, Vec<usize>) {
    let n = counts.len();
    let m = counts[0].len();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..m).collect();
    loop {
        let kept_rows: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&i| cols.iter().filter(|&&j| counts[i][j] > 0).count() >= 2)
            .collect();
        let kept_cols: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&j| kept_rows.iter().any(|&i| counts[i][j] > 0))
            .collect();
        if kept_rows == rows && kept_cols == cols {
            return (rows, cols);
        }
        rows = kept_rows;
        cols = kept_cols;
        if rows.is_empty() || cols.is_empty() {
            return (rows, cols);
        }
    }
}
