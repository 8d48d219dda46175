//! Shortest augmenting path solver (Jonker–Volgenant family) for dense
//! square problems, followed by a canonicalization pass that picks the
//! lexicographically smallest assignment among all optimal ones.

use std::collections::VecDeque;

use super::{AssignmentError, AssignmentSolution, CostMatrix, SENTINEL};

/// Minimum-cost permutation of `m`.
///
/// Among equal-cost optima the lexicographically smallest assignment
/// vector is returned, so results do not depend on solver internals.
pub fn solve_optimal(m: &CostMatrix) -> Result<AssignmentSolution, AssignmentError> {
    let masked = m.masked();
    let assignment = solve_masked(&masked, m.size()).ok_or(AssignmentError::Infeasible)?;
    Ok(AssignmentSolution {
        total_cost: m.assignment_cost(&assignment),
        assignment,
        rank: 1,
    })
}

/// Solves a row-major `n × n` problem whose forbidden arcs are set to
/// [`SENTINEL`]. Returns `None` when every assignment needs a forbidden arc.
pub(crate) fn solve_masked(cost: &[f64], n: usize) -> Option<Vec<usize>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let (col4row, u, v) = shortest_augmenting_path(cost, n);
    if col4row.iter().enumerate().any(|(r, &c)| cost[r * n + c] >= SENTINEL) {
        return None;
    }
    Some(lexicographic_minimum(cost, n, col4row, &u, &v))
}

fn shortest_augmenting_path(cost: &[f64], n: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    const NONE: usize = usize::MAX;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut col4row = vec![NONE; n];
    let mut row4col = vec![NONE; n];
    let mut shortest = vec![f64::INFINITY; n];
    let mut path = vec![NONE; n];
    let mut remaining: Vec<usize> = Vec::with_capacity(n);
    let mut scanned_rows = vec![false; n];
    let mut scanned_cols = vec![false; n];

    for cur_row in 0..n {
        shortest.fill(f64::INFINITY);
        path.fill(NONE);
        scanned_rows.fill(false);
        scanned_cols.fill(false);
        remaining.clear();
        remaining.extend((0..n).rev());

        let mut min_val = 0.0;
        let mut i = cur_row;
        let sink = loop {
            scanned_rows[i] = true;
            let mut best_idx = NONE;
            let mut lowest = f64::INFINITY;
            for (idx, &j) in remaining.iter().enumerate() {
                let r = min_val + cost[i * n + j] - u[i] - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == NONE) {
                    lowest = shortest[j];
                    best_idx = idx;
                }
            }
            min_val = lowest;
            let j = remaining.swap_remove(best_idx);
            scanned_cols[j] = true;
            if row4col[j] == NONE {
                break j;
            }
            i = row4col[j];
        };

        u[cur_row] += min_val;
        for r in 0..n {
            if scanned_rows[r] && r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for c in 0..n {
            if scanned_cols[c] {
                v[c] -= min_val - shortest[c];
            }
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = r;
            std::mem::swap(&mut col4row[r], &mut j);
            if r == cur_row {
                break;
            }
        }
    }
    (col4row, u, v)
}

/// Rewrites an optimal matching into the lexicographically smallest perfect
/// matching of the tight subgraph (arcs with zero reduced cost).
fn lexicographic_minimum(cost: &[f64], n: usize, mut col4row: Vec<usize>, u: &[f64], v: &[f64]) -> Vec<usize> {
    let scale = cost
        .iter()
        .filter(|c| **c < SENTINEL)
        .fold(1.0f64, |acc, c| acc.max(c.abs()));
    let tol = 1e-9 * scale;
    let tight = |r: usize, c: usize| {
        let w = cost[r * n + c];
        w < SENTINEL && w - u[r] - v[c] <= tol
    };

    let mut row4col = vec![0usize; n];
    for (r, &c) in col4row.iter().enumerate() {
        row4col[c] = r;
    }
    let mut col_fixed = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();

    for r in 0..n {
        for c in 0..n {
            if col_fixed[c] || !tight(r, c) {
                continue;
            }
            if col4row[r] == c {
                col_fixed[c] = true;
                break;
            }
            // Move r onto c; the row displaced from c must reach the column
            // r frees through an alternating path over unfixed columns.
            let freed = col4row[r];
            let displaced = row4col[c];
            parent.fill(usize::MAX);
            queue.clear();
            queue.push_back(displaced);
            let mut reached = false;
            'bfs: while let Some(row) = queue.pop_front() {
                for c2 in 0..n {
                    if col_fixed[c2] || c2 == c || parent[c2] != usize::MAX || !tight(row, c2) {
                        continue;
                    }
                    parent[c2] = row;
                    if c2 == freed {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(row4col[c2]);
                }
            }
            if !reached {
                continue;
            }
            let mut col = freed;
            loop {
                let row = parent[col];
                let prev = col4row[row];
                col4row[row] = col;
                row4col[col] = row;
                if row == displaced {
                    break;
                }
                col = prev;
            }
            col4row[r] = c;
            row4col[c] = r;
            col_fixed[c] = true;
            break;
        }
    }
    col4row
}
