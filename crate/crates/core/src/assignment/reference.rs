//! Textbook O(n³) Hungarian method with row/column potentials.
//!
//! Kept separate from [`solve_optimal`](super::solve_optimal) so that the
//! greedy baseline tracker does not share its solver with the hypothesis
//! tracker it is compared against.

use super::{AssignmentError, AssignmentSolution, CostMatrix, SENTINEL};

pub fn hungarian(m: &CostMatrix) -> Result<AssignmentSolution, AssignmentError> {
    let n = m.size();
    let cost = |i: usize, j: usize| {
        let v = m.get(i - 1, j - 1);
        if v.is_finite() {
            v.min(SENTINEL)
        } else {
            SENTINEL
        }
    };
    // 1-based; column 0 is a virtual start column
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    if assignment
        .iter()
        .enumerate()
        .any(|(r, &c)| !m.is_finite(r, c) || m.get(r, c) >= SENTINEL)
    {
        return Err(AssignmentError::Infeasible);
    }
    Ok(AssignmentSolution {
        total_cost: m.assignment_cost(&assignment),
        assignment,
        rank: 1,
    })
}
