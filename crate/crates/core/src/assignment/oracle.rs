//! Exhaustive enumeration of all permutations, for cross-checking the
//! solvers on small matrices.

use super::{solution_order, AssignmentSolution, CostMatrix};

/// Largest size accepted by [`enumerate_assignments`] (9! ≈ 3.6·10⁵ permutations).
pub const MAX_ENUMERATION_SIZE: usize = 9;

/// Every finite-cost permutation of `m`, sorted by cost then lexicographically.
///
/// # Panics
/// If `m` is larger than [`MAX_ENUMERATION_SIZE`].
pub fn enumerate_assignments(m: &CostMatrix) -> Vec<AssignmentSolution> {
    let n = m.size();
    assert!(
        n <= MAX_ENUMERATION_SIZE,
        "brute-force enumeration limited to {MAX_ENUMERATION_SIZE}x{MAX_ENUMERATION_SIZE}"
    );
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend(m, &mut current, &mut used, &mut out);
    out.sort_by(|a, b| solution_order((a.total_cost, &a.assignment), (b.total_cost, &b.assignment)));
    for (i, s) in out.iter_mut().enumerate() {
        s.rank = i + 1;
    }
    out
}

fn extend(m: &CostMatrix, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<AssignmentSolution>) {
    let n = m.size();
    let row = current.len();
    if row == n {
        let total_cost = m.assignment_cost(current);
        if total_cost.is_finite() {
            out.push(AssignmentSolution {
                assignment: current.clone(),
                total_cost,
                rank: 0,
            });
        }
        return;
    }
    for col in 0..n {
        if used[col] || !m.is_finite(row, col) {
            continue;
        }
        used[col] = true;
        current.push(col);
        extend(m, current, used, out);
        current.pop();
        used[col] = false;
    }
}
