//! Ranked assignment enumeration by Murty's partitioning.
//!
//! Every node of the search owns a subspace of assignments described by arcs
//! that must be used and arcs that must not be used. Popping the cheapest
//! node emits its optimum; the rest of its subspace is split into disjoint
//! children, each forcing a prefix of the emitted assignment and forbidding
//! the next arc.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::lap::solve_masked;
use super::{solution_order, AssignmentError, AssignmentSolution, CostMatrix, SENTINEL};

struct Node {
    cost: f64,
    assignment: Vec<usize>,
    forced: Vec<Option<usize>>,
    forbidden: Vec<(usize, usize)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        solution_order((other.cost, &other.assignment), (self.cost, &self.assignment))
    }
}

/// The `k` cheapest permutations of `m` in non-decreasing cost order
/// (lexicographic among equal costs). Returns fewer when fewer exist.
pub fn murty_kbest(m: &CostMatrix, k: usize) -> Result<Vec<AssignmentSolution>, AssignmentError> {
    let rows: Vec<usize> = (0..m.size()).collect();
    murty_kbest_on_rows(m, k, &rows)
}

/// Like [`murty_kbest`], but two permutations that agree on `branch_rows`
/// are considered the same solution; only the cheapest completion of each
/// distinct choice on those rows is reported.
pub fn murty_kbest_on_rows(
    m: &CostMatrix,
    k: usize,
    branch_rows: &[usize],
) -> Result<Vec<AssignmentSolution>, AssignmentError> {
    if k == 0 {
        return Err(AssignmentError::ZeroK);
    }
    let n = m.size();
    let base = m.masked();
    let root_assignment = solve_masked(&base, n).ok_or(AssignmentError::Infeasible)?;

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        cost: m.assignment_cost(&root_assignment),
        assignment: root_assignment,
        forced: vec![None; n],
        forbidden: Vec::new(),
    });

    let mut out = Vec::with_capacity(k.min(64));
    let mut scratch = vec![0.0; n * n];
    while let Some(node) = heap.pop() {
        out.push(AssignmentSolution {
            assignment: node.assignment.clone(),
            total_cost: node.cost,
            rank: out.len() + 1,
        });
        if out.len() == k {
            break;
        }

        let mut forced = node.forced.clone();
        let mut forbidden = node.forbidden.clone();
        for &r in branch_rows {
            if forced[r].is_some() {
                continue;
            }
            let arc = (r, node.assignment[r]);
            forbidden.push(arc);
            apply_constraints(&base, n, &forced, &forbidden, &mut scratch);
            if let Some(assignment) = solve_masked(&scratch, n) {
                heap.push(Node {
                    cost: m.assignment_cost(&assignment),
                    assignment,
                    forced: forced.clone(),
                    forbidden: forbidden.clone(),
                });
            }
            // later siblings keep this arc instead of forbidding it
            forbidden.pop();
            forced[r] = Some(arc.1);
        }
    }
    Ok(out)
}

fn apply_constraints(base: &[f64], n: usize, forced: &[Option<usize>], forbidden: &[(usize, usize)], out: &mut [f64]) {
    out.copy_from_slice(base);
    for (r, c) in forced.iter().enumerate() {
        if let Some(c) = *c {
            for j in 0..n {
                if j != c {
                    out[r * n + j] = SENTINEL;
                }
            }
            for i in 0..n {
                if i != r {
                    out[i * n + c] = SENTINEL;
                }
            }
        }
    }
    for &(r, c) in forbidden {
        out[r * n + c] = SENTINEL;
    }
}
