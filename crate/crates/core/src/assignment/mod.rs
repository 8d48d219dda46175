//! Square linear assignment: cost matrices, an optimal solver, ranked
//! k-best enumeration and reference solvers used for cross-checking.

mod cost;
mod lap;
mod murty;
pub mod oracle;
pub mod reference;

pub use cost::{build_cost_matrix, AugmentedLayout, HypothesisAssignment};
pub use lap::solve_optimal;
pub use murty::{murty_kbest, murty_kbest_on_rows};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Finite stand-in for forbidden arcs inside the solvers. Any solution that
/// uses an arc at or above this value is rejected as infeasible.
pub const SENTINEL: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignmentError {
    #[error("cost matrix is not square: row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("cost matrix entry ({row}, {col}) is {value}; entries must be finite or +inf")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("no finite-cost assignment exists")]
    Infeasible,
    #[error("k must be at least 1")]
    ZeroK,
}

/// Square matrix of assignment costs; `f64::INFINITY` marks a forbidden arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(size: usize, entries: Vec<f64>) -> Result<Self, AssignmentError> {
        if entries.len() != size * size {
            return Err(AssignmentError::NotSquare {
                row: 0,
                len: entries.len(),
                size: size * size,
            });
        }
        for (k, &value) in entries.iter().enumerate() {
            if value.is_nan() || value == f64::NEG_INFINITY {
                return Err(AssignmentError::InvalidEntry {
                    row: k / size.max(1),
                    col: k % size.max(1),
                    value,
                });
            }
        }
        Ok(Self { size, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AssignmentError> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(AssignmentError::NotSquare {
                    row,
                    len: r.len(),
                    size,
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(size, entries)
    }

    pub fn filled(size: usize, value: f64) -> Self {
        Self {
            size,
            entries: vec![value; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.entries[row * self.size + col] = value;
    }

    pub fn is_finite(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_finite()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.size..(row + 1) * self.size]
    }

    /// Whether every row and every column has at least one finite entry.
    pub fn lines_feasible(&self) -> bool {
        let n = self.size;
        (0..n).all(|r| self.row(r).iter().any(|v| v.is_finite()))
            && (0..n).all(|c| (0..n).any(|r| self.is_finite(r, c)))
    }

    /// Sum of the selected entries, accumulated in row order.
    pub fn assignment_cost(&self, assignment: &[usize]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .fold(0.0, |acc, (r, &c)| acc + self.get(r, c))
    }

    /// Entries with `+inf` replaced by [`SENTINEL`].
    pub(crate) fn masked(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|&v| if v.is_finite() { v.min(SENTINEL) } else { SENTINEL })
            .collect()
    }
}

/// One full assignment `row -> assignment[row]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSolution {
    pub assignment: Vec<usize>,
    pub total_cost: f64,
    /// 1-based position in a ranked list.
    pub rank: usize,
}

/// Orders solutions by cost, then lexicographically by assignment.
pub(crate) fn solution_order(a: (f64, &[usize]), b: (f64, &[usize])) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1))
}
