use crate::detection::PairedDetection;
use crate::likelihood::{score_pair, LikelihoodParams};
use crate::tracker::Track;

use super::CostMatrix;

/// Row/column layout of the augmented square problem.
///
/// Rows are the tracks followed by one row per detection; columns are the
/// detections followed by one miss column per track. A track row either
/// takes a detection column or its own miss column; a detection row either
/// takes its own column (unassociated: birth or false alarm) or a miss
/// column at zero cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedLayout {
    pub tracks: usize,
    pub detections: usize,
    /// Per detection, whether leaving it unassociated spawns a track
    /// (`true`) or discards it as a false alarm.
    pub spawns: Vec<bool>,
}

/// Decoded outcome of one augmented assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisAssignment {
    /// Detection index taken by each track, `None` for a miss.
    pub track_to_det: Vec<Option<usize>>,
    /// Unassociated detections that start new tracks, ascending.
    pub births: Vec<usize>,
    /// Unassociated detections explained as clutter, ascending.
    pub false_alarms: Vec<usize>,
}

impl AugmentedLayout {
    pub fn size(&self) -> usize {
        self.tracks + self.detections
    }

    /// Rows whose choice distinguishes hypotheses.
    pub fn track_rows(&self) -> Vec<usize> {
        (0..self.tracks).collect()
    }

    pub fn decode(&self, assignment: &[usize]) -> HypothesisAssignment {
        debug_assert_eq!(assignment.len(), self.size());
        let mut taken = vec![false; self.detections];
        let track_to_det: Vec<Option<usize>> = assignment[..self.tracks]
            .iter()
            .map(|&c| {
                (c < self.detections).then(|| {
                    taken[c] = true;
                    c
                })
            })
            .collect();
        let (births, false_alarms) = (0..self.detections)
            .filter(|&j| !taken[j])
            .partition(|&j| self.spawns[j]);
        HypothesisAssignment {
            track_to_det,
            births,
            false_alarms,
        }
    }
}

/// Negative log-likelihood matrix for associating `dets` (observed at
/// `frame_index`) with `tracks`. Forbidden arcs are `+inf`.
pub fn build_cost_matrix(
    tracks: &[Track],
    dets: &[PairedDetection],
    frame_index: i64,
    params: &LikelihoodParams,
) -> (CostMatrix, AugmentedLayout) {
    let n = tracks.len();
    let m = dets.len();
    let mut cost = CostMatrix::filled(n + m, f64::INFINITY);
    for (i, track) in tracks.iter().enumerate() {
        for (j, det) in dets.iter().enumerate() {
            let s = score_pair(track, det, frame_index, params);
            cost.set(i, j, -s.log_likelihood);
        }
        cost.set(i, m + i, -params.log_miss);
    }
    let mut spawns = Vec::with_capacity(m);
    for (j, det) in dets.iter().enumerate() {
        let (ll, spawn) = params.unassociated(det);
        cost.set(n + j, j, -ll);
        spawns.push(spawn);
        for i in 0..n {
            cost.set(n + j, m + i, 0.0);
        }
    }
    (
        cost,
        AugmentedLayout {
            tracks: n,
            detections: m,
            spawns,
        },
    )
}
