use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CellIndex, PipelineOutput, SparseFeatureGrid, SweepError, SweepPointCloud};
use crate::detection::{derive_time_targets, ClassLabel, GroundTruthTrack, SweepRange, TimeTargets};
use crate::geometry::{OrientedBox2D, Point2};

/// How an object is reduced to the single point that picks its anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorStrategy {
    /// Midpoint between the centers of the begin and end boxes.
    PairMidpoint,
    /// Corner of the end box nearest to the coordinate origin.
    NearestCorner,
}

pub fn representative(begin: &OrientedBox2D, end: &OrientedBox2D, strategy: AnchorStrategy) -> Point2 {
    match strategy {
        AnchorStrategy::PairMidpoint => begin.center().midpoint(end.center()),
        AnchorStrategy::NearestCorner => {
            let corners = end.corners();
            let mut best = corners[0];
            for c in &corners[1..] {
                if c.norm() < best.norm() {
                    best = *c;
                }
            }
            best
        }
    }
}

fn squared_distance(bev: &SparseFeatureGrid, idx: &CellIndex, y: Point2) -> f64 {
    let (cx, cy) = bev.cell_center_xy(idx);
    (cx - y.x).powi(2) + (cy - y.y).powi(2)
}

/// Active cell whose center is nearest to `y`; the smallest index wins ties.
pub fn assign_anchor(bev: &SparseFeatureGrid, y: Point2) -> Result<CellIndex, SweepError> {
    if !bev.bev {
        return Err(SweepError::NotBev);
    }
    let mut best: Option<(f64, CellIndex)> = None;
    // ascending key order, so strict improvement keeps the smallest index
    for idx in bev.active() {
        let d = squared_distance(bev, idx, y);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, *idx));
        }
    }
    best.map(|(_, idx)| idx).ok_or(SweepError::EmptyGrid)
}

/// Input points with a path to `cell`, ascending.
pub fn inverse_neighborhood(bev: &SparseFeatureGrid, cell: &CellIndex) -> Result<Vec<usize>, SweepError> {
    bev.cells
        .get(cell)
        .map(|c| c.provenance.ones().collect())
        .ok_or(SweepError::InactiveCell(*cell))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveCell {
    pub cell: CellIndex,
    pub track_id: String,
    #[serde(rename = "class")]
    pub class_label: ClassLabel,
    pub box_begin: OrientedBox2D,
    pub box_end: OrientedBox2D,
    pub height: f64,
    pub z: f64,
    pub targets: TimeTargets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelAssignment {
    pub frame_index: i64,
    /// One per object, in input order.
    pub representatives: Vec<Point2>,
    /// Ordered by cell index.
    pub positives: Vec<PositiveCell>,
    /// Objects that lost their cell to a nearer object or had none.
    pub unassigned: Vec<String>,
}

/// Anchors every ground-truth object on `bev` and attaches its targets.
pub fn build_label_assignment(
    bev: &SparseFeatureGrid,
    frame_index: i64,
    objects: &[GroundTruthTrack],
    strategy: AnchorStrategy,
) -> LabelAssignment {
    let buffer = SweepRange::default();
    let mut representatives = Vec::with_capacity(objects.len());
    let mut winners: BTreeMap<CellIndex, (f64, PositiveCell)> = BTreeMap::new();
    let mut unassigned = Vec::new();
    for gt in objects {
        let Ok(targets) = derive_time_targets(gt, buffer) else {
            unassigned.push(gt.track_id.clone());
            continue;
        };
        let (Some(first), Some(last)) = (gt.at(targets.t_b), gt.at(targets.t_e)) else {
            unassigned.push(gt.track_id.clone());
            continue;
        };
        let y = representative(&first.bbox, &last.bbox, strategy);
        representatives.push(y);
        let Ok(cell) = assign_anchor(bev, y) else {
            unassigned.push(gt.track_id.clone());
            continue;
        };
        let d = squared_distance(bev, &cell, y);
        let candidate = PositiveCell {
            cell,
            track_id: gt.track_id.clone(),
            class_label: gt.class_label,
            box_begin: first.bbox,
            box_end: last.bbox,
            height: last.height,
            z: last.z,
            targets,
        };
        match winners.get(&cell) {
            Some((bd, held)) if *bd < d || (*bd == d && held.track_id <= candidate.track_id) => {
                unassigned.push(candidate.track_id);
            }
            _ => {
                if let Some((_, lost)) = winners.insert(cell, (d, candidate)) {
                    unassigned.push(lost.track_id);
                }
            }
        }
    }
    unassigned.sort();
    LabelAssignment {
        frame_index,
        representatives,
        positives: winners.into_values().map(|(_, p)| p).collect(),
        unassigned,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErfEntry {
    pub track_id: String,
    pub cell: Option<CellIndex>,
    /// Object points that survived voxelization.
    pub object_points: usize,
    /// How many of those reach the object's anchor cell.
    pub reachable_points: usize,
    pub contained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErfReport {
    pub entries: Vec<ErfEntry>,
    pub contained: usize,
    /// Objects with at least one surviving point.
    pub total: usize,
}

impl ErfReport {
    pub fn coverage(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.contained as f64 / self.total as f64
        }
    }
}

/// Checks, per object, whether every one of its points that entered the
/// grid can reach the object's anchor cell.
pub fn erf_report(
    cloud: &SweepPointCloud,
    output: &PipelineOutput,
    objects: &[GroundTruthTrack],
    strategy: AnchorStrategy,
) -> ErfReport {
    let mut entered = fixedbitset::FixedBitSet::with_capacity(cloud.points.len());
    for cell in output.stage(1).cells.values() {
        entered.union_with(&cell.provenance);
    }
    let buffer = SweepRange::default();
    let mut entries = Vec::with_capacity(objects.len());
    for gt in objects {
        let own: Vec<usize> = cloud
            .points
            .iter()
            .enumerate()
            .filter(|(i, p)| entered.contains(*i) && p.object.as_deref() == Some(gt.track_id.as_str()))
            .map(|(i, _)| i)
            .collect();
        // the anchor an object would get on its own, even if it lost a
        // collision in the label assignment
        let cell = derive_time_targets(gt, buffer).ok().and_then(|t| {
            let first = gt.at(t.t_b)?;
            let last = gt.at(t.t_e)?;
            assign_anchor(&output.bev, representative(&first.bbox, &last.bbox, strategy)).ok()
        });
        let reachable = cell.map_or(0, |c| {
            let prov = &output.bev.cells[&c].provenance;
            own.iter().filter(|&&i| prov.contains(i)).count()
        });
        entries.push(ErfEntry {
            track_id: gt.track_id.clone(),
            cell,
            object_points: own.len(),
            reachable_points: reachable,
            contained: reachable == own.len(),
        });
    }
    let counted: Vec<&ErfEntry> = entries.iter().filter(|e| e.object_points > 0).collect();
    ErfReport {
        contained: counted.iter().filter(|e| e.contained).count(),
        total: counted.len(),
        entries,
    }
}
