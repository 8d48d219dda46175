//! Sparse multi-sweep grids.
//!
//! Points from a buffer of sweeps are bucketed into voxels, carried through
//! a stack of strided sparse stages, merged across the coarse stages,
//! pooled to a bird's-eye view, and finally used to pick one anchor cell
//! per object. Aggregation is fixed (sums and maxima) rather than learned,
//! so every cell also tracks which input points can reach it.

mod labels;
mod pipeline;
mod propagate;
mod voxel;

pub use labels::{
    assign_anchor, build_label_assignment, erf_report, inverse_neighborhood, representative, AnchorStrategy, ErfEntry,
    ErfReport, LabelAssignment, PositiveCell,
};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
pub use propagate::{bev_pool, collect_union, contributing_outputs, propagate_stage, SparsityMode};
pub use voxel::{voxelize, VoxelSize, POINT_FEATURE_DIM};

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::{SweepRange, BUFFER_SWEEPS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("point {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error("invalid pipeline setting: {0}")]
    InvalidConfig(String),
    #[error("cell size ratio {coarse}/{fine} is not an integer")]
    IncompatibleStrides { coarse: i64, fine: i64 },
    #[error("grid has no active cell")]
    EmptyGrid,
    #[error("cell {0:?} is not active")]
    InactiveCell(CellIndex),
    #[error("operation needs a bird's-eye-view grid")]
    NotBev,
    #[error("operation needs a 3D grid")]
    NotVolumetric,
}

/// One lidar return, in the coordinate frame of the newest sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidarPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub sweep_index: i32,
    pub intensity: f64,
    /// Ground-truth object the point was sampled from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPointCloud {
    pub frame_index: i64,
    pub points: Vec<LidarPoint>,
}

impl SweepPointCloud {
    pub fn validate(&self) -> Result<(), SweepError> {
        let buffer = SweepRange::default();
        for (index, p) in self.points.iter().enumerate() {
            let fail = |reason: &str| SweepError::InvalidPoint {
                index,
                reason: reason.to_string(),
            };
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(fail("coordinates must be finite"));
            }
            if !buffer.contains(p.sweep_index) {
                return Err(fail("sweep index outside the buffer"));
            }
            if !(p.intensity >= 0.0 && p.intensity.is_finite()) {
                return Err(fail("intensity must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// Integer cell coordinates; bird's-eye-view grids keep the last one at 0.
pub type CellIndex = [i64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub feature: Vec<f64>,
    /// Indices of the input points with a path to this cell.
    pub provenance: FixedBitSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseFeatureGrid {
    pub stage: u8,
    /// Cell edge in voxels (product of the strides so far).
    pub scale: i64,
    pub voxel: VoxelSize,
    pub dim: usize,
    pub bev: bool,
    /// Length of the provenance bitsets (points in the source cloud).
    pub num_points: usize,
    pub cells: BTreeMap<CellIndex, Cell>,
}

impl SparseFeatureGrid {
    pub fn empty(stage: u8, scale: i64, voxel: VoxelSize, dim: usize, bev: bool, num_points: usize) -> Self {
        Self {
            stage,
            scale,
            voxel,
            dim,
            bev,
            num_points,
            cells: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn active(&self) -> impl Iterator<Item = &CellIndex> {
        self.cells.keys()
    }

    /// Cell edge lengths in meters (horizontal, vertical).
    pub fn cell_size(&self) -> (f64, f64) {
        (
            self.voxel.horizontal * self.scale as f64,
            self.voxel.vertical * self.scale as f64,
        )
    }

    /// Horizontal center of a cell, meters.
    pub fn cell_center_xy(&self, idx: &CellIndex) -> (f64, f64) {
        let (h, _) = self.cell_size();
        ((idx[0] as f64 + 0.5) * h, (idx[1] as f64 + 0.5) * h)
    }
}

/// Buffer length used to lay out per-sweep feature slots.
pub const SWEEP_SLOTS: usize = BUFFER_SWEEPS;

/// Zero-pads or truncates `v` to `dim` entries.
pub(crate) fn lift(mut v: Vec<f64>, dim: usize) -> Vec<f64> {
    v.resize(dim, 0.0);
    v
}
