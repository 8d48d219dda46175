use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Cell, CellIndex, SparseFeatureGrid, SweepError, SweepPointCloud, SWEEP_SLOTS};
use crate::detection::OLDEST_SWEEP;

/// Per-point feature: x, y, z, relative time (sweep index), intensity.
pub const POINT_FEATURE_DIM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoxelSize {
    pub horizontal: f64,
    pub vertical: f64,
}

impl Default for VoxelSize {
    fn default() -> Self {
        Self {
            horizontal: 0.1,
            vertical: 0.15,
        }
    }
}

impl VoxelSize {
    pub fn index_of(&self, x: f64, y: f64, z: f64) -> CellIndex {
        [
            (x / self.horizontal).floor() as i64,
            (y / self.horizontal).floor() as i64,
            (z / self.vertical).floor() as i64,
        ]
    }
}

/// Buckets points into voxels and stacks the per-sweep mean point feature.
///
/// At most `max_points` points per voxel are kept, chosen by a seeded
/// shuffle. Sweeps without a surviving point leave their slot at zero.
pub fn voxelize(
    cloud: &SweepPointCloud,
    voxel: VoxelSize,
    max_points: usize,
    seed: u64,
) -> Result<SparseFeatureGrid, SweepError> {
    if !(voxel.horizontal > 0.0 && voxel.vertical > 0.0) {
        return Err(SweepError::InvalidConfig("voxel size must be positive".into()));
    }
    if max_points == 0 {
        return Err(SweepError::InvalidConfig("max_points must be at least 1".into()));
    }
    cloud.validate()?;

    let n = cloud.points.len();
    let mut buckets: BTreeMap<CellIndex, Vec<usize>> = BTreeMap::new();
    for (i, p) in cloud.points.iter().enumerate() {
        buckets.entry(voxel.index_of(p.x, p.y, p.z)).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = SWEEP_SLOTS * POINT_FEATURE_DIM;
    let mut grid = SparseFeatureGrid::empty(1, 1, voxel, dim, false, n);
    for (idx, mut members) in buckets {
        if members.len() > max_points {
            members.shuffle(&mut rng);
            members.truncate(max_points);
            members.sort_unstable();
        }
        // mean as first value plus mean deviation, exact for repeated points
        let mut feature = vec![0.0; dim];
        let mut shift: [Option<[f64; POINT_FEATURE_DIM]>; SWEEP_SLOTS] = [None; SWEEP_SLOTS];
        let mut counts = [0usize; SWEEP_SLOTS];
        let mut provenance = FixedBitSet::with_capacity(n);
        for &i in &members {
            let p = &cloud.points[i];
            let slot = (p.sweep_index - OLDEST_SWEEP) as usize;
            let f = [p.x, p.y, p.z, p.sweep_index as f64, p.intensity];
            let base = *shift[slot].get_or_insert(f);
            for k in 0..POINT_FEATURE_DIM {
                feature[slot * POINT_FEATURE_DIM + k] += f[k] - base[k];
            }
            counts[slot] += 1;
            provenance.insert(i);
        }
        for (slot, base) in shift.iter().enumerate() {
            if let Some(base) = base {
                for k in 0..POINT_FEATURE_DIM {
                    let v = &mut feature[slot * POINT_FEATURE_DIM + k];
                    *v = base[k] + *v / counts[slot] as f64;
                }
            }
        }
        grid.cells.insert(idx, Cell { feature, provenance });
    }
    Ok(grid)
}
