use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{lift, Cell, CellIndex, SparseFeatureGrid, SweepError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsityMode {
    /// Every output reached by the kernel footprint of an active input is active.
    Dilating,
    /// Only the strided image of the active inputs is active.
    Submanifold,
}

/// Output cells that input `i` feeds: `floor((i + δ) / stride)` over the
/// kernel offsets `δ ∈ [-r, r]` per axis, `r = kernel_extent / 2`. The
/// vertical axis is left alone in bird's-eye-view grids.
pub fn contributing_outputs(i: &CellIndex, kernel_extent: usize, stride: i64, bev: bool) -> Vec<CellIndex> {
    let r = (kernel_extent / 2) as i64;
    let range = |v: i64, r: i64| (v - r).div_euclid(stride)..=(v + r).div_euclid(stride);
    let rz = if bev { 0 } else { r };
    let mut out = Vec::new();
    for x in range(i[0], r) {
        for y in range(i[1], r) {
            for z in range(i[2], rz) {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn accumulate(target: &mut BTreeMap<CellIndex, Cell>, at: CellIndex, src: &Cell, num_points: usize) {
    let cell = target.entry(at).or_insert_with(|| Cell {
        feature: vec![0.0; src.feature.len()],
        provenance: FixedBitSet::with_capacity(num_points),
    });
    if cell.feature.len() < src.feature.len() {
        cell.feature.resize(src.feature.len(), 0.0);
    }
    for (a, b) in cell.feature.iter_mut().zip(&src.feature) {
        *a += b;
    }
    cell.provenance.union_with(&src.provenance);
}

/// One sparse stage with fixed sum aggregation.
pub fn propagate_stage(
    grid: &SparseFeatureGrid,
    mode: SparsityMode,
    kernel_extent: usize,
    stride: i64,
    out_dim: usize,
) -> Result<SparseFeatureGrid, SweepError> {
    if kernel_extent == 0 || kernel_extent % 2 == 0 {
        return Err(SweepError::InvalidConfig("kernel extent must be odd".into()));
    }
    if stride < 1 {
        return Err(SweepError::InvalidConfig("stride must be at least 1".into()));
    }
    let mut out = SparseFeatureGrid::empty(
        grid.stage + 1,
        grid.scale * stride,
        grid.voxel,
        out_dim,
        grid.bev,
        grid.num_points,
    );
    match mode {
        SparsityMode::Dilating => {
            for (i, cell) in &grid.cells {
                for o in contributing_outputs(i, kernel_extent, stride, grid.bev) {
                    accumulate(&mut out.cells, o, cell, grid.num_points);
                }
            }
        }
        SparsityMode::Submanifold => {
            let keep: std::collections::BTreeSet<CellIndex> = grid
                .cells
                .keys()
                .map(|i| {
                    [
                        i[0].div_euclid(stride),
                        i[1].div_euclid(stride),
                        i[2].div_euclid(stride),
                    ]
                })
                .collect();
            for (i, cell) in &grid.cells {
                for o in contributing_outputs(i, kernel_extent, stride, grid.bev) {
                    if keep.contains(&o) {
                        accumulate(&mut out.cells, o, cell, grid.num_points);
                    }
                }
            }
        }
    }
    for cell in out.cells.values_mut() {
        let f = std::mem::take(&mut cell.feature);
        cell.feature = lift(f, out_dim);
    }
    Ok(out)
}

/// Merges coarser grids onto the resolution of `stages[0]`: a coarse cell
/// `k` lands on fine cell `k · ratio`, coincident features add up.
pub fn collect_union(stages: &[SparseFeatureGrid]) -> Result<SparseFeatureGrid, SweepError> {
    let base = stages.first().ok_or(SweepError::EmptyGrid)?;
    let dim = stages.iter().map(|g| g.dim).max().unwrap_or(0);
    let mut out = SparseFeatureGrid::empty(base.stage, base.scale, base.voxel, dim, base.bev, base.num_points);
    for g in stages {
        if g.bev != base.bev {
            return Err(SweepError::NotVolumetric);
        }
        if g.scale % base.scale != 0 {
            return Err(SweepError::IncompatibleStrides {
                coarse: g.scale,
                fine: base.scale,
            });
        }
        let ratio = g.scale / base.scale;
        for (k, cell) in &g.cells {
            let at = [k[0] * ratio, k[1] * ratio, k[2] * ratio];
            accumulate(&mut out.cells, at, cell, base.num_points);
        }
    }
    for cell in out.cells.values_mut() {
        let f = std::mem::take(&mut cell.feature);
        cell.feature = lift(f, dim);
    }
    Ok(out)
}

/// Collapses each vertical column into one cell holding the elementwise
/// sum followed by the elementwise max of the column.
pub fn bev_pool(grid: &SparseFeatureGrid) -> Result<SparseFeatureGrid, SweepError> {
    if grid.bev {
        return Err(SweepError::NotVolumetric);
    }
    let d = grid.dim;
    let mut out = SparseFeatureGrid::empty(grid.stage, grid.scale, grid.voxel, 2 * d, true, grid.num_points);
    for (k, cell) in &grid.cells {
        let col = out.cells.entry([k[0], k[1], 0]).or_insert_with(|| {
            let mut feature = vec![0.0; 2 * d];
            feature[d..].fill(f64::NEG_INFINITY);
            Cell {
                feature,
                provenance: FixedBitSet::with_capacity(grid.num_points),
            }
        });
        for (j, v) in cell.feature.iter().enumerate() {
            col.feature[j] += v;
            col.feature[d + j] = col.feature[d + j].max(*v);
        }
        col.provenance.union_with(&cell.provenance);
    }
    Ok(out)
}
