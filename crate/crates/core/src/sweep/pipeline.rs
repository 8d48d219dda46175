use serde::{Deserialize, Serialize};

use super::{
    bev_pool, collect_union, propagate_stage, voxelize, AnchorStrategy, SparseFeatureGrid, SparsityMode, SweepError,
    SweepPointCloud, VoxelSize,
};

/// Fixed layout of the sparse backbone: voxelization (stage 1), six strided
/// stages (2 to 7), a union of stages 4 to 7 and a bird's-eye-view pooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub voxel: VoxelSize,
    pub max_points_per_voxel: usize,
    pub seed: u64,
    pub mode: SparsityMode,
    pub kernel_extent: usize,
    /// Stride into stages 2 through 7.
    pub strides: [i64; 6],
    /// Feature width of stages 2 through 7.
    pub dims: [usize; 6],
    /// Stride-1 submanifold layers appended to every stage.
    pub refinement_layers: usize,
    pub anchor: AnchorStrategy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            voxel: VoxelSize::default(),
            max_points_per_voxel: 30,
            seed: 0,
            mode: SparsityMode::Dilating,
            kernel_extent: 3,
            strides: [2; 6],
            dims: [32, 64, 128, 128, 128, 128],
            refinement_layers: 4,
            anchor: AnchorStrategy::PairMidpoint,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: &str| Err(SweepError::InvalidConfig(m.into()));
        let v = self.voxel;
        if !(v.horizontal > 0.0 && v.vertical > 0.0 && v.horizontal.is_finite() && v.vertical.is_finite()) {
            return bad("voxel size must be positive");
        }
        if self.max_points_per_voxel == 0 {
            return bad("max_points_per_voxel must be at least 1");
        }
        if self.kernel_extent % 2 == 0 {
            return bad("kernel_extent must be odd");
        }
        if self.strides.iter().any(|s| *s < 1) {
            return bad("strides must be at least 1");
        }
        if self.dims.contains(&0) {
            return bad("dims must be positive");
        }
        Ok(())
    }

    /// Same layout with every strided stage in submanifold mode.
    pub fn submanifold_only(&self) -> Self {
        Self {
            mode: SparsityMode::Submanifold,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Stages 1 through 7, in order.
    pub stages: Vec<SparseFeatureGrid>,
    pub union: SparseFeatureGrid,
    pub bev: SparseFeatureGrid,
}

impl PipelineOutput {
    pub fn stage(&self, t: u8) -> &SparseFeatureGrid {
        &self.stages[t as usize - 1]
    }
}

pub fn run_pipeline(cloud: &SweepPointCloud, config: &PipelineConfig) -> Result<PipelineOutput, SweepError> {
    config.validate()?;
    let mut stages = Vec::with_capacity(7);
    stages.push(voxelize(cloud, config.voxel, config.max_points_per_voxel, config.seed)?);
    for (stride, dim) in config.strides.iter().zip(config.dims) {
        let prev = stages.last().expect("stage 1 exists");
        let mut g = propagate_stage(prev, config.mode, config.kernel_extent, *stride, dim)?;
        for _ in 0..config.refinement_layers {
            let stage = g.stage;
            let scale = g.scale;
            g = propagate_stage(&g, SparsityMode::Submanifold, config.kernel_extent, 1, dim)?;
            g.stage = stage;
            g.scale = scale;
        }
        stages.push(g);
    }
    let union = collect_union(&stages[3..])?;
    let bev = bev_pool(&union)?;
    Ok(PipelineOutput { stages, union, bev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::LidarPoint;

    #[test]
    fn stage_table() {
        let cloud = SweepPointCloud {
            frame_index: 0,
            points: vec![LidarPoint {
                x: 1.0,
                y: 1.0,
                z: 0.5,
                sweep_index: 0,
                intensity: 0.3,
                object: None,
            }],
        };
        let out = run_pipeline(&cloud, &PipelineConfig::default()).unwrap();
        let dims: Vec<usize> = out.stages.iter().map(|g| g.dim).collect();
        assert_eq!(dims, vec![30, 32, 64, 128, 128, 128, 128]);
        let scales: Vec<i64> = out.stages.iter().map(|g| g.scale).collect();
        assert_eq!(scales, vec![1, 2, 4, 8, 16, 32, 64]);
        assert_eq!(out.union.scale, 8);
        assert_eq!(out.bev.dim, 256);
        assert!(out.bev.cells.values().all(|c| c.provenance.contains(0)));
    }

    #[test]
    fn empty_cloud_flows_through() {
        let cloud = SweepPointCloud {
            frame_index: 0,
            points: vec![],
        };
        let out = run_pipeline(&cloud, &PipelineConfig::default()).unwrap();
        assert!(out.bev.is_empty());
    }
}
