#![no_main]
//! Pipeline TOML; modest accepted configs are run on a fixed small cloud.

use libfuzzer_sys::fuzz_target;
use pairtrack::io::parse_pipeline_config;
use pairtrack::sweep::{run_pipeline, LidarPoint, SweepPointCloud};

fn cloud() -> SweepPointCloud {
    let points = (0..12)
        .map(|i| LidarPoint {
            x: i as f64 * 0.37 - 2.0,
            y: (i % 4) as f64 * 0.5,
            z: 0.2 * (i % 3) as f64,
            sweep_index: -(i % 6),
            intensity: 0.5,
            object: None,
        })
        .collect();
    SweepPointCloud { frame_index: 0, points }
}

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = parse_pipeline_config(s) else {
        return;
    };
    let modest = config.kernel_extent <= 5
        && config.refinement_layers <= 4
        && config.strides.iter().all(|s| (2..=8).contains(s))
        && config.dims.iter().all(|d| *d <= 256)
        && config.voxel.horizontal >= 0.01
        && config.voxel.vertical >= 0.01;
    if modest {
        let _ = run_pipeline(&cloud(), &config);
    }
});
