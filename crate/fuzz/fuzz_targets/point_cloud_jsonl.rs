#![no_main]
//! Point-cloud JSONL reader, followed by voxelization of small clouds.

use libfuzzer_sys::fuzz_target;
use pairtrack::io::{parse_point_clouds, to_jsonl_string};
use pairtrack::sweep::{voxelize, VoxelSize};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(clouds) = parse_point_clouds(text) else {
        return;
    };
    assert_eq!(parse_point_clouds(&to_jsonl_string(&clouds)).unwrap(), clouds);
    for cloud in clouds.iter().filter(|c| c.points.len() <= 256) {
        let grid = voxelize(cloud, VoxelSize::default(), 4, 0).expect("validated cloud voxelizes");
        assert!(grid.len() <= cloud.points.len());
    }
});
