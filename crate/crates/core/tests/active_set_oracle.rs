//! Strided propagation checked against plain set arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use pairtrack::sweep::{
    bev_pool, propagate_stage, voxelize, CellIndex, LidarPoint, SparseFeatureGrid, SparsityMode, SweepPointCloud,
    VoxelSize,
};
use proptest::prelude::*;

/// Active cells and their provenance as sorted point lists.
type Pattern = BTreeMap<CellIndex, Vec<usize>>;

fn pattern(g: &SparseFeatureGrid) -> Pattern {
    g.cells
        .iter()
        .map(|(k, c)| (*k, c.provenance.ones().collect()))
        .collect()
}

/// Output cell `o` sees input `i` when, on every axis, `i` lies in
/// `[o·s − r, o·s + s − 1 + r]`.
fn sees(o: &CellIndex, i: &CellIndex, s: i64, r: i64, bev: bool) -> bool {
    (0..3).all(|a| {
        let (stride, reach) = if a == 2 && bev { (1, 0) } else { (s, r) };
        let lo = o[a] * stride - reach;
        let hi = o[a] * stride + stride - 1 + reach;
        if a == 2 && bev {
            o[a] == 0 && i[a] == 0
        } else {
            (lo..=hi).contains(&i[a])
        }
    })
}

fn oracle(input: &Pattern, mode: SparsityMode, kernel: usize, s: i64, bev: bool) -> Pattern {
    let r = (kernel / 2) as i64;
    let strided: BTreeSet<CellIndex> = input
        .keys()
        .map(|i| {
            let z = if bev { i[2] } else { i[2].div_euclid(s) };
            [i[0].div_euclid(s), i[1].div_euclid(s), z]
        })
        .collect();
    let mut candidates = BTreeSet::new();
    for i in input.keys() {
        let span = |v: i64, reach: i64| (v - reach).div_euclid(s)..=(v + reach).div_euclid(s);
        for x in span(i[0], r) {
            for y in span(i[1], r) {
                if bev {
                    candidates.insert([x, y, 0]);
                } else {
                    for z in span(i[2], r) {
                        candidates.insert([x, y, z]);
                    }
                }
            }
        }
    }
    let mut out = Pattern::new();
    for o in candidates {
        if mode == SparsityMode::Submanifold && !strided.contains(&o) {
            continue;
        }
        let mut prov: BTreeSet<usize> = BTreeSet::new();
        for (i, p) in input {
            if sees(&o, i, s, r, bev) {
                prov.extend(p);
            }
        }
        if !prov.is_empty() {
            out.insert(o, prov.into_iter().collect());
        }
    }
    out
}

fn grid_from(cells: &[(i64, i64, i64)], bev: bool) -> SparseFeatureGrid {
    let voxel = VoxelSize::default();
    let points = cells
        .iter()
        .map(|&(x, y, z)| LidarPoint {
            x: (x as f64 + 0.5) * voxel.horizontal,
            y: (y as f64 + 0.5) * voxel.horizontal,
            z: (z as f64 + 0.5) * voxel.vertical,
            sweep_index: 0,
            intensity: 0.5,
            object: None,
        })
        .collect();
    let cloud = SweepPointCloud { frame_index: 0, points };
    let g = voxelize(&cloud, voxel, 1000, 0).unwrap();
    if bev {
        bev_pool(&g).unwrap()
    } else {
        g
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn propagation_matches_set_arithmetic(
        cells in proptest::collection::vec((-8..8i64, -8..8i64, -3..3i64), 1..40),
        dilating in any::<bool>(),
        kernel in prop_oneof![Just(1usize), Just(3), Just(5)],
        stride in 1..4i64,
        bev in any::<bool>(),
    ) {
        let mode = if dilating { SparsityMode::Dilating } else { SparsityMode::Submanifold };
        let g = grid_from(&cells, bev);
        let out = propagate_stage(&g, mode, kernel, stride, 8).unwrap();
        prop_assert_eq!(pattern(&out), oracle(&pattern(&g), mode, kernel, stride, bev));
        prop_assert_eq!(out.bev, bev);
        prop_assert_eq!(out.scale, g.scale * stride);
    }

    #[test]
    fn dilating_covers_submanifold(
        cells in proptest::collection::vec((-8..8i64, -8..8i64, -3..3i64), 1..40),
        kernel in prop_oneof![Just(1usize), Just(3), Just(5)],
        stride in 1..4i64,
    ) {
        let g = grid_from(&cells, false);
        let d = pattern(&propagate_stage(&g, SparsityMode::Dilating, kernel, stride, 4).unwrap());
        let s = pattern(&propagate_stage(&g, SparsityMode::Submanifold, kernel, stride, 4).unwrap());
        for (k, p) in &s {
            prop_assert_eq!(d.get(k), Some(p));
        }
    }
}

#[test]
fn stride_one_submanifold_keeps_the_active_set() {
    let g = grid_from(&[(0, 0, 0), (5, 5, 1), (-3, 2, 0)], false);
    let out = propagate_stage(&g, SparsityMode::Submanifold, 3, 1, 4).unwrap();
    let a: Vec<_> = out.active().copied().collect();
    let b: Vec<_> = g.active().copied().collect();
    assert_eq!(a, b);
}
