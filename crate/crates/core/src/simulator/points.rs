use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ScenarioSpec;
use crate::detection::{NEWEST_SWEEP, OLDEST_SWEEP};
use crate::geometry::{OrientedBox2D, Point2};
use crate::sweep::{LidarPoint, SweepPointCloud};

fn frame_rng(seed: u64, frame: i64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame as u64);
    rng
}

/// Uniform point on the outline of `b`, parameterized by arc length `u`.
fn perimeter_point(b: &OrientedBox2D, u: f64) -> Point2 {
    let (l, w) = (b.length, b.width);
    let local = if u < l {
        Point2::new(-l / 2.0 + u, -w / 2.0)
    } else if u < l + w {
        Point2::new(l / 2.0, -w / 2.0 + (u - l))
    } else if u < 2.0 * l + w {
        Point2::new(l / 2.0 - (u - l - w), w / 2.0)
    } else {
        Point2::new(-l / 2.0, w / 2.0 - (u - 2.0 * l - w))
    };
    b.center() + local.rotate(b.heading)
}

/// Points of the buffer ending at `frame`: every visible object is sampled
/// on its outline at its pose in each sweep, plus uniform ground clutter.
/// The generator is private to the frame, so clouds do not perturb the
/// detection stream.
pub fn synthesize_points(spec: &ScenarioSpec, frame: i64) -> SweepPointCloud {
    let mut rng = frame_rng(spec.seed, frame);
    let model = &spec.points;
    let [x0, y0, x1, y1] = model.region;
    let mut points = Vec::new();
    for s in OLDEST_SWEEP..=NEWEST_SWEEP {
        let g = frame + s as i64;
        for o in spec.objects.iter().filter(|o| o.visible_at(g)) {
            let b = o.box_at(g, spec.frame_rate);
            let perimeter = 2.0 * (b.length + b.width);
            for _ in 0..model.points_per_object {
                let p = perimeter_point(&b, rng.gen_range(0.0..perimeter));
                points.push(LidarPoint {
                    x: p.x,
                    y: p.y,
                    z: rng.gen_range(0.0..o.height),
                    sweep_index: s,
                    intensity: rng.gen_range(0.0..1.0),
                    object: Some(o.id.clone()),
                });
            }
        }
        for _ in 0..model.background_points {
            points.push(LidarPoint {
                x: rng.gen_range(x0..x1),
                y: rng.gen_range(y0..y1),
                z: rng.gen_range(0.0..0.1),
                sweep_index: s,
                intensity: rng.gen_range(0.0..1.0),
                object: None,
            });
        }
    }
    SweepPointCloud {
        frame_index: frame,
        points,
    }
}
