use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::{box_center_z, ObjectSpec, ScenarioSpec, SimulatorError};
use crate::detection::{
    derive_time_targets, ClassLabel, Frame, GroundTruthTrack, PairedDetection, SweepPresence, SweepRange, NEWEST_SWEEP,
    OLDEST_SWEEP,
};
use crate::geometry::{normalize_angle, OrientedBox2D, Point2};

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub frames: Vec<Frame>,
}

/// Typical extent (length, width, height) for clutter of each class.
fn nominal_extent(class: ClassLabel) -> (f64, f64, f64) {
    match class {
        ClassLabel::Vehicle => (4.5, 1.9, 1.6),
        ClassLabel::Pedestrian => (0.8, 0.8, 1.8),
        ClassLabel::Cyclist => (1.8, 0.7, 1.7),
    }
}

fn presence(o: &ObjectSpec, frame: i64, rate: f64, keep: impl Fn(i64) -> bool) -> Vec<SweepPresence> {
    (OLDEST_SWEEP..=NEWEST_SWEEP)
        .filter(|s| keep(frame + *s as i64))
        .map(|s| SweepPresence {
            sweep: s,
            bbox: o.box_at(frame + s as i64, rate),
            z: box_center_z(o.height),
            height: o.height,
        })
        .collect()
}

/// Latest contiguous run of visible sweeps; earlier breaks are ignored.
fn latest_visible_run(o: &ObjectSpec, frame: i64, rate: f64) -> Option<GroundTruthTrack> {
    let newest = (OLDEST_SWEEP..=NEWEST_SWEEP)
        .rev()
        .find(|s| o.visible_at(frame + *s as i64))?;
    let mut oldest = newest;
    while oldest > OLDEST_SWEEP && o.visible_at(frame + oldest as i64 - 1) {
        oldest -= 1;
    }
    Some(GroundTruthTrack {
        track_id: o.id.clone(),
        class_label: o.class_label,
        presence: presence(o, frame, rate, |g| {
            (frame + oldest as i64..=frame + newest as i64).contains(&g)
        }),
    })
}

fn jitter(b: &OrientedBox2D, rng: &mut ChaCha8Rng, sigma: f64, heading_sigma: f64) -> (OrientedBox2D, f64) {
    let dx: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    let dy: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    let dh: f64 = rng.sample::<f64, _>(StandardNormal) * heading_sigma;
    let noisy = if dx == 0.0 && dy == 0.0 && dh == 0.0 {
        *b
    } else {
        b.with_pose(b.center() + Point2::new(dx, dy), normalize_angle(b.heading + dh))
    };
    (noisy, dx.hypot(dy))
}

/// Runs the scenario; all randomness comes from one generator seeded by
/// `spec.seed`.
pub fn simulate(spec: &ScenarioSpec) -> Result<SimOutput, SimulatorError> {
    spec.validate()?;
    let rate = spec.frame_rate;
    let sensor = &spec.sensor;
    let buffer = SweepRange::default();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let clutter =
        (sensor.clutter_rate > 0.0).then(|| Poisson::new(sensor.clutter_rate).expect("validated positive rate"));

    let mut frames = Vec::with_capacity(spec.duration_frames.max(0) as usize);
    for f in 0..spec.duration_frames {
        let ground_truth: Vec<GroundTruthTrack> = spec
            .objects
            .iter()
            .filter_map(|o| {
                let p = presence(o, f, rate, |g| o.exists_at(g));
                (!p.is_empty()).then(|| GroundTruthTrack {
                    track_id: o.id.clone(),
                    class_label: o.class_label,
                    presence: p,
                })
            })
            .collect();

        let mut detections = Vec::new();
        for o in &spec.objects {
            let Some(run) = latest_visible_run(o, f, rate) else {
                continue;
            };
            if rng.gen::<f64>() >= sensor.detection_probability {
                continue;
            }
            let targets = derive_time_targets(&run, buffer).expect("run lies in the buffer");
            let end = run.at(targets.t_e).expect("run covers t_e").bbox;
            let begin = run.at(targets.t_b).expect("run covers t_b").bbox;
            let (box_end, err) = jitter(&end, &mut rng, sensor.center_sigma, sensor.heading_sigma);
            let box_begin = if targets.is_singleton() {
                box_end
            } else {
                jitter(&begin, &mut rng, sensor.center_sigma, sensor.heading_sigma).0
            };
            let confidence = if sensor.center_sigma > 0.0 {
                (1.0 - err / (3.0 * sensor.center_sigma)).clamp(0.05, 0.99)
            } else {
                0.99
            };
            detections.push(PairedDetection {
                id: 0,
                class_label: o.class_label,
                box_end,
                box_begin,
                shared_height: o.height,
                shared_z: box_center_z(o.height),
                t_b: targets.t_b,
                t_e: targets.t_e,
                birth_flag: targets.birth_flag,
                death_flag: targets.death_flag,
                confidence,
            });
        }

        let n_clutter = clutter.as_ref().map_or(0, |d| d.sample(&mut rng) as usize);
        let [x0, y0, x1, y1] = sensor.clutter_region;
        for _ in 0..n_clutter {
            let class = ClassLabel::ALL[rng.gen_range(0..ClassLabel::ALL.len())];
            let (l, w, h) = nominal_extent(class);
            let b = OrientedBox2D {
                cx: rng.gen_range(x0..x1),
                cy: rng.gen_range(y0..y1),
                length: l,
                width: w,
                heading: normalize_angle(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)),
            };
            let t = rng.gen_range(OLDEST_SWEEP + 1..NEWEST_SWEEP);
            detections.push(PairedDetection {
                id: 0,
                class_label: class,
                box_end: b,
                box_begin: b,
                shared_height: h,
                shared_z: box_center_z(h),
                t_b: t,
                t_e: t,
                birth_flag: true,
                death_flag: true,
                confidence: rng.gen_range(0.05..0.5),
            });
        }

        detections.shuffle(&mut rng);
        for (i, d) in detections.iter_mut().enumerate() {
            d.id = i as u64;
        }
        frames.push(Frame {
            frame_index: f,
            timestamp: f as f64 / rate,
            detections,
            ground_truth: Some(ground_truth),
        });
    }
    Ok(SimOutput { frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::BufferCase;
    use crate::simulator::{Motion, SensorModel};

    fn object(id: &str, motion: Motion) -> ObjectSpec {
        ObjectSpec {
            id: id.into(),
            class_label: ClassLabel::Vehicle,
            length: 4.5,
            width: 1.9,
            height: 1.6,
            x: 0.0,
            y: 0.0,
            heading: 0.0,
            motion,
            birth_frame: -5,
            death_frame: None,
            occlusions: vec![],
        }
    }

    fn spec(objects: Vec<ObjectSpec>, duration: i64) -> ScenarioSpec {
        ScenarioSpec {
            name: "t".into(),
            duration_frames: duration,
            frame_rate: 10.0,
            seed: 5,
            sensor: SensorModel::default(),
            points: Default::default(),
            objects,
        }
    }

    #[test]
    fn parked_car_zero_noise() {
        let out = simulate(&spec(vec![object("car", Motion::Static)], 5)).unwrap();
        for f in &out.frames {
            let d = &f.detections[0];
            assert_eq!(d.box_begin, d.box_end);
            assert_eq!((d.t_b, d.t_e), (-5, 0));
            assert!(!d.birth_flag && !d.death_flag);
            f.validate().unwrap();
        }
    }

    #[test]
    fn moving_car_pair_spans_half_a_second() {
        let car = object(
            "car",
            Motion::ConstVelocity {
                speed: 10.0,
                heading: 0.3,
            },
        );
        let out = simulate(&spec(vec![car], 3)).unwrap();
        for f in &out.frames {
            let d = &f.detections[0];
            assert!((d.box_end.center().distance(d.box_begin.center()) - 10.0 * 5.0 / 10.0).abs() < 1e-9);
            let gt = &f.ground_truth.as_ref().unwrap()[0];
            assert_eq!(gt.at(0).unwrap().bbox, d.box_end);
            assert_eq!(gt.at(-5).unwrap().bbox, d.box_begin);
        }
    }

    #[test]
    fn late_birth_sets_birth_marker() {
        let mut car = object("car", Motion::Static);
        car.birth_frame = 8;
        let out = simulate(&spec(vec![car], 12)).unwrap();
        assert!(out.frames[..8].iter().all(|f| f.detections.is_empty()));
        let d = &out.frames[10].detections[0];
        assert_eq!((d.t_b, d.t_e, d.birth_flag), (-2, 0, true));
    }

    #[test]
    fn occlusion_exit_is_a_birth_inside_the_buffer() {
        let mut car = object("car", Motion::Static);
        car.occlusions = vec![[0, 10]];
        let out = simulate(&spec(vec![car], 14)).unwrap();
        let d = &out.frames[12].detections[0];
        assert_eq!((d.t_b, d.t_e, d.birth_flag, d.death_flag), (-2, 0, true, false));
        // ground truth keeps the object through the occlusion
        let gt = &out.frames[12].ground_truth.as_ref().unwrap()[0];
        assert_eq!(
            derive_time_targets(gt, SweepRange::default())
                .unwrap()
                .case(SweepRange::default()),
            BufferCase::Full
        );
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let mut s = spec(
            vec![object(
                "car",
                Motion::ConstTurn {
                    speed: 5.0,
                    yaw_rate: 0.2,
                },
            )],
            20,
        );
        s.sensor = SensorModel {
            detection_probability: 0.8,
            center_sigma: 0.2,
            heading_sigma: 0.05,
            clutter_rate: 3.0,
            clutter_region: [-20.0, -20.0, 20.0, 20.0],
        };
        let a = simulate(&s).unwrap();
        assert_eq!(a, simulate(&s).unwrap());
        s.seed += 1;
        assert_ne!(a, simulate(&s).unwrap());
        for f in &a.frames {
            f.validate().unwrap();
        }
    }

    #[test]
    fn clutter_is_interior_singletons() {
        let mut s = spec(vec![], 30);
        s.sensor.clutter_rate = 4.0;
        let out = simulate(&s).unwrap();
        let all: Vec<&PairedDetection> = out.frames.iter().flat_map(|f| &f.detections).collect();
        assert!(!all.is_empty());
        for d in all {
            assert_eq!(d.time_targets().case(SweepRange::default()), BufferCase::Interior);
            assert!(d.birth_flag && d.death_flag);
            assert!((0.05..0.5).contains(&d.confidence));
        }
    }
}
