//! Association likelihoods between a track and a paired detection.
//!
//! Two models are used, neither of which predicts motion:
//!
//! * overlap: the track's newest box and the detection's oldest box are compared
//!   by 2D IOU, and `1 − IOU` is scored as a zero-mean Gaussian residual;
//! * projection: when overlap is too small, the four centers (track begin
//!   A, track end B, detection begin C, detection end D) are projected on
//!   the axis A→D. The along-axis overlap `(B′ − C′) / |AD|` must agree
//!   with the time overlap `(t_B − t_C) / (t_D − t_A)`, and the larger of
//!   the lateral offsets of B and C must be small. Both overlaps turn
//!   negative when the pairs are separated by a gap.
//!
//! All scores carry the log detection probability so that they are
//! comparable with the miss, birth and false-alarm terms of the cost matrix.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::PairedDetection;
use crate::geometry::{iou2d, project_onto_axis, GeometryError, OrientedBox2D, PointTag};
use crate::tracker::Track;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LikelihoodError {
    #[error("axis between the oldest and newest box is shorter than {min} m ({length} m)")]
    DegenerateAxis { length: f64, min: f64 },
    #[error("time span between the oldest and newest box is not positive ({span})")]
    DegenerateSpan { span: f64 },
    #[error("invalid likelihood parameter: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LikelihoodParams {
    /// IOU at or above which the overlap model applies.
    pub lambda0: f64,
    pub sigma_lambda: f64,
    pub sigma_t: f64,
    /// Lateral deviation spread, meters.
    pub sigma_l: f64,
    /// `ln(1 − P_D)`.
    pub log_miss: f64,
    pub log_birth: f64,
    pub log_false: f64,
    /// Shortest A→D baseline (m) for the projection model.
    pub min_axis_length: f64,
    /// Factor applied to the birth likelihood of detections carrying a
    /// birth marker. `1.0` leaves births untouched.
    pub birth_flag_multiplier: f64,
}

impl Default for LikelihoodParams {
    fn default() -> Self {
        Self {
            lambda0: 0.6,
            sigma_lambda: 0.2,
            sigma_t: 0.2,
            sigma_l: 0.4,
            log_miss: (0.1f64).ln(),
            log_birth: (0.02f64).ln(),
            log_false: (0.004f64).ln(),
            min_axis_length: 0.5,
            birth_flag_multiplier: 1.0,
        }
    }
}

impl LikelihoodParams {
    pub fn validate(&self) -> Result<(), LikelihoodError> {
        let bad = LikelihoodError::InvalidParams;
        if !(self.lambda0 > 0.0 && self.lambda0 < 1.0) {
            return Err(bad("lambda0 must lie in (0, 1)"));
        }
        for s in [self.sigma_lambda, self.sigma_t, self.sigma_l] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(bad("sigmas must be positive and finite"));
            }
        }
        if !(self.log_miss < 0.0) {
            return Err(bad("log_miss must be negative (it is ln(1 - P_D))"));
        }
        if !(self.log_birth.is_finite() && self.log_false.is_finite()) {
            return Err(bad("log_birth and log_false must be finite"));
        }
        if !(self.min_axis_length > 0.0 && self.min_axis_length.is_finite()) {
            return Err(bad("min_axis_length must be positive"));
        }
        if !(self.birth_flag_multiplier > 0.0 && self.birth_flag_multiplier.is_finite()) {
            return Err(bad("birth_flag_multiplier must be positive"));
        }
        Ok(())
    }

    /// `ln P_D`, recovered from `log_miss`.
    pub fn log_detect(&self) -> f64 {
        (-self.log_miss.exp()).ln_1p()
    }

    /// Log-likelihood of leaving a detection unassociated, and whether it
    /// is better explained as a new object than as a false alarm.
    pub fn unassociated(&self, det: &PairedDetection) -> (f64, bool) {
        let mut birth = self.log_birth + det.confidence.max(f64::MIN_POSITIVE).ln();
        if det.birth_flag {
            birth += self.birth_flag_multiplier.ln();
        }
        if birth >= self.log_false {
            (birth, true)
        } else {
            (self.log_false, false)
        }
    }
}

/// Natural log of the zero-mean normal density at `x`.
pub fn log_normal(x: f64, sigma: f64) -> f64 {
    -0.5 * (x / sigma).powi(2) - sigma.ln() - 0.5 * (2.0 * PI).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LikelihoodModel {
    StaticIOU,
    MovingProjection,
    Incompatible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreDiagnostics {
    pub lambda: f64,
    pub lambda_t: Option<f64>,
    pub lateral_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationScore {
    pub log_likelihood: f64,
    pub model_used: LikelihoodModel,
    pub diagnostics: Option<ScoreDiagnostics>,
}

impl AssociationScore {
    pub fn incompatible() -> Self {
        Self {
            log_likelihood: f64::NEG_INFINITY,
            model_used: LikelihoodModel::Incompatible,
            diagnostics: None,
        }
    }
}

/// A box stamped with a global time in frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedBox {
    pub bbox: OrientedBox2D,
    pub time: f64,
}

/// Older and newer box of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPair {
    pub begin: TimedBox,
    pub end: TimedBox,
}

fn overlap_score(lambda: f64, params: &LikelihoodParams) -> AssociationScore {
    AssociationScore {
        log_likelihood: params.log_detect() + log_normal(1.0 - lambda, params.sigma_lambda),
        model_used: LikelihoodModel::StaticIOU,
        diagnostics: Some(ScoreDiagnostics {
            lambda,
            lambda_t: None,
            lateral_max: None,
        }),
    }
}

/// Overlap model. Returns `None` when the IOU is below `lambda0`.
pub fn score_static(
    track_box: &OrientedBox2D,
    det_box: &OrientedBox2D,
    params: &LikelihoodParams,
) -> Option<AssociationScore> {
    let lambda = iou2d(track_box, det_box);
    (lambda >= params.lambda0).then(|| overlap_score(lambda, params))
}

/// Projection model over the track pair (A, B) and detection pair (C, D).
pub fn score_moving(
    track_pair: &TimedPair,
    det_pair: &TimedPair,
    params: &LikelihoodParams,
) -> Result<AssociationScore, LikelihoodError> {
    let (a, b) = (track_pair.begin, track_pair.end);
    let (c, d) = (det_pair.begin, det_pair.end);
    let span = d.time - a.time;
    if !(span > 0.0) {
        return Err(LikelihoodError::DegenerateSpan { span });
    }
    let axis_len = a.bbox.center().distance(d.bbox.center());
    if axis_len < params.min_axis_length {
        return Err(LikelihoodError::DegenerateAxis {
            length: axis_len,
            min: params.min_axis_length,
        });
    }
    let proj = project_onto_axis(
        &[(b.bbox.center(), PointTag::B), (c.bbox.center(), PointTag::C)],
        a.bbox.center(),
        d.bbox.center(),
    )
    .map_err(|e| match e {
        GeometryError::DegenerateAxis { distance } => LikelihoodError::DegenerateAxis {
            length: distance,
            min: params.min_axis_length,
        },
        _ => unreachable!("projection only fails on a degenerate axis"),
    })?;
    let pb = proj.projected_points[0];
    let pc = proj.projected_points[1];
    // signed overlaps: a gap between the two pairs counts as negative
    let lambda = (pb.along - pc.along) / axis_len;
    let lambda_t = (b.time - c.time) / span;
    let lateral_max = pb.lateral.max(pc.lateral);
    Ok(AssociationScore {
        log_likelihood: params.log_detect()
            + log_normal(lambda - lambda_t, params.sigma_t)
            + log_normal(lateral_max, params.sigma_l),
        model_used: LikelihoodModel::MovingProjection,
        diagnostics: Some(ScoreDiagnostics {
            lambda,
            lambda_t: Some(lambda_t),
            lateral_max: Some(lateral_max),
        }),
    })
}

/// Track pair from the most recent stored detection, in global frame time.
pub fn track_pair(track: &Track) -> TimedPair {
    let latest = track.latest();
    TimedPair {
        begin: TimedBox {
            bbox: latest.detection.box_begin,
            time: latest.begin_time() as f64,
        },
        end: TimedBox {
            bbox: latest.detection.box_end,
            time: latest.end_time() as f64,
        },
    }
}

/// Detection pair re-indexed from buffer-relative sweeps to frame time.
pub fn detection_pair(det: &PairedDetection, frame_index: i64) -> TimedPair {
    TimedPair {
        begin: TimedBox {
            bbox: det.box_begin,
            time: (frame_index + det.t_b as i64) as f64,
        },
        end: TimedBox {
            bbox: det.box_end,
            time: (frame_index + det.t_e as i64) as f64,
        },
    }
}

/// Boxes compared by the overlap model: the track's newest box and the
/// detection's oldest box, which sit closest in time once the buffer has
/// advanced by one frame.
pub fn overlap_boxes(track: &TimedPair, det: &TimedPair) -> (OrientedBox2D, OrientedBox2D) {
    (track.end.bbox, det.begin.bbox)
}

/// Full association score of `det` (observed at `frame_index`) against `track`.
pub fn score_pair(
    track: &Track,
    det: &PairedDetection,
    frame_index: i64,
    params: &LikelihoodParams,
) -> AssociationScore {
    if track.class_label != det.class_label {
        return AssociationScore::incompatible();
    }
    let tp = track_pair(track);
    let dp = detection_pair(det, frame_index);
    let (track_box, det_box) = overlap_boxes(&tp, &dp);
    let lambda = iou2d(&track_box, &det_box);
    if lambda >= params.lambda0 {
        return overlap_score(lambda, params);
    }
    match score_moving(&tp, &dp, params) {
        Ok(score) => score,
        Err(_) => overlap_score(lambda, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::ClassLabel;
    use crate::geometry::Point2;

    fn bx(x: f64, y: f64) -> OrientedBox2D {
        OrientedBox2D::new(x, y, 4.0, 2.0, 0.0).unwrap()
    }

    fn timed(x: f64, y: f64, t: f64) -> TimedBox {
        TimedBox {
            bbox: bx(x, y),
            time: t,
        }
    }

    fn det(begin: OrientedBox2D, end: OrientedBox2D, class_label: ClassLabel) -> PairedDetection {
        PairedDetection {
            id: 0,
            class_label,
            box_end: end,
            box_begin: begin,
            shared_height: 1.5,
            shared_z: 0.75,
            t_b: -5,
            t_e: 0,
            birth_flag: false,
            death_flag: false,
            confidence: 0.9,
        }
    }

    #[test]
    fn gaussian_log_density_matches_formula() {
        // N(0.2; 0, 0.04) = exp(-0.5) / (0.2 √(2π))
        let direct = ((-0.5f64).exp() / (0.2 * (2.0 * PI).sqrt())).ln();
        assert!((log_normal(0.2, 0.2) - direct).abs() < 1e-12);
    }

    #[test]
    fn identical_boxes_give_maximal_overlap_score() {
        let p = LikelihoodParams::default();
        let s = score_static(&bx(0.0, 0.0), &bx(0.0, 0.0), &p).unwrap();
        assert_eq!(s.model_used, LikelihoodModel::StaticIOU);
        let expected = p.log_detect() + log_normal(0.0, p.sigma_lambda);
        assert!((s.log_likelihood - expected).abs() < 1e-12);
        let shifted = score_static(&bx(0.0, 0.0), &bx(0.5, 0.0), &p).unwrap();
        assert!(shifted.log_likelihood < s.log_likelihood);
    }

    #[test]
    fn threshold_is_inclusive() {
        // 1×1 squares offset by 0.5 have IOU exactly 1/3
        let a = OrientedBox2D::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        let b = OrientedBox2D::new(0.5, 0.0, 1.0, 1.0, 0.0).unwrap();
        let lambda = iou2d(&a, &b);
        let p = LikelihoodParams {
            lambda0: lambda,
            ..Default::default()
        };
        assert!(score_static(&a, &b, &p).is_some());
        let p = LikelihoodParams {
            lambda0: lambda + 1e-9,
            ..Default::default()
        };
        assert!(score_static(&a, &b, &p).is_none());
    }

    #[test]
    fn static_residual_at_point_eight() {
        // boxes 4×1, offset 4/9 along x → intersection 32/9, union 40/9, IOU 0.8
        let a = OrientedBox2D::new(0.0, 0.0, 4.0, 1.0, 0.0).unwrap();
        let b = OrientedBox2D::new(4.0 / 9.0, 0.0, 4.0, 1.0, 0.0).unwrap();
        let p = LikelihoodParams {
            sigma_lambda: 0.2,
            ..Default::default()
        };
        let s = score_static(&a, &b, &p).unwrap();
        assert!((s.diagnostics.unwrap().lambda - 0.8).abs() < 1e-12);
        let density = (-0.5f64 * (0.2f64 / 0.2).powi(2)).exp() / (0.2 * (2.0 * PI).sqrt());
        assert!((s.log_likelihood - p.log_detect() - density.ln()).abs() < 1e-9);
    }

    #[test]
    fn constant_velocity_has_zero_residuals() {
        let p = LikelihoodParams::default();
        // 1 m per frame along a 30° heading
        let dir = Point2::new(30f64.to_radians().cos(), 30f64.to_radians().sin());
        let at = |t: f64| {
            let c = dir * t;
            TimedBox {
                bbox: bx(c.x, c.y),
                time: t,
            }
        };
        let tp = TimedPair {
            begin: at(-5.0),
            end: at(0.0),
        };
        let dp = TimedPair {
            begin: at(-4.0),
            end: at(1.0),
        };
        let s = score_moving(&tp, &dp, &p).unwrap();
        let d = s.diagnostics.unwrap();
        assert!((d.lambda - d.lambda_t.unwrap()).abs() < 1e-12);
        assert!((d.lambda_t.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(d.lateral_max.unwrap() < 1e-12);
    }

    #[test]
    fn gap_between_pairs_is_negative_overlap() {
        let p = LikelihoodParams::default();
        // track (0,0)→(1,0) over t −5..0, detection (30,0)→(31,0) over −4..1
        let tp = TimedPair {
            begin: timed(0.0, 0.0, -5.0),
            end: timed(1.0, 0.0, 0.0),
        };
        let dp = TimedPair {
            begin: timed(30.0, 0.0, -4.0),
            end: timed(31.0, 0.0, 1.0),
        };
        let d = score_moving(&tp, &dp, &p).unwrap().diagnostics.unwrap();
        assert!((d.lambda - (1.0 - 30.0) / 31.0).abs() < 1e-12);
        assert!((d.lambda_t.unwrap() - 4.0 / 6.0).abs() < 1e-15);

        // consistent motion with a time gap still has zero residual
        let dp = TimedPair {
            begin: timed(3.0, 0.0, 2.0),
            end: timed(4.0, 0.0, 3.0),
        };
        let tp = TimedPair {
            begin: timed(-2.0, 0.0, -3.0),
            end: timed(1.0, 0.0, 0.0),
        };
        let d = score_moving(&tp, &dp, &p).unwrap().diagnostics.unwrap();
        assert!((d.lambda_t.unwrap() + 2.0 / 6.0).abs() < 1e-15);
        assert!((d.lambda - d.lambda_t.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn turn_produces_lateral_deviation() {
        // Track goes east A(0,0)→B(4,0); detection turns north C(4,1)→D(4,6).
        // Axis A→D has direction (4,6)/√52; lateral of B = |4·6 − 0·4|/√52,
        // lateral of C = |4·6 − 1·4|/√52.
        let p = LikelihoodParams::default();
        let tp = TimedPair {
            begin: timed(0.0, 0.0, -5.0),
            end: timed(4.0, 0.0, 0.0),
        };
        let dp = TimedPair {
            begin: timed(4.0, 1.0, -4.0),
            end: timed(4.0, 6.0, 1.0),
        };
        let s = score_moving(&tp, &dp, &p).unwrap();
        let norm = 52f64.sqrt();
        let lat_b = 24.0 / norm;
        let lat_c = 20.0 / norm;
        let d = s.diagnostics.unwrap();
        assert!((d.lateral_max.unwrap() - lat_b.max(lat_c)).abs() < 1e-12);

        let straight = TimedPair {
            begin: timed(4.0 * 1.0 / 5.0 * 1.0, 0.0, -4.0),
            end: timed(4.0 * 6.0 / 5.0, 0.0, 1.0),
        };
        let s_straight = score_moving(&tp, &straight, &p).unwrap();
        assert!(s.log_likelihood < s_straight.log_likelihood);
    }

    #[test]
    fn short_axis_is_degenerate() {
        let p = LikelihoodParams::default();
        let tp = TimedPair {
            begin: timed(0.0, 0.0, -5.0),
            end: timed(0.05, 0.0, 0.0),
        };
        let dp = TimedPair {
            begin: timed(0.0, 0.0, -4.0),
            end: timed(0.1, 0.0, 1.0),
        };
        assert!(matches!(
            score_moving(&tp, &dp, &p),
            Err(LikelihoodError::DegenerateAxis { .. })
        ));
    }

    #[test]
    fn dispatch_by_overlap_and_class() {
        let p = LikelihoodParams::default();
        let parked = Track::new(1, 0, det(bx(0.0, 0.0), bx(0.0, 0.0), ClassLabel::Vehicle), 6);
        let s = score_pair(&parked, &det(bx(0.05, 0.0), bx(0.05, 0.0), ClassLabel::Vehicle), 1, &p);
        assert_eq!(s.model_used, LikelihoodModel::StaticIOU);

        // 20 m/s at 10 Hz: 2 m per frame, consecutive end boxes 2 m apart on a
        // 4 m box overlap with IOU 1/3; use 3 m per frame instead
        let mover = Track::new(2, 0, det(bx(-15.0, 0.0), bx(0.0, 0.0), ClassLabel::Vehicle), 6);
        let s = score_pair(&mover, &det(bx(-12.0, 0.0), bx(3.0, 0.0), ClassLabel::Vehicle), 1, &p);
        assert_eq!(s.model_used, LikelihoodModel::MovingProjection);

        let s = score_pair(&parked, &det(bx(0.0, 0.0), bx(0.0, 0.0), ClassLabel::Pedestrian), 1, &p);
        assert_eq!(s.model_used, LikelihoodModel::Incompatible);
        assert_eq!(s.log_likelihood, f64::NEG_INFINITY);
    }

    #[test]
    fn overlap_uses_track_end_and_detection_begin() {
        let tp = TimedPair {
            begin: timed(0.0, 0.0, -6.0),
            end: timed(1.0, 0.0, -1.0),
        };
        let dp = TimedPair {
            begin: timed(2.0, 0.0, -5.0),
            end: timed(3.0, 0.0, 0.0),
        };
        let (t, d) = overlap_boxes(&tp, &dp);
        assert_eq!((t.cx, d.cx), (1.0, 2.0));
    }

    #[test]
    fn params_validation() {
        assert!(LikelihoodParams::default().validate().is_ok());
        let p = LikelihoodParams {
            lambda0: 1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = LikelihoodParams {
            sigma_t: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
