use crate::geometry::{normalize_angle, OrientedBox2D, Point2};

use super::{Motion, ObjectSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub center: Point2,
    pub heading: f64,
}

impl ObjectSpec {
    /// Pose at global frame time `frame` (frame 0 is the initial pose).
    pub fn pose_at(&self, frame: i64, frame_rate: f64) -> Pose {
        let t = frame as f64 / frame_rate;
        let start = Point2::new(self.x, self.y);
        match self.motion {
            Motion::Static => Pose {
                center: start,
                heading: self.heading,
            },
            Motion::ConstVelocity { speed, heading } => Pose {
                center: start + Point2::new(heading.cos(), heading.sin()) * (speed * t),
                heading: self.heading,
            },
            Motion::ConstTurn { speed, yaw_rate } => {
                let h0 = self.heading;
                if yaw_rate.abs() < 1e-12 {
                    return Pose {
                        center: start + Point2::new(h0.cos(), h0.sin()) * (speed * t),
                        heading: h0,
                    };
                }
                let h = h0 + yaw_rate * t;
                let r = speed / yaw_rate;
                Pose {
                    center: start + Point2::new(r * (h.sin() - h0.sin()), -r * (h.cos() - h0.cos())),
                    heading: normalize_angle(h),
                }
            }
        }
    }

    pub fn box_at(&self, frame: i64, frame_rate: f64) -> OrientedBox2D {
        let p = self.pose_at(frame, frame_rate);
        OrientedBox2D {
            cx: p.center.x,
            cy: p.center.y,
            length: self.length,
            width: self.width,
            heading: p.heading,
        }
    }
}
