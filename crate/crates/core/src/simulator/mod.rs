//! Deterministic scenario engine producing paired detections, ground truth
//! and synthetic multi-sweep point clouds.

mod engine;
mod motion;
mod points;

pub use engine::{simulate, SimOutput};
pub use motion::Pose;
pub use points::synthesize_points;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::{ClassLabel, OLDEST_SWEEP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulatorError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Motion {
    Static,
    /// Straight line at `speed` (m/s) along `heading` (rad).
    ConstVelocity {
        speed: f64,
        heading: f64,
    },
    /// Constant speed (m/s) and yaw rate (rad/s) starting from the object's
    /// initial heading; the box turns with the path.
    ConstTurn {
        speed: f64,
        yaw_rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    #[serde(rename = "class")]
    pub class_label: ClassLabel,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub heading: f64,
    pub motion: Motion,
    /// First frame of existence; the default predates the first buffer.
    #[serde(default = "default_birth")]
    pub birth_frame: i64,
    /// First frame after existence; `None` lives to the end.
    #[serde(default)]
    pub death_frame: Option<i64>,
    /// Half-open `[start, end)` frame intervals without any return.
    #[serde(default)]
    pub occlusions: Vec<[i64; 2]>,
}

fn default_birth() -> i64 {
    OLDEST_SWEEP as i64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorModel {
    pub detection_probability: f64,
    /// Center noise, meters, per axis.
    pub center_sigma: f64,
    /// Heading noise, radians.
    pub heading_sigma: f64,
    /// Mean clutter detections per frame.
    pub clutter_rate: f64,
    /// Clutter area `[x_min, y_min, x_max, y_max]`.
    #[serde(default = "default_region")]
    pub clutter_region: [f64; 4],
}

fn default_region() -> [f64; 4] {
    [-50.0, -50.0, 50.0, 50.0]
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            detection_probability: 1.0,
            center_sigma: 0.0,
            heading_sigma: 0.0,
            clutter_rate: 0.0,
            clutter_region: default_region(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointModel {
    /// Points per visible object per sweep.
    pub points_per_object: usize,
    /// Background points per sweep.
    pub background_points: usize,
    /// Background area `[x_min, y_min, x_max, y_max]`.
    pub region: [f64; 4],
}

impl Default for PointModel {
    fn default() -> Self {
        Self {
            points_per_object: 100,
            background_points: 50,
            region: [-40.0, -40.0, 40.0, 40.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub name: String,
    pub duration_frames: i64,
    #[serde(default = "default_rate")]
    pub frame_rate: f64,
    pub seed: u64,
    #[serde(default)]
    pub sensor: SensorModel,
    #[serde(default)]
    pub points: PointModel,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
}

fn default_rate() -> f64 {
    10.0
}

impl ScenarioSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, SimulatorError> {
        let spec: Self = toml::from_str(text).map_err(|e| SimulatorError::InvalidSpec(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SimulatorError> {
        let bad = |m: String| Err(SimulatorError::InvalidSpec(m));
        if self.duration_frames < 0 {
            return bad("duration_frames must not be negative".into());
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return bad("frame_rate must be positive".into());
        }
        let s = &self.sensor;
        if !(0.0..=1.0).contains(&s.detection_probability) {
            return bad("detection_probability must lie in [0, 1]".into());
        }
        for (name, v) in [
            ("center_sigma", s.center_sigma),
            ("heading_sigma", s.heading_sigma),
            ("clutter_rate", s.clutter_rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        for (name, r) in [
            ("clutter_region", s.clutter_region),
            ("points.region", self.points.region),
        ] {
            if !(r.iter().all(|v| v.is_finite()) && r[0] < r[2] && r[1] < r[3]) {
                return bad(format!("{name} must be [x_min, y_min, x_max, y_max] with min < max"));
            }
        }
        let mut ids: Vec<&str> = self.objects.iter().map(|o| o.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("duplicate object id {:?}", w[0]));
        }
        for o in &self.objects {
            let fail = |m: &str| bad(format!("object {:?}: {m}", o.id));
            if o.id.is_empty() {
                return fail("id must not be empty");
            }
            if !(o.length > 0.0 && o.width > 0.0 && o.height > 0.0)
                || !(o.length.is_finite() && o.width.is_finite() && o.height.is_finite())
            {
                return fail("extent must be positive and finite");
            }
            if !(o.x.is_finite() && o.y.is_finite() && o.heading.is_finite()) {
                return fail("initial pose must be finite");
            }
            let motion_ok = match o.motion {
                Motion::Static => true,
                Motion::ConstVelocity { speed, heading } => speed.is_finite() && heading.is_finite(),
                Motion::ConstTurn { speed, yaw_rate } => speed.is_finite() && yaw_rate.is_finite(),
            };
            if !motion_ok {
                return fail("motion parameters must be finite");
            }
            let death = o.death_frame.unwrap_or(self.duration_frames);
            if o.birth_frame >= death {
                return fail("birth_frame must precede death_frame");
            }
            if o.death_frame.is_some_and(|d| d > self.duration_frames) {
                return fail("death_frame must not exceed duration_frames");
            }
            if o.occlusions.iter().any(|[a, b]| a >= b) {
                return fail("occlusion intervals must be non-empty [start, end)");
            }
        }
        Ok(())
    }
}

impl ObjectSpec {
    pub fn exists_at(&self, frame: i64) -> bool {
        frame >= self.birth_frame && self.death_frame.map_or(true, |d| frame < d)
    }

    pub fn visible_at(&self, frame: i64) -> bool {
        self.exists_at(frame) && !self.occlusions.iter().any(|[a, b]| (*a..*b).contains(&frame))
    }
}

/// Nominal vertical placement: boxes stand on the ground plane.
pub(crate) fn box_center_z(height: f64) -> f64 {
    height / 2.0
}
