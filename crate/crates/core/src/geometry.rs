//! Oriented 2D box geometry.
//!
//! Boxes live in the bird's-eye-view plane. Overlap is computed exactly by
//! clipping one convex quadrilateral against the other and measuring the
//! resulting polygon with the shoelace formula. The axis-projection helpers
//! support the one-dimensional overlap model used for fast movers.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Intersections whose area falls below this value (m²) count as empty.
pub const AREA_EPSILON: f64 = 1e-12;

/// Minimum separation between the two points defining a projection axis.
pub const AXIS_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("box extent must be positive and finite (length {length}, width {width})")]
    InvalidExtent { length: f64, width: f64 },
    #[error("box pose must be finite")]
    NonFinitePose,
    #[error("projection axis is degenerate: endpoints are {distance} m apart")]
    DegenerateAxis { distance: f64 },
    #[error("segment bounds are inverted ({lo} > {hi})")]
    InvertedSegment { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Maps an angle onto `(-π, π]`; `-π` itself maps to `+π`.
pub fn normalize_angle(angle: f64) -> f64 {
    if !angle.is_finite() {
        return angle;
    }
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Rectangle in the ground plane: center, extent along its own axes, and
/// heading of the length axis measured counter-clockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedBox2D {
    pub cx: f64,
    pub cy: f64,
    pub length: f64,
    pub width: f64,
    pub heading: f64,
}

impl OrientedBox2D {
    pub fn new(cx: f64, cy: f64, length: f64, width: f64, heading: f64) -> Result<Self, GeometryError> {
        let b = Self {
            cx,
            cy,
            length,
            width,
            heading: normalize_angle(heading),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.length > 0.0 && self.width > 0.0) || !self.length.is_finite() || !self.width.is_finite() {
            return Err(GeometryError::InvalidExtent {
                length: self.length,
                width: self.width,
            });
        }
        if !(self.cx.is_finite() && self.cy.is_finite() && self.heading.is_finite()) {
            return Err(GeometryError::NonFinitePose);
        }
        Ok(())
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// Same extent, new pose.
    pub fn with_pose(&self, center: Point2, heading: f64) -> Self {
        Self {
            cx: center.x,
            cy: center.y,
            heading: normalize_angle(heading),
            ..*self
        }
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point2; 4] {
        let (s, c) = self.heading.sin_cos();
        let hl = self.length / 2.0;
        let hw = self.width / 2.0;
        let ax = Point2::new(c * hl, s * hl);
        let ay = Point2::new(-s * hw, c * hw);
        let o = self.center();
        [o + ax + ay * -1.0, o + ax + ay, o - ax + ay, o - ax - ay]
    }

    /// Whether `p` lies inside or on the boundary.
    pub fn contains(&self, p: Point2) -> bool {
        let local = (p - self.center()).rotate(-self.heading);
        local.x.abs() <= self.length / 2.0 && local.y.abs() <= self.width / 2.0
    }

    /// Applies a rigid motion: rotate by `angle` about the origin, then translate.
    pub fn transformed(&self, angle: f64, translation: Point2) -> Self {
        let c = self.center().rotate(angle) + translation;
        self.with_pose(c, self.heading + angle)
    }
}

/// Shoelace area of a simple polygon; positive for counter-clockwise order.
pub fn polygon_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        acc += p.cross(q);
    }
    acc / 2.0
}

/// Sutherland–Hodgman clip of `subject` against a convex counter-clockwise `clip` polygon.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut output: Vec<Point2> = subject.to_vec();
    for (i, &edge_start) in clip.iter().enumerate() {
        if output.is_empty() {
            break;
        }
        let edge_end = clip[(i + 1) % clip.len()];
        let edge = edge_end - edge_start;
        let side = |p: Point2| edge.cross(p - edge_start);
        let input = std::mem::take(&mut output);
        for (k, &cur) in input.iter().enumerate() {
            let prev = input[(k + input.len() - 1) % input.len()];
            let s_cur = side(cur);
            let s_prev = side(prev);
            if s_cur >= 0.0 {
                if s_prev < 0.0 {
                    output.push(intersect(prev, cur, s_prev, s_cur));
                }
                output.push(cur);
            } else if s_prev >= 0.0 {
                output.push(intersect(prev, cur, s_prev, s_cur));
            }
        }
    }
    output
}

fn intersect(p: Point2, q: Point2, sp: f64, sq: f64) -> Point2 {
    let t = sp / (sp - sq);
    p + (q - p) * t
}

/// Area of the overlap between two oriented boxes.
pub fn intersection_area(a: &OrientedBox2D, b: &OrientedBox2D) -> f64 {
    // cheap reject on circumscribed circles
    let ra = a.length.hypot(a.width) / 2.0;
    let rb = b.length.hypot(b.width) / 2.0;
    if a.center().distance(b.center()) > ra + rb {
        return 0.0;
    }
    let poly = clip_convex(&a.corners(), &b.corners());
    let area = polygon_area(&poly);
    if area < AREA_EPSILON {
        0.0
    } else {
        area
    }
}

/// Intersection over union of two oriented boxes, in `[0, 1]`.
pub fn iou2d(a: &OrientedBox2D, b: &OrientedBox2D) -> f64 {
    let inter = intersection_area(a, b);
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment1D {
    pub lo: f64,
    pub hi: f64,
}

impl Segment1D {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        if lo > hi {
            return Err(GeometryError::InvertedSegment { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Segment spanning two points in either order.
    pub fn spanning(a: f64, b: f64) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// Overlap of two segments divided by their outer hull span.
///
/// Disjoint segments score 0; two point segments (zero hull) also score 0.
pub fn segment_iou(a: Segment1D, b: Segment1D) -> f64 {
    let hull = a.hi.max(b.hi) - a.lo.min(b.lo);
    if hull <= 0.0 {
        return 0.0;
    }
    let inter = (a.hi.min(b.hi) - a.lo.max(b.lo)).max(0.0);
    (inter / hull).clamp(0.0, 1.0)
}

/// Labels for the four reference points of the moving-object model: the
/// track's older and newer box (A, B) and the detection's older and newer box (C, D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointTag {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    /// Signed coordinate along the axis, measured from the axis origin.
    pub along: f64,
    /// Perpendicular distance to the axis line.
    pub lateral: f64,
    pub tag: PointTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisProjection {
    pub axis_origin: Point2,
    pub axis_dir: Point2,
    pub projected_points: Vec<ProjectedPoint>,
}

impl AxisProjection {
    pub fn get(&self, tag: PointTag) -> Option<&ProjectedPoint> {
        self.projected_points.iter().find(|p| p.tag == tag)
    }
}

/// Projects tagged points onto the line from `origin` through `through`.
pub fn project_onto_axis(
    points: &[(Point2, PointTag)],
    origin: Point2,
    through: Point2,
) -> Result<AxisProjection, GeometryError> {
    let delta = through - origin;
    let distance = delta.norm();
    if !(distance > AXIS_EPSILON) {
        return Err(GeometryError::DegenerateAxis { distance });
    }
    let dir = delta * (1.0 / distance);
    let projected_points = points
        .iter()
        .map(|&(p, tag)| {
            let rel = p - origin;
            ProjectedPoint {
                along: rel.dot(dir),
                lateral: rel.cross(dir).abs(),
                tag,
            }
        })
        .collect();
    Ok(AxisProjection {
        axis_origin: origin,
        axis_dir: dir,
        projected_points,
    })
}
