//! Paired detections, ground-truth slices and frames.
//!
//! A detection carries two boxes for the same object: one at the newest sweep
//! of the buffer and one at the oldest sweep where the object was seen. Sweep
//! indices are relative to the frame that produced the buffer, so `0` is the
//! current sweep and `-5` the oldest one in a six-sweep buffer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, OrientedBox2D, Point2};

/// Number of sweeps merged into one buffer.
pub const BUFFER_SWEEPS: usize = 6;
/// Index of the oldest sweep in the default buffer.
pub const OLDEST_SWEEP: i32 = -(BUFFER_SWEEPS as i32 - 1);
/// Index of the current sweep.
pub const NEWEST_SWEEP: i32 = 0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("detection {id}: {source}")]
    Geometry {
        id: u64,
        #[source]
        source: GeometryError,
    },
    #[error("detection {id}: begin sweep {t_b} is after end sweep {t_e}")]
    TimeOrder { id: u64, t_b: i32, t_e: i32 },
    #[error("detection {id}: sweep index {index} is outside the buffer")]
    SweepOutOfBuffer { id: u64, index: i32 },
    #[error("detection {id}: paired boxes must share length and width")]
    ExtentMismatch { id: u64 },
    #[error("detection {id}: singleton detection must have identical boxes")]
    SingletonMismatch { id: u64 },
    #[error("detection {id}: birth flag requires a begin sweep after the oldest sweep")]
    BirthFlag { id: u64 },
    #[error("detection {id}: death flag requires an end sweep before the current sweep")]
    DeathFlag { id: u64 },
    #[error("detection {id}: confidence {value} outside [0, 1]")]
    Confidence { id: u64, value: f64 },
    #[error("detection {id}: height and z must be finite and height positive")]
    Vertical { id: u64 },
    #[error("frame {frame}: duplicate detection id {id}")]
    DuplicateId { frame: i64, id: u64 },
    #[error("frame {frame}: timestamp is not finite")]
    Timestamp { frame: i64 },
    #[error("track {track}: {reason}")]
    GroundTruth { track: String, reason: String },
    #[error("track {track} is not present in the buffer")]
    NotInBuffer { track: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Vehicle,
    Pedestrian,
    Cyclist,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [ClassLabel::Vehicle, ClassLabel::Pedestrian, ClassLabel::Cyclist];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::Vehicle => "Vehicle",
            ClassLabel::Pedestrian => "Pedestrian",
            ClassLabel::Cyclist => "Cyclist",
        }
    }
}

/// Inclusive range of sweep indices making up one buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRange {
    pub oldest: i32,
    pub newest: i32,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            oldest: OLDEST_SWEEP,
            newest: NEWEST_SWEEP,
        }
    }
}

impl SweepRange {
    pub fn contains(&self, sweep: i32) -> bool {
        (self.oldest..=self.newest).contains(&sweep)
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.oldest..=self.newest
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeTargets {
    pub t_b: i32,
    pub t_e: i32,
    pub birth_flag: bool,
    pub death_flag: bool,
}

impl TimeTargets {
    pub fn is_singleton(&self) -> bool {
        self.t_b == self.t_e
    }

    /// Which of the five buffer-coverage cases these targets fall into.
    pub fn case(&self, buffer: SweepRange) -> BufferCase {
        match (
            self.is_singleton(),
            self.t_b == buffer.oldest,
            self.t_e == buffer.newest,
        ) {
            (false, true, true) => BufferCase::Full,
            (false, _, _) => BufferCase::Partial,
            (true, _, true) => BufferCase::NewestOnly,
            (true, true, _) => BufferCase::OldestOnly,
            (true, false, false) => BufferCase::Interior,
        }
    }
}

/// How a track covers the buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BufferCase {
    /// (a) present at every sweep.
    Full,
    /// (b) several sweeps, starting and/or ending inside the buffer.
    Partial,
    /// (c) a single sweep at the newest end: seen once, just born.
    NewestOnly,
    /// (d) a single sweep at the oldest end: seen once, then gone.
    OldestOnly,
    /// (e) a single sweep strictly inside the buffer.
    Interior,
}

impl BufferCase {
    pub const ALL: [BufferCase; 5] = [
        BufferCase::Full,
        BufferCase::Partial,
        BufferCase::NewestOnly,
        BufferCase::OldestOnly,
        BufferCase::Interior,
    ];

    pub fn letter(&self) -> char {
        match self {
            BufferCase::Full => 'a',
            BufferCase::Partial => 'b',
            BufferCase::NewestOnly => 'c',
            BufferCase::OldestOnly => 'd',
            BufferCase::Interior => 'e',
        }
    }
}

/// One detected object as a pair of boxes sharing extent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDetection {
    pub id: u64,
    pub class_label: ClassLabel,
    pub box_end: OrientedBox2D,
    pub box_begin: OrientedBox2D,
    pub shared_height: f64,
    pub shared_z: f64,
    pub t_b: i32,
    pub t_e: i32,
    pub birth_flag: bool,
    pub death_flag: bool,
    pub confidence: f64,
}

impl PairedDetection {
    pub fn time_targets(&self) -> TimeTargets {
        TimeTargets {
            t_b: self.t_b,
            t_e: self.t_e,
            birth_flag: self.birth_flag,
            death_flag: self.death_flag,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.t_b == self.t_e
    }

    pub fn validate(&self) -> Result<(), DetectionError> {
        let id = self.id;
        let geo = |source| DetectionError::Geometry { id, source };
        self.box_end.validate().map_err(geo)?;
        self.box_begin.validate().map_err(geo)?;
        let buffer = SweepRange::default();
        for index in [self.t_b, self.t_e] {
            if !buffer.contains(index) {
                return Err(DetectionError::SweepOutOfBuffer { id, index });
            }
        }
        if self.t_b > self.t_e {
            return Err(DetectionError::TimeOrder {
                id,
                t_b: self.t_b,
                t_e: self.t_e,
            });
        }
        if self.box_begin.length != self.box_end.length || self.box_begin.width != self.box_end.width {
            return Err(DetectionError::ExtentMismatch { id });
        }
        if self.is_singleton() && self.box_begin != self.box_end {
            return Err(DetectionError::SingletonMismatch { id });
        }
        if self.birth_flag && self.t_b <= buffer.oldest {
            return Err(DetectionError::BirthFlag { id });
        }
        if self.death_flag && self.t_e >= buffer.newest {
            return Err(DetectionError::DeathFlag { id });
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(DetectionError::Confidence {
                id,
                value: self.confidence,
            });
        }
        if !(self.shared_height.is_finite() && self.shared_height > 0.0 && self.shared_z.is_finite()) {
            return Err(DetectionError::Vertical { id });
        }
        Ok(())
    }
}

/// Midpoint between the centers of the two boxes of a pair.
pub fn pair_midpoint(d: &PairedDetection) -> Point2 {
    d.box_begin.center().midpoint(d.box_end.center())
}

/// Ground-truth state of one object at one sweep of the buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPresence {
    pub sweep: i32,
    #[serde(rename = "box")]
    pub bbox: OrientedBox2D,
    pub z: f64,
    pub height: f64,
}

/// Slice of one ground-truth track over a buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthTrack {
    pub track_id: String,
    pub class_label: ClassLabel,
    pub presence: Vec<SweepPresence>,
}

impl GroundTruthTrack {
    pub fn at(&self, sweep: i32) -> Option<&SweepPresence> {
        self.presence.iter().find(|p| p.sweep == sweep)
    }

    pub fn validate(&self) -> Result<(), DetectionError> {
        let fail = |reason: &str| DetectionError::GroundTruth {
            track: self.track_id.clone(),
            reason: reason.to_string(),
        };
        if self.presence.is_empty() {
            return Err(fail("no sweep present"));
        }
        let mut sweeps: Vec<i32> = self.presence.iter().map(|p| p.sweep).collect();
        sweeps.sort_unstable();
        if sweeps.windows(2).any(|w| w[0] == w[1]) {
            return Err(fail("duplicate sweep entry"));
        }
        if sweeps.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(fail("present sweeps are not contiguous"));
        }
        for p in &self.presence {
            p.bbox.validate().map_err(|e| fail(&e.to_string()))?;
            if !(p.z.is_finite() && p.height.is_finite() && p.height > 0.0) {
                return Err(fail("height and z must be finite and height positive"));
            }
        }
        Ok(())
    }
}

/// Begin/end sweep of a ground-truth track within a buffer, with the
/// birth and death markers set when either end falls strictly inside it.
pub fn derive_time_targets(track: &GroundTruthTrack, buffer: SweepRange) -> Result<TimeTargets, DetectionError> {
    let mut present = track.presence.iter().map(|p| p.sweep).filter(|s| buffer.contains(*s));
    let first = present.next().ok_or_else(|| DetectionError::NotInBuffer {
        track: track.track_id.clone(),
    })?;
    let (t_b, t_e) = present.fold((first, first), |(lo, hi), s| (lo.min(s), hi.max(s)));
    Ok(TimeTargets {
        t_b,
        t_e,
        birth_flag: t_b > buffer.oldest,
        death_flag: t_e < buffer.newest,
    })
}

/// One tracker input step: the detections produced from one buffer, plus
/// the ground-truth slices for that buffer when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub frame_index: i64,
    pub timestamp: f64,
    pub detections: Vec<PairedDetection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Vec<GroundTruthTrack>>,
}

impl Frame {
    pub fn validate(&self) -> Result<(), DetectionError> {
        if !self.timestamp.is_finite() {
            return Err(DetectionError::Timestamp {
                frame: self.frame_index,
            });
        }
        let mut ids: Vec<u64> = Vec::with_capacity(self.detections.len());
        for d in &self.detections {
            d.validate()?;
            ids.push(d.id);
        }
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(DetectionError::DuplicateId {
                frame: self.frame_index,
                id: w[0],
            });
        }
        for gt in self.ground_truth.iter().flatten() {
            gt.validate()?;
        }
        Ok(())
    }
}
