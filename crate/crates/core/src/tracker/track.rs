use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::detection::{ClassLabel, PairedDetection};
use crate::geometry::{OrientedBox2D, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Dead,
}

/// Lifecycle thresholds shared by every tracker implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lifecycle {
    pub confirm_hits: u32,
    pub max_miss: u32,
}

/// A detection stored in a track, stamped with the frame that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredDetection {
    pub frame_index: i64,
    pub detection: PairedDetection,
}

impl StoredDetection {
    /// Global time (in frames) of the begin box.
    pub fn begin_time(&self) -> i64 {
        self.frame_index + self.detection.t_b as i64
    }

    /// Global time (in frames) of the end box.
    pub fn end_time(&self) -> i64 {
        self.frame_index + self.detection.t_e as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub track_id: u64,
    pub class_label: ClassLabel,
    history: VecDeque<StoredDetection>,
    capacity: usize,
    pub hit_count: u32,
    pub miss_streak: u32,
    pub status: TrackStatus,
}

impl Track {
    /// Starts a tentative track from its first detection.
    ///
    /// # Panics
    /// If `capacity < 2`.
    pub fn new(track_id: u64, frame_index: i64, detection: PairedDetection, capacity: usize) -> Self {
        assert!(capacity >= 2, "track history needs room for at least two detections");
        let mut history = VecDeque::with_capacity(capacity);
        let class_label = detection.class_label;
        history.push_back(StoredDetection { frame_index, detection });
        Self {
            track_id,
            class_label,
            history,
            capacity,
            hit_count: 1,
            miss_streak: 0,
            status: TrackStatus::Tentative,
        }
    }

    pub fn latest(&self) -> &StoredDetection {
        self.history.back().expect("live track has history")
    }

    pub fn history(&self) -> impl Iterator<Item = &StoredDetection> {
        self.history.iter()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_live(&self) -> bool {
        self.status != TrackStatus::Dead
    }

    /// Stores an associated detection; the oldest one is dropped when full.
    pub fn record_hit(&mut self, frame_index: i64, detection: PairedDetection, lifecycle: Lifecycle) {
        if self.history.len() == self.capacity {
            self.history.pop_front();
        }
        self.history.push_back(StoredDetection { frame_index, detection });
        self.hit_count += 1;
        self.miss_streak = 0;
        if self.status == TrackStatus::Tentative && self.hit_count >= lifecycle.confirm_hits {
            self.status = TrackStatus::Confirmed;
        }
    }

    /// Counts a frame without association. A stored death marker shortens
    /// the allowed streak to a single miss.
    pub fn record_miss(&mut self, lifecycle: Lifecycle) {
        self.miss_streak += 1;
        let limit = if self.latest().detection.death_flag {
            1
        } else {
            lifecycle.max_miss
        };
        if self.miss_streak >= limit {
            self.status = TrackStatus::Dead;
        }
    }

    /// Per-frame displacement implied by the latest pair.
    pub fn pair_velocity(&self) -> Point2 {
        let d = &self.latest().detection;
        let span = (d.t_e - d.t_b) as f64;
        if span > 0.0 {
            (d.box_end.center() - d.box_begin.center()) * (1.0 / span)
        } else {
            Point2::default()
        }
    }

    /// Output snapshot at `frame_index`; when the track was not updated at
    /// that frame both boxes are shifted along the latest pair's displacement.
    pub fn snapshot(&self, frame_index: i64) -> TrackSnapshot {
        let latest = self.latest();
        let d = &latest.detection;
        let lag = (frame_index - latest.frame_index) as f64;
        let shift = self.pair_velocity() * lag;
        let moved = |b: &OrientedBox2D| b.with_pose(b.center() + shift, b.heading);
        TrackSnapshot {
            frame_index,
            track_id: self.track_id,
            class_label: self.class_label,
            box_end: moved(&d.box_end),
            box_begin: moved(&d.box_begin),
            status: self.status,
        }
    }
}

/// One line of the track log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSnapshot {
    pub frame_index: i64,
    pub track_id: u64,
    #[serde(rename = "class")]
    pub class_label: ClassLabel,
    pub box_end: OrientedBox2D,
    pub box_begin: OrientedBox2D,
    pub status: TrackStatus,
}
