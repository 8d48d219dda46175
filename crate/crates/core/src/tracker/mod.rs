//! Frame-by-frame tracking of paired detections.
//!
//! [`Tracker`] keeps a bounded set of weighted global hypotheses. With a
//! budget of one it commits to the single best assignment every frame,
//! which is what [`GreedyTracker`] does with its own solver and decoding.

mod greedy;
mod hypothesis;
mod pedigree;
mod track;

pub use greedy::GreedyTracker;
pub use hypothesis::{Hypothesis, StepOutput, Tracker};
pub use pedigree::{Pedigree, PedigreeNode};
pub use track::{Lifecycle, StoredDetection, Track, TrackSnapshot, TrackStatus};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::{DetectionError, Frame, OLDEST_SWEEP};
use crate::likelihood::{LikelihoodError, LikelihoodParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackerError {
    #[error("frame {got} arrived after frame {previous}; frame indices must strictly increase")]
    OutOfOrderFrame { previous: i64, got: i64 },
    #[error("invalid frame: {0}")]
    InvalidFrame(#[from] DetectionError),
    #[error("invalid tracker config: {0}")]
    InvalidConfig(String),
}

impl From<LikelihoodError> for TrackerError {
    fn from(e: LikelihoodError) -> Self {
        TrackerError::InvalidConfig(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerConfig {
    pub hypothesis_budget: usize,
    pub kbest_per_parent: usize,
    pub confirm_hits: u32,
    pub max_miss: u32,
    pub history_capacity: usize,
    pub likelihood: LikelihoodParams,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            hypothesis_budget: 8,
            kbest_per_parent: 4,
            confirm_hits: 2,
            max_miss: 3,
            history_capacity: 6,
            likelihood: LikelihoodParams::default(),
        }
    }
}

impl TrackerConfig {
    pub fn greedy() -> Self {
        Self {
            hypothesis_budget: 1,
            kbest_per_parent: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), TrackerError> {
        let bad = |m: &str| Err(TrackerError::InvalidConfig(m.to_string()));
        if self.hypothesis_budget == 0 || self.kbest_per_parent == 0 {
            return bad("hypothesis_budget and kbest_per_parent must be at least 1");
        }
        if self.confirm_hits == 0 || self.max_miss == 0 {
            return bad("confirm_hits and max_miss must be at least 1");
        }
        if self.history_capacity < 2 {
            return bad("history_capacity must be at least 2");
        }
        self.likelihood.validate()?;
        Ok(())
    }

    pub fn lifecycle(&self) -> Lifecycle {
        Lifecycle {
            confirm_hits: self.confirm_hits,
            max_miss: self.max_miss,
        }
    }
}

/// Per-frame notes about the best hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub frame_index: i64,
    pub track_id: u64,
    pub note: DiagnosticKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// A new track whose detection already spans the whole buffer without a
    /// birth marker: the object most likely left an occlusion.
    LikelyOcclusionEmergence,
}

pub(crate) fn birth_diagnostic(frame: &Frame, det_index: usize, track_id: u64) -> Option<Diagnostic> {
    let d = &frame.detections[det_index];
    (!d.birth_flag && d.t_b == OLDEST_SWEEP).then_some(Diagnostic {
        frame_index: frame.frame_index,
        track_id,
        note: DiagnosticKind::LikelyOcclusionEmergence,
    })
}

/// Runs `frames` through a fresh tracker and concatenates the snapshots.
pub fn run_sequence<'a, I>(frames: I, config: &TrackerConfig) -> Result<Vec<TrackSnapshot>, TrackerError>
where
    I: IntoIterator<Item = &'a Frame>,
{
    let mut tracker = Tracker::new(*config)?;
    let mut log = Vec::new();
    for frame in frames {
        log.extend(tracker.step(frame)?.snapshots);
    }
    Ok(log)
}

/// Same as [`run_sequence`] with the independent greedy implementation.
pub fn run_greedy<'a, I>(frames: I, config: &TrackerConfig) -> Result<Vec<TrackSnapshot>, TrackerError>
where
    I: IntoIterator<Item = &'a Frame>,
{
    let mut tracker = GreedyTracker::new(*config)?;
    let mut log = Vec::new();
    for frame in frames {
        log.extend(tracker.step(frame)?);
    }
    Ok(log)
}
