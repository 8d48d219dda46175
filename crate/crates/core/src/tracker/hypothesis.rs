use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::assignment::{build_cost_matrix, murty_kbest_on_rows, AssignmentSolution, HypothesisAssignment};
use crate::detection::Frame;

use super::pedigree::Pedigree;
use super::{birth_diagnostic, Diagnostic, Track, TrackSnapshot, TrackStatus, TrackerConfig, TrackerError};

/// One global explanation of all detections seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub tracks: Vec<Track>,
    /// Log-weight relative to the best hypothesis of the same generation.
    pub log_weight: f64,
    /// Sum of the log-likelihoods of every assignment on the path from the
    /// root, never normalized.
    pub cumulative_log_weight: f64,
    pub assignment_record: Option<AssignmentSolution>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepOutput {
    pub snapshots: Vec<TrackSnapshot>,
    pub diagnostics: Vec<Diagnostic>,
}

struct Child {
    parent: usize,
    log_weight: f64,
    solution: AssignmentSolution,
    decoded: HypothesisAssignment,
}

fn child_order(a: &Child, b: &Child) -> Ordering {
    b.log_weight
        .total_cmp(&a.log_weight)
        .then(a.parent.cmp(&b.parent))
        .then_with(|| a.solution.assignment.cmp(&b.solution.assignment))
}

pub struct Tracker {
    config: TrackerConfig,
    hypotheses: Vec<Hypothesis>,
    next_track_id: u64,
    next_hypothesis_id: u64,
    last_frame: Option<i64>,
    pedigree: Option<Pedigree>,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            config,
            hypotheses: vec![Hypothesis {
                id: 0,
                parent_id: None,
                tracks: Vec::new(),
                log_weight: 0.0,
                cumulative_log_weight: 0.0,
                assignment_record: None,
            }],
            next_track_id: 1,
            next_hypothesis_id: 1,
            last_frame: None,
            pedigree: None,
        })
    }

    /// Enables recording of the hypothesis pedigree.
    pub fn with_pedigree(mut self) -> Self {
        self.pedigree = Some(Pedigree::new(&self.hypotheses[0]));
        self
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Current generation, best first.
    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn pedigree(&self) -> Option<&Pedigree> {
        self.pedigree.as_ref()
    }

    pub fn step(&mut self, frame: &Frame) -> Result<StepOutput, TrackerError> {
        if let Some(previous) = self.last_frame {
            if frame.frame_index <= previous {
                return Err(TrackerError::OutOfOrderFrame {
                    previous,
                    got: frame.frame_index,
                });
            }
        }
        frame.validate()?;
        self.last_frame = Some(frame.frame_index);

        let mut children = Vec::new();
        for (p, parent) in self.hypotheses.iter().enumerate() {
            let (matrix, layout) = build_cost_matrix(
                &parent.tracks,
                &frame.detections,
                frame.frame_index,
                &self.config.likelihood,
            );
            let ranked = murty_kbest_on_rows(&matrix, self.config.kbest_per_parent, &layout.track_rows())
                .expect("augmented matrix always admits the all-miss assignment");
            for solution in ranked {
                children.push(Child {
                    parent: p,
                    log_weight: parent.log_weight - solution.total_cost,
                    decoded: layout.decode(&solution.assignment),
                    solution,
                });
            }
        }
        children.sort_by(child_order);
        children.truncate(self.config.hypothesis_budget);

        // A detection that starts a track gets the same id in every
        // surviving hypothesis.
        let mut birth_ids = BTreeMap::new();
        for child in &children {
            for &j in &child.decoded.births {
                birth_ids.entry(j).or_insert(0);
            }
        }
        for id in birth_ids.values_mut() {
            *id = self.next_track_id;
            self.next_track_id += 1;
        }

        let diagnostics: Vec<Diagnostic> = children[0]
            .decoded
            .births
            .iter()
            .filter_map(|&j| birth_diagnostic(frame, j, birth_ids[&j]))
            .collect();
        let lifecycle = self.config.lifecycle();
        let best_weight = children[0].log_weight;
        let mut next = Vec::with_capacity(children.len());
        for child in children {
            let parent = &self.hypotheses[child.parent];
            let mut tracks = Vec::with_capacity(parent.tracks.len() + child.decoded.births.len());
            for (track, det) in parent.tracks.iter().zip(&child.decoded.track_to_det) {
                let mut track = track.clone();
                match det {
                    Some(j) => track.record_hit(frame.frame_index, frame.detections[*j].clone(), lifecycle),
                    None => track.record_miss(lifecycle),
                }
                if track.is_live() {
                    tracks.push(track);
                }
            }
            for &j in &child.decoded.births {
                tracks.push(Track::new(
                    birth_ids[&j],
                    frame.frame_index,
                    frame.detections[j].clone(),
                    self.config.history_capacity,
                ));
            }
            next.push(Hypothesis {
                id: self.next_hypothesis_id,
                parent_id: Some(parent.id),
                tracks,
                log_weight: child.log_weight - best_weight,
                cumulative_log_weight: parent.cumulative_log_weight - child.solution.total_cost,
                assignment_record: Some(child.solution),
            });
            self.next_hypothesis_id += 1;
        }

        if let Some(pedigree) = &mut self.pedigree {
            pedigree.record(frame.frame_index, &next);
        }
        self.hypotheses = next;
        Ok(StepOutput {
            snapshots: snapshots(&self.hypotheses[0].tracks, frame.frame_index),
            diagnostics,
        })
    }
}

/// Confirmed tracks of a hypothesis as log lines, ordered by id. A track
/// whose newest detection ends inside the buffer describes an object that is
/// already gone and is left out.
pub(crate) fn snapshots(tracks: &[Track], frame_index: i64) -> Vec<TrackSnapshot> {
    let mut out: Vec<TrackSnapshot> = tracks
        .iter()
        .filter(|t| t.status == TrackStatus::Confirmed && !t.latest().detection.death_flag)
        .map(|t| t.snapshot(frame_index))
        .collect();
    out.sort_by_key(|s| s.track_id);
    out
}
