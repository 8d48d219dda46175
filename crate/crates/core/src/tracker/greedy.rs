use crate::assignment::{reference::hungarian, CostMatrix, SENTINEL};
use crate::detection::Frame;
use crate::likelihood::score_pair;

use super::hypothesis::snapshots;
use super::{birth_diagnostic, Diagnostic, Track, TrackSnapshot, TrackerConfig, TrackerError};

/// Single-hypothesis tracker: solve the frame's assignment once, commit.
///
/// Shares the likelihood model and track lifecycle with [`super::Tracker`]
/// but builds its own matrix, solves it with the textbook Hungarian method
/// and resolves ties among optimal solutions by re-solving with forced arcs.
pub struct GreedyTracker {
    config: TrackerConfig,
    tracks: Vec<Track>,
    next_track_id: u64,
    last_frame: Option<i64>,
    diagnostics: Vec<Diagnostic>,
}

impl GreedyTracker {
    pub fn new(config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            config,
            tracks: Vec::new(),
            next_track_id: 1,
            last_frame: None,
            diagnostics: Vec::new(),
        })
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn step(&mut self, frame: &Frame) -> Result<Vec<TrackSnapshot>, TrackerError> {
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

        let params = &self.config.likelihood;
        let n = self.tracks.len();
        let m = frame.detections.len();

        // rows: tracks, then one "unassociated" row per detection
        // cols: detections, then one "missed" column per track
        let mut rows = vec![vec![f64::INFINITY; n + m]; n + m];
        for (i, track) in self.tracks.iter().enumerate() {
            for (j, det) in frame.detections.iter().enumerate() {
                rows[i][j] = -score_pair(track, det, frame.frame_index, params).log_likelihood;
            }
            rows[i][m + i] = -params.log_miss;
        }
        let mut spawn = vec![false; m];
        for (j, det) in frame.detections.iter().enumerate() {
            let (ll, s) = params.unassociated(det);
            rows[n + j][j] = -ll;
            spawn[j] = s;
            rows[n + j][m..].fill(0.0);
        }
        let matrix = CostMatrix::from_rows(&rows).expect("square by construction");
        let choice = first_optimal_track_choice(&matrix, n, m);

        let lifecycle = self.config.lifecycle();
        let mut taken = vec![false; m];
        let mut survivors = Vec::with_capacity(n + m);
        for (mut track, c) in std::mem::take(&mut self.tracks).into_iter().zip(choice) {
            if c < m {
                taken[c] = true;
                track.record_hit(frame.frame_index, frame.detections[c].clone(), lifecycle);
            } else {
                track.record_miss(lifecycle);
            }
            if track.is_live() {
                survivors.push(track);
            }
        }
        for j in 0..m {
            if taken[j] || !spawn[j] {
                continue;
            }
            let id = self.next_track_id;
            self.next_track_id += 1;
            survivors.push(Track::new(
                id,
                frame.frame_index,
                frame.detections[j].clone(),
                self.config.history_capacity,
            ));
            self.diagnostics.extend(birth_diagnostic(frame, j, id));
        }
        self.tracks = survivors;
        Ok(snapshots(&self.tracks, frame.frame_index))
    }
}

/// Columns chosen by the track rows in the lexicographically first
/// optimal assignment.
fn first_optimal_track_choice(matrix: &CostMatrix, n: usize, m: usize) -> Vec<usize> {
    let size = n + m;
    if size == 0 {
        return Vec::new();
    }
    let best = hungarian(matrix).expect("all-miss assignment is always finite");
    let scale = (0..size)
        .flat_map(|r| matrix.row(r).iter().copied())
        .filter(|c| *c < SENTINEL)
        .fold(1.0f64, |acc, c| acc.max(c.abs()));
    let tol = 1e-9 * scale;

    let mut constrained = matrix.clone();
    let mut current = best.assignment;
    for r in 0..n {
        for c in 0..current[r] {
            if !constrained.get(r, c).is_finite() {
                continue;
            }
            let mut trial = constrained.clone();
            force(&mut trial, r, c);
            if let Ok(s) = hungarian(&trial) {
                if s.total_cost <= best.total_cost + tol {
                    current = s.assignment;
                    break;
                }
            }
        }
        force(&mut constrained, r, current[r]);
    }
    current.truncate(n);
    current
}

fn force(m: &mut CostMatrix, r: usize, c: usize) {
    for k in 0..m.size() {
        if k != c {
            m.set(r, k, f64::INFINITY);
        }
        if k != r {
            m.set(k, c, f64::INFINITY);
        }
    }
}
