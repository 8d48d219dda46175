//! CLEAR-MOT scoring of a track log against simulator ground truth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{solve_optimal, CostMatrix};
use crate::detection::{derive_time_targets, ClassLabel, Frame, SweepRange};
use crate::geometry::{iou2d, OrientedBox2D};
use crate::tracker::{TrackSnapshot, TrackStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("track log has frame {frame} which is not among the ground-truth frames")]
    ClockMismatch { frame: i64 },
    #[error("ground-truth frame {frame} appears more than once")]
    DuplicateFrame { frame: i64 },
    #[error("frame {frame} carries no ground truth")]
    MissingGroundTruth { frame: i64 },
    #[error("iou_threshold must lie in (0, 1], got {0}")]
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub iou_threshold: f64,
    /// Objects whose current center lies within this radius (m) of the
    /// origin count as near range.
    pub near_radius: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            near_radius: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub gt_count: usize,
    pub matches: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub id_switches: usize,
    pub mota: f64,
}

impl Counts {
    fn finish(&mut self) {
        let errors = (self.fp + self.fn_ + self.id_switches) as f64;
        self.mota = 1.0 - errors / self.gt_count.max(1) as f64;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotReport {
    pub mota: f64,
    /// Mean center distance (m) over matches; 0 without matches.
    pub motp: f64,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub id_switches: usize,
    pub gt_count: usize,
    pub matches: usize,
    pub frames: usize,
    pub per_class: BTreeMap<ClassLabel, Counts>,
    pub near: Counts,
    pub far: Counts,
    /// Mean distance between matched begin-box centers, a diagnostic of the
    /// older half of each pair.
    pub begin_center_error: Option<f64>,
}

struct GtObject {
    id: String,
    class: ClassLabel,
    end: OrientedBox2D,
    begin: OrientedBox2D,
}

fn current_objects(frame: &Frame) -> Result<Vec<GtObject>, EvalError> {
    let gts = frame.ground_truth.as_ref().ok_or(EvalError::MissingGroundTruth {
        frame: frame.frame_index,
    })?;
    let buffer = SweepRange::default();
    Ok(gts
        .iter()
        .filter_map(|g| {
            let end = g.at(buffer.newest)?;
            let targets = derive_time_targets(g, buffer).ok()?;
            let begin = g.at(targets.t_b)?;
            Some(GtObject {
                id: g.track_id.clone(),
                class: g.class_label,
                end: end.bbox,
                begin: begin.bbox,
            })
        })
        .collect())
}

/// Scores `track_log` against the ground truth carried by `frames`.
pub fn evaluate(track_log: &[TrackSnapshot], frames: &[Frame], config: &EvalConfig) -> Result<MotReport, EvalError> {
    if !(config.iou_threshold > 0.0 && config.iou_threshold <= 1.0) {
        return Err(EvalError::Threshold(config.iou_threshold));
    }
    let mut by_frame: BTreeMap<i64, &Frame> = BTreeMap::new();
    for f in frames {
        if by_frame.insert(f.frame_index, f).is_some() {
            return Err(EvalError::DuplicateFrame { frame: f.frame_index });
        }
    }
    let mut tracks: BTreeMap<i64, Vec<&TrackSnapshot>> = BTreeMap::new();
    for s in track_log {
        if !by_frame.contains_key(&s.frame_index) {
            return Err(EvalError::ClockMismatch { frame: s.frame_index });
        }
        tracks.entry(s.frame_index).or_default().push(s);
    }

    let thr = config.iou_threshold;
    let near = |b: &OrientedBox2D| b.center().norm() <= config.near_radius;
    let mut total = Counts::default();
    let mut per_class: BTreeMap<ClassLabel, Counts> = BTreeMap::new();
    let mut near_c = Counts::default();
    let mut far_c = Counts::default();
    let mut distance_sum = 0.0;
    let mut begin_sum = 0.0;
    let mut last_match: BTreeMap<String, u64> = BTreeMap::new();
    let mut previous: BTreeMap<String, u64> = BTreeMap::new();

    let no_tracks = Vec::new();
    for (&fi, frame) in &by_frame {
        let gts = current_objects(frame)?;
        let hyps = tracks.get(&fi).unwrap_or(&no_tracks);
        let mut matched_gt = vec![None::<usize>; gts.len()];
        let mut used = BTreeSet::new();

        // keep last frame's pairs that are still inside the gate
        for (g, obj) in gts.iter().enumerate() {
            let Some(&tid) = previous.get(&obj.id) else { continue };
            if let Some(h) = hyps.iter().position(|s| s.track_id == tid) {
                if !used.contains(&h) && iou2d(&obj.end, &hyps[h].box_end) >= thr {
                    matched_gt[g] = Some(h);
                    used.insert(h);
                }
            }
        }

        let free_g: Vec<usize> = (0..gts.len()).filter(|g| matched_gt[*g].is_none()).collect();
        let free_h: Vec<usize> = (0..hyps.len()).filter(|h| !used.contains(h)).collect();
        let (r, c) = (free_g.len(), free_h.len());
        if r > 0 && c > 0 {
            // rows: objects, then one filler per track; columns: tracks,
            // then one "unmatched" slot per object
            let mut m = CostMatrix::filled(r + c, f64::INFINITY);
            for (a, &g) in free_g.iter().enumerate() {
                for (b, &h) in free_h.iter().enumerate() {
                    let iou = iou2d(&gts[g].end, &hyps[h].box_end);
                    if iou >= thr {
                        m.set(a, b, 1.0 - iou);
                    }
                }
                m.set(a, c + a, 1.0);
            }
            for b in 0..c {
                for col in (b..=b).chain(c..c + r) {
                    m.set(r + b, col, 0.0);
                }
            }
            let s = solve_optimal(&m).expect("filler rows keep the problem feasible");
            for (a, &g) in free_g.iter().enumerate() {
                let col = s.assignment[a];
                if col < c {
                    matched_gt[g] = Some(free_h[col]);
                    used.insert(free_h[col]);
                }
            }
        }

        previous.clear();
        for (g, obj) in gts.iter().enumerate() {
            let bucket = if near(&obj.end) { &mut near_c } else { &mut far_c };
            let class = per_class.entry(obj.class).or_default();
            for counts in [&mut total, class, bucket] {
                counts.gt_count += 1;
            }
            let Some(h) = matched_gt[g] else {
                let bucket = if near(&obj.end) { &mut near_c } else { &mut far_c };
                for counts in [&mut total, per_class.get_mut(&obj.class).unwrap(), bucket] {
                    counts.fn_ += 1;
                }
                continue;
            };
            let snap = hyps[h];
            let switched = last_match.get(&obj.id).is_some_and(|&t| t != snap.track_id);
            let bucket = if near(&obj.end) { &mut near_c } else { &mut far_c };
            for counts in [&mut total, per_class.get_mut(&obj.class).unwrap(), bucket] {
                counts.matches += 1;
                counts.id_switches += usize::from(switched);
            }
            distance_sum += obj.end.center().distance(snap.box_end.center());
            begin_sum += obj.begin.center().distance(snap.box_begin.center());
            last_match.insert(obj.id.clone(), snap.track_id);
            previous.insert(obj.id.clone(), snap.track_id);
        }
        for (h, snap) in hyps.iter().enumerate() {
            if used.contains(&h) {
                continue;
            }
            let bucket = if near(&snap.box_end) { &mut near_c } else { &mut far_c };
            for counts in [&mut total, per_class.entry(snap.class_label).or_default(), bucket] {
                counts.fp += 1;
            }
        }
    }

    total.finish();
    near_c.finish();
    far_c.finish();
    per_class.values_mut().for_each(Counts::finish);
    let matches = total.matches;
    Ok(MotReport {
        mota: total.mota,
        motp: if matches > 0 {
            distance_sum / matches as f64
        } else {
            0.0
        },
        fp: total.fp,
        fn_: total.fn_,
        id_switches: total.id_switches,
        gt_count: total.gt_count,
        matches,
        frames: by_frame.len(),
        per_class,
        near: near_c,
        far: far_c,
        begin_center_error: (matches > 0).then(|| begin_sum / matches as f64),
    })
}

/// The ground truth itself as a track log: every object present at the
/// current sweep becomes a confirmed track, numbered by sorted object id
/// starting at 1.
pub fn truth_track_log(frames: &[Frame]) -> Result<Vec<TrackSnapshot>, EvalError> {
    let mut per_frame = Vec::with_capacity(frames.len());
    let mut ids = BTreeSet::new();
    for f in frames {
        let objects = current_objects(f)?;
        ids.extend(objects.iter().map(|o| o.id.clone()));
        per_frame.push((f.frame_index, objects));
    }
    let number: BTreeMap<String, u64> = ids.into_iter().zip(1..).collect();
    let mut log = Vec::new();
    for (frame_index, mut objects) in per_frame {
        objects.sort_by_key(|o| number[&o.id]);
        log.extend(objects.into_iter().map(|o| TrackSnapshot {
            frame_index,
            track_id: number[&o.id],
            class_label: o.class,
            box_end: o.end,
            box_begin: o.begin,
            status: TrackStatus::Confirmed,
        }));
    }
    Ok(log)
}

/// Plain-text summary table.
pub fn render_table(r: &MotReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>8} {:>7} {:>7} {:>6} {:>6} {:>6}",
        "scope", "MOTA", "GT", "TP", "FP", "FN", "IDSW"
    );
    let mut row = |name: &str, c: &Counts| {
        let _ = writeln!(
            out,
            "{:<12} {:>8.4} {:>7} {:>7} {:>6} {:>6} {:>6}",
            name, c.mota, c.gt_count, c.matches, c.fp, c.fn_, c.id_switches
        );
    };
    let all = Counts {
        gt_count: r.gt_count,
        matches: r.matches,
        fp: r.fp,
        fn_: r.fn_,
        id_switches: r.id_switches,
        mota: r.mota,
    };
    row("all", &all);
    for (class, c) in &r.per_class {
        row(class.as_str(), c);
    }
    row("near", &r.near);
    row("far", &r.far);
    let _ = writeln!(out, "MOTP {:.4} m over {} frames", r.motp, r.frames);
    if let Some(b) = r.begin_center_error {
        let _ = writeln!(out, "begin-box center error {b:.4} m");
    }
    out
}
