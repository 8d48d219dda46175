use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use pairtrack::detection::{Frame, NEWEST_SWEEP};
use pairtrack::geometry::OrientedBox2D;
use pairtrack::io::{parse_frames, parse_track_log};
use pairtrack::tracker::TrackSnapshot;

use crate::error::{parsed, read_text, write_text, CliError};

const PX_PER_M: f64 = 8.0;
const MARGIN_M: f64 = 3.0;
const PALETTE: [&str; 10] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#9a6324", "#800000", "#000075",
];

struct View {
    x0: f64,
    y1: f64,
    width: f64,
    height: f64,
}

impl View {
    fn fit(boxes: impl Iterator<Item = OrientedBox2D>) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for b in boxes {
            for c in b.corners() {
                x0 = x0.min(c.x);
                y0 = y0.min(c.y);
                x1 = x1.max(c.x);
                y1 = y1.max(c.y);
            }
        }
        if x0 > x1 {
            (x0, y0, x1, y1) = (-10.0, -10.0, 10.0, 10.0);
        }
        Self {
            x0: x0 - MARGIN_M,
            y1: y1 + MARGIN_M,
            width: (x1 - x0 + 2.0 * MARGIN_M) * PX_PER_M,
            height: (y1 - y0 + 2.0 * MARGIN_M) * PX_PER_M,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * PX_PER_M, (self.y1 - y) * PX_PER_M)
    }

    fn polygon(&self, out: &mut String, b: &OrientedBox2D, style: &str) {
        let pts: Vec<String> = b
            .corners()
            .iter()
            .map(|c| {
                let (x, y) = self.px(c.x, c.y);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(out, "  <polygon points=\"{}\" {style}/>", pts.join(" "));
    }
}

fn frame_svg(view: &View, frame: &Frame, tracks: &[&TrackSnapshot]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" font-family=\"sans-serif\" font-size=\"10\">",
        view.width, view.height
    );
    let _ = writeln!(out, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(out, "  <text x=\"4\" y=\"12\">frame {}</text>", frame.frame_index);
    for gt in frame.ground_truth.iter().flatten() {
        if let Some(p) = gt.at(NEWEST_SWEEP) {
            view.polygon(&mut out, &p.bbox, "fill=\"#eeeeee\" stroke=\"#999999\"");
        }
    }
    for d in &frame.detections {
        view.polygon(
            &mut out,
            &d.box_begin,
            "fill=\"none\" stroke=\"#9ecae1\" stroke-dasharray=\"3,2\"",
        );
        view.polygon(&mut out, &d.box_end, "fill=\"none\" stroke=\"#3182bd\"");
        let (ax, ay) = view.px(d.box_begin.cx, d.box_begin.cy);
        let (bx, by) = view.px(d.box_end.cx, d.box_end.cy);
        let _ = writeln!(
            out,
            "  <line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{bx:.2}\" y2=\"{by:.2}\" stroke=\"#3182bd\"/>"
        );
    }
    for t in tracks {
        let color = PALETTE[(t.track_id % PALETTE.len() as u64) as usize];
        view.polygon(
            &mut out,
            &t.box_end,
            &format!("fill=\"none\" stroke=\"{color}\" stroke-width=\"2\""),
        );
        let (x, y) = view.px(t.box_end.cx, t.box_end.cy);
        let _ = writeln!(
            out,
            "  <text x=\"{x:.2}\" y=\"{y:.2}\" fill=\"{color}\">{}</text>",
            t.track_id
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn run(frames_path: &Path, tracks_path: Option<&Path>, out_dir: &Path, every: usize) -> Result<(), CliError> {
    if every == 0 {
        return Err(CliError::Input("--every must be at least 1".into()));
    }
    let frames = parsed(frames_path, parse_frames(&read_text(frames_path)?))?;
    let log = match tracks_path {
        Some(p) => parsed(p, parse_track_log(&read_text(p)?))?,
        None => Vec::new(),
    };
    let mut by_frame: BTreeMap<i64, Vec<&TrackSnapshot>> = BTreeMap::new();
    for s in &log {
        by_frame.entry(s.frame_index).or_default().push(s);
    }
    let view = View::fit(
        frames
            .iter()
            .flat_map(|f| {
                let gt = f
                    .ground_truth
                    .iter()
                    .flatten()
                    .filter_map(|g| g.at(NEWEST_SWEEP).map(|p| p.bbox));
                let dets = f.detections.iter().flat_map(|d| [d.box_begin, d.box_end]);
                gt.chain(dets).collect::<Vec<_>>()
            })
            .chain(log.iter().map(|s| s.box_end)),
    );
    let mut written = 0;
    for frame in frames.iter().step_by(every) {
        let tracks = by_frame.get(&frame.frame_index).map_or(&[][..], |v| v.as_slice());
        let path = out_dir.join(format!("frame_{:05}.svg", frame.frame_index));
        write_text(&path, &frame_svg(&view, frame, tracks))?;
        written += 1;
    }
    println!("frames {written}");
    Ok(())
}
