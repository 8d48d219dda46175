use std::path::Path;

use pairtrack::evaluation::{evaluate, render_table, EvalConfig};
use pairtrack::io::{parse_frames, parse_track_log};

use crate::error::{parsed, read_text, write_text, CliError};

pub fn run(
    truth: &Path,
    tracks: &Path,
    report: Option<&Path>,
    iou_threshold: Option<f64>,
    near_radius: Option<f64>,
) -> Result<(), CliError> {
    let mut config = EvalConfig::default();
    if let Some(t) = iou_threshold {
        config.iou_threshold = t;
    }
    if let Some(r) = near_radius {
        if !(r.is_finite() && r >= 0.0) {
            return Err(CliError::Input(format!(
                "near radius must be a finite non-negative number, got {r}"
            )));
        }
        config.near_radius = r;
    }
    let frames = parsed(truth, parse_frames(&read_text(truth)?))?;
    let log = parsed(tracks, parse_track_log(&read_text(tracks)?))?;
    let result = evaluate(&log, &frames, &config)?;
    if let Some(path) = report {
        let json = serde_json::to_string_pretty(&result).map_err(|e| CliError::input(path.display(), e))?;
        write_text(path, &(json + "\n"))?;
    }
    print!("{}", render_table(&result));
    Ok(())
}
