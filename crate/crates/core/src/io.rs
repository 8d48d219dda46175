//! JSON-lines and TOML readers and writers for the on-disk formats.
//!
//! Every reader validates records as it goes and reports the 1-based line
//! number of the first bad record. Blank lines are skipped.

use std::io::Write;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::detection::Frame;
use crate::sweep::{PipelineConfig, SweepPointCloud};
use crate::tracker::{TrackSnapshot, TrackerConfig};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Deserializes one record per non-blank line, running `check` on each.
pub fn read_jsonl_with<T, F, E>(text: &str, mut check: F) -> Result<Vec<T>, IoError>
where
    T: DeserializeOwned,
    F: FnMut(&T) -> Result<(), E>,
    E: std::fmt::Display,
{
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let item: T = serde_json::from_str(raw).map_err(|e| IoError::Parse {
            line,
            message: e.to_string(),
        })?;
        check(&item).map_err(|e| IoError::Invalid {
            line,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, IoError> {
    read_jsonl_with(text, |_: &T| Ok::<(), std::convert::Infallible>(()))
}

pub fn parse_frames(text: &str) -> Result<Vec<Frame>, IoError> {
    read_jsonl_with(text, Frame::validate)
}

pub fn parse_point_clouds(text: &str) -> Result<Vec<SweepPointCloud>, IoError> {
    read_jsonl_with(text, SweepPointCloud::validate)
}

pub fn parse_track_log(text: &str) -> Result<Vec<TrackSnapshot>, IoError> {
    read_jsonl_with(text, |s: &TrackSnapshot| {
        s.box_end.validate()?;
        s.box_begin.validate()
    })
}

/// Writes one compact JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(mut w: W, items: &[T]) -> Result<(), IoError> {
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_jsonl_string<T: Serialize>(items: &[T]) -> String {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, items).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Tracker settings file. Every key is optional.
pub fn parse_tracker_config(text: &str) -> Result<TrackerConfig, IoError> {
    let config: TrackerConfig = toml::from_str(text).map_err(|e| IoError::Config(e.message().to_string()))?;
    config.validate().map_err(|e| IoError::Config(e.to_string()))?;
    Ok(config)
}

/// Pipeline settings file. Every key is optional.
pub fn parse_pipeline_config(text: &str) -> Result<PipelineConfig, IoError> {
    let config: PipelineConfig = toml::from_str(text).map_err(|e| IoError::Config(e.message().to_string()))?;
    config.validate().map_err(|e| IoError::Config(e.to_string()))?;
    Ok(config)
}
