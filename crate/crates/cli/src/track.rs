use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use pairtrack::detection::Frame;
use pairtrack::io::{parse_frames, parse_tracker_config, to_jsonl_string};
use pairtrack::tracker::{Diagnostic, GreedyTracker, TrackSnapshot, Tracker, TrackerConfig};

use crate::error::{parsed, read_text, write_text, CliError};
use crate::Engine;

pub struct TrackArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub pedigree: Option<PathBuf>,
    pub diagnostics: Option<PathBuf>,
    pub engine: Engine,
    pub verbose: bool,
}

pub fn load_config(path: Option<&Path>) -> Result<TrackerConfig, CliError> {
    match path {
        Some(p) => parsed(p, parse_tracker_config(&read_text(p)?)),
        None => Ok(TrackerConfig::default()),
    }
}

pub struct TrackRun {
    pub log: Vec<TrackSnapshot>,
    pub diagnostics: Vec<Diagnostic>,
    pub pedigree_dot: Option<String>,
}

/// Runs every frame through the chosen engine.
pub fn track_frames(
    frames: &[Frame],
    config: TrackerConfig,
    engine: Engine,
    pedigree: bool,
) -> Result<TrackRun, CliError> {
    let mut log = Vec::new();
    match engine {
        Engine::Hypotheses => {
            let mut tracker = Tracker::new(config)?;
            if pedigree {
                tracker = tracker.with_pedigree();
            }
            let mut diagnostics = Vec::new();
            for frame in frames {
                let step = tracker.step(frame)?;
                log.extend(step.snapshots);
                diagnostics.extend(step.diagnostics);
            }
            Ok(TrackRun {
                log,
                diagnostics,
                pedigree_dot: tracker.pedigree().map(|p| p.to_dot()),
            })
        }
        Engine::Greedy => {
            let mut tracker = GreedyTracker::new(config)?;
            for frame in frames {
                log.extend(tracker.step(frame)?);
            }
            Ok(TrackRun {
                log,
                diagnostics: tracker.diagnostics().to_vec(),
                pedigree_dot: None,
            })
        }
    }
}

pub fn run(args: &TrackArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref())?;
    let frames = parsed(&args.input, parse_frames(&read_text(&args.input)?))?;
    if args.pedigree.is_some() && args.engine == Engine::Greedy {
        return Err(CliError::Input("--pedigree needs the hypotheses engine".into()));
    }
    let result = track_frames(&frames, config, args.engine, args.pedigree.is_some())?;
    write_text(&args.out, &to_jsonl_string(&result.log))?;
    if let (Some(path), Some(dot)) = (&args.pedigree, &result.pedigree_dot) {
        write_text(path, dot)?;
    }
    if let Some(path) = &args.diagnostics {
        write_text(path, &to_jsonl_string(&result.diagnostics))?;
    }
    if args.verbose {
        eprintln!("{} diagnostics", result.diagnostics.len());
    }
    let ids: BTreeSet<u64> = result.log.iter().map(|s| s.track_id).collect();
    println!(
        "frames {} snapshots {} tracks {}",
        frames.len(),
        result.log.len(),
        ids.len()
    );
    Ok(())
}
