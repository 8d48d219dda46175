use std::path::Path;

use pairtrack::evaluation::truth_track_log;
use pairtrack::io::to_jsonl_string;
use pairtrack::simulator::{simulate, synthesize_points, ScenarioSpec};

use crate::error::{read_text, write_text, CliError};

pub fn load_scenario(path: &Path, seed: Option<u64>) -> Result<ScenarioSpec, CliError> {
    let mut spec = ScenarioSpec::from_toml_str(&read_text(path)?).map_err(|e| CliError::input(path.display(), e))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    Ok(spec)
}

pub fn run(
    scenario: &Path,
    out: &Path,
    points: Option<&Path>,
    truth_log: Option<&Path>,
    seed: Option<u64>,
    verbose: bool,
) -> Result<(), CliError> {
    let spec = load_scenario(scenario, seed)?;
    let sim = simulate(&spec)?;
    write_text(out, &to_jsonl_string(&sim.frames))?;
    if let Some(path) = points {
        let clouds: Vec<_> = (0..spec.duration_frames).map(|f| synthesize_points(&spec, f)).collect();
        if verbose {
            eprintln!("{} point clouds", clouds.len());
        }
        write_text(path, &to_jsonl_string(&clouds))?;
    }
    if let Some(path) = truth_log {
        write_text(path, &to_jsonl_string(&truth_track_log(&sim.frames)?))?;
    }
    let detections: usize = sim.frames.iter().map(|f| f.detections.len()).sum();
    println!(
        "objects {} frames {} detections {}",
        spec.objects.len(),
        sim.frames.len(),
        detections
    );
    Ok(())
}
