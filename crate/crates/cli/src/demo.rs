use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use pairtrack::evaluation::{evaluate, EvalConfig, MotReport};
use pairtrack::io::to_jsonl_string;
use pairtrack::simulator::{simulate, ScenarioSpec};
use pairtrack::tracker::{run_sequence, TrackStatus, TrackerConfig};

use crate::error::{write_text, CliError};

/// Scenarios run by `demo`, embedded so the binary works from any directory.
pub const BUNDLED: [(&str, &str); 3] = [
    ("moving_car", include_str!("../../../scenarios/moving_car.toml")),
    ("parked_car", include_str!("../../../scenarios/parked_car.toml")),
    (
        "crossing_pedestrians",
        include_str!("../../../scenarios/crossing_pedestrians.toml"),
    ),
];

struct Outcome {
    name: &'static str,
    confirmed_tracks: usize,
    report: MotReport,
}

fn run_one(name: &'static str, text: &str, out_dir: &Path) -> Result<Outcome, CliError> {
    let spec = ScenarioSpec::from_toml_str(text)?;
    let sim = simulate(&spec)?;
    let log = run_sequence(&sim.frames, &TrackerConfig::default())?;
    let report = evaluate(&log, &sim.frames, &EvalConfig::default())?;
    let dir = out_dir.join(name);
    write_text(&dir.join("frames.jsonl"), &to_jsonl_string(&sim.frames))?;
    write_text(&dir.join("tracks.jsonl"), &to_jsonl_string(&log))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::input(name, e))?;
    write_text(&dir.join("report.json"), &(json + "\n"))?;
    let mut confirmed: Vec<u64> = log
        .iter()
        .filter(|s| s.status == TrackStatus::Confirmed)
        .map(|s| s.track_id)
        .collect();
    confirmed.sort_unstable();
    confirmed.dedup();
    Ok(Outcome {
        name,
        confirmed_tracks: confirmed.len(),
        report,
    })
}

pub fn run(out_dir: &Path, jobs: usize, verbose: bool) -> Result<(), CliError> {
    if jobs == 0 {
        return Err(CliError::Input("--jobs must be at least 1".into()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Outcome, CliError>>>> = Mutex::new((0..BUNDLED.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(BUNDLED.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((name, text)) = BUNDLED.get(i) else {
                    break;
                };
                if verbose {
                    eprintln!("running {name}");
                }
                let r = run_one(name, text, out_dir);
                results.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    println!(
        "{:<22} {:>8} {:>6} {:>6} {:>6} {:>8}",
        "scenario", "MOTA", "FP", "FN", "IDSW", "tracks"
    );
    for r in results.into_inner().expect("no worker panicked") {
        let o = r.expect("every scenario ran")?;
        println!(
            "{:<22} {:>8.4} {:>6} {:>6} {:>6} {:>8}",
            o.name, o.report.mota, o.report.fp, o.report.fn_, o.report.id_switches, o.confirmed_tracks
        );
    }
    Ok(())
}
