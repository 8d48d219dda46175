//! `pairtrack`: simulate scenarios, track paired detections, score the
//! result and inspect detector targets.

mod bench;
mod demo;
mod error;
mod evaluate;
mod render;
mod simulate;
mod targets;
mod track;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pairtrack", version, about = "Paired-detection tracking toolkit")]
struct Cli {
    /// Progress messages on standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// k-best multi-hypothesis tracker; `hypothesis_budget = 1` makes it greedy.
    Hypotheses,
    /// Stand-alone single-hypothesis tracker.
    Greedy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file and write its frames.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Frame JSONL output.
        #[arg(long)]
        out: PathBuf,
        /// Also write one point cloud per frame.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Also write the ground truth as a track log.
        #[arg(long)]
        truth_log: Option<PathBuf>,
        /// Replace the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Track the detections of a frame file.
    Track {
        #[arg(long)]
        input: PathBuf,
        /// Track-log JSONL output.
        #[arg(long)]
        out: PathBuf,
        /// Tracker settings (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the hypothesis pedigree as Graphviz DOT.
        #[arg(long)]
        pedigree: Option<PathBuf>,
        /// Write per-frame diagnostics as JSONL.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Engine::Hypotheses)]
        engine: Engine,
    },
    /// Score a track log against the ground truth of a frame file.
    Evaluate {
        /// Frame JSONL carrying ground truth.
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        tracks: PathBuf,
        /// Full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        iou_threshold: Option<f64>,
        #[arg(long)]
        near_radius: Option<f64>,
    },
    /// Build anchors and targets from point clouds and report field coverage.
    Targets {
        /// Point-cloud JSONL.
        #[arg(long)]
        points: PathBuf,
        /// Frame JSONL carrying ground truth.
        #[arg(long)]
        truth: PathBuf,
        /// Label-assignment JSONL output.
        #[arg(long)]
        out: PathBuf,
        /// Per-frame coverage report as JSONL.
        #[arg(long)]
        erf_report: Option<PathBuf>,
        /// Pipeline settings (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run every strided stage in submanifold mode.
        #[arg(long)]
        submanifold: bool,
    },
    /// Time the assignment solvers and check them against the oracles.
    AssocBench {
        /// Comma-separated matrix sizes.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,8,16,32,64")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solutions requested from the ranked solver.
        #[arg(long, default_value_t = 6)]
        k: usize,
        /// Leave out the timing columns.
        #[arg(long)]
        no_timing: bool,
    },
    /// Simulate, track and score the bundled scenarios.
    Demo {
        #[arg(long)]
        out_dir: PathBuf,
        /// Scenarios processed in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Draw frames, detections and tracks as SVG, one file per frame.
    Render {
        /// Frame JSONL.
        #[arg(long)]
        frames: PathBuf,
        /// Track log to overlay.
        #[arg(long)]
        tracks: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Only every n-th frame.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            points,
            truth_log,
            seed,
        } => simulate::run(&scenario, &out, points.as_deref(), truth_log.as_deref(), seed, verbose),
        Command::Track {
            input,
            out,
            config,
            pedigree,
            diagnostics,
            engine,
        } => track::run(&track::TrackArgs {
            input,
            out,
            config,
            pedigree,
            diagnostics,
            engine,
            verbose,
        }),
        Command::Evaluate {
            truth,
            tracks,
            report,
            iou_threshold,
            near_radius,
        } => evaluate::run(&truth, &tracks, report.as_deref(), iou_threshold, near_radius),
        Command::Targets {
            points,
            truth,
            out,
            erf_report,
            config,
            submanifold,
        } => targets::run(&targets::TargetArgs {
            points,
            truth,
            out,
            erf_report,
            config,
            submanifold,
            verbose,
        }),
        Command::AssocBench {
            sizes,
            trials,
            seed,
            k,
            no_timing,
        } => bench::run(&sizes, trials, seed, k, !no_timing),
        Command::Demo { out_dir, jobs } => demo::run(&out_dir, jobs, verbose),
        Command::Render {
            frames,
            tracks,
            out_dir,
            every,
        } => render::run(&frames, tracks.as_deref(), &out_dir, every),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pairtrack: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
