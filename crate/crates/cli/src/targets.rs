use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use pairtrack::io::{parse_frames, parse_pipeline_config, parse_point_clouds, to_jsonl_string};
use pairtrack::sweep::{build_label_assignment, erf_report, run_pipeline, ErfReport, PipelineConfig};

use crate::error::{parsed, read_text, write_text, CliError};

pub struct TargetArgs {
    pub points: PathBuf,
    pub truth: PathBuf,
    pub out: PathBuf,
    pub erf_report: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub submanifold: bool,
    pub verbose: bool,
}

#[derive(Serialize)]
struct FrameErf {
    frame_index: i64,
    #[serde(flatten)]
    report: ErfReport,
}

pub fn run(args: &TargetArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(p) => parsed(p, parse_pipeline_config(&read_text(p)?))?,
        None => PipelineConfig::default(),
    };
    if args.submanifold {
        config = config.submanifold_only();
    }
    let clouds = parsed(&args.points, parse_point_clouds(&read_text(&args.points)?))?;
    let frames = parsed(&args.truth, parse_frames(&read_text(&args.truth)?))?;
    let mut truth = BTreeMap::new();
    for f in &frames {
        let Some(gt) = &f.ground_truth else {
            return Err(CliError::Input(format!(
                "frame {} carries no ground truth",
                f.frame_index
            )));
        };
        if truth.insert(f.frame_index, gt).is_some() {
            return Err(CliError::Protocol(format!(
                "ground-truth frame {} appears more than once",
                f.frame_index
            )));
        }
    }

    let mut labels = Vec::with_capacity(clouds.len());
    let mut reports = Vec::with_capacity(clouds.len());
    let (mut contained, mut total) = (0, 0);
    for cloud in &clouds {
        let gt = truth.get(&cloud.frame_index).ok_or_else(|| {
            CliError::Protocol(format!(
                "point cloud for frame {} has no ground-truth frame",
                cloud.frame_index
            ))
        })?;
        let out = run_pipeline(cloud, &config)?;
        labels.push(build_label_assignment(&out.bev, cloud.frame_index, gt, config.anchor));
        let report = erf_report(cloud, &out, gt, config.anchor);
        contained += report.contained;
        total += report.total;
        if args.verbose {
            eprintln!(
                "frame {}: {} bev cells, {}/{} contained",
                cloud.frame_index,
                out.bev.len(),
                report.contained,
                report.total
            );
        }
        reports.push(FrameErf {
            frame_index: cloud.frame_index,
            report,
        });
    }
    write_text(&args.out, &to_jsonl_string(&labels))?;
    if let Some(path) = &args.erf_report {
        write_text(path, &to_jsonl_string(&reports))?;
    }
    let positives: usize = labels.iter().map(|l| l.positives.len()).sum();
    let coverage = if total == 0 {
        1.0
    } else {
        contained as f64 / total as f64
    };
    println!(
        "frames {} positives {} erf {}/{} ({:.2}%)",
        labels.len(),
        positives,
        contained,
        total,
        100.0 * coverage
    );
    Ok(())
}
