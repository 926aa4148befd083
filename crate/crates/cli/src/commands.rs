use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pedbench::dataset::{audit_leakage, build_dataset as build, read_jsonl, BuildOutput, LeakageReport, RawTrackRecord};
use pedbench::metrics::{evaluate as score, predict_all, render_text, EvalOptions};
use pedbench::predictors::{calibrate_covariance, Baseline, KinematicPredictor, ScheduleSource};
use pedbench::synth::generate_corpus;
use pedbench::trajectory::resample_track;
use pedbench::{MultimodalPrediction, PredictionInstance, ReportTable, Split};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{RunConfig, Variant};
use crate::error::CliError;
use crate::output::Staging;

const DEFAULT_OUT: &str = "pedbench-out";

/// Opens the output directory and stages the resolved config as `config.toml`.
fn stage(cfg: &RunConfig) -> Result<Staging, CliError> {
    let dir = cfg.paths.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut staging = Staging::new(&dir)?;
    staging.write_text("config.toml", &cfg.to_toml())?;
    Ok(staging)
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| CliError::usage(format!("{flag} is required (flag or [paths] in the config)")))
}

fn finish(staging: Staging) -> Result<(), CliError> {
    for p in staging.commit()? {
        println!("{}", p.display());
    }
    Ok(())
}

fn split_counts(instances: &[PredictionInstance]) -> BTreeMap<&'static str, usize> {
    let mut counts: BTreeMap<&'static str, usize> =
        [Split::Train, Split::Val, Split::Test].iter().map(|s| (s.as_str(), 0)).collect();
    for i in instances {
        *counts.entry(i.split.as_str()).or_default() += 1;
    }
    counts
}

fn build_summary(cfg: &RunConfig, n_tracks: usize, out: &BuildOutput) -> Value {
    json!({
        "config": cfg.as_json(),
        "counts": {
            "tracks": n_tracks,
            "skipped_tracks": out.skipped_tracks,
            "full": out.full.len(),
            "flagged": out.selection.flagged,
            "sampled": out.selection.sampled,
            "motion_changes": out.selection.variant.len(),
            "insufficient_remainder": out.selection.insufficient_remainder,
            "splits": split_counts(&out.full),
        },
    })
}

fn stage_instances(staging: &mut Staging, out: &BuildOutput) -> Result<(), CliError> {
    staging.write_jsonl(&format!("{}.jsonl", Variant::Full.as_str()), &out.full)?;
    staging.write_jsonl(&format!("{}.jsonl", Variant::MotionChanges.as_str()), &out.selection.variant)
}

pub fn build_dataset(cfg: &RunConfig) -> Result<(), CliError> {
    let raw = required(&cfg.paths.raw, "--raw")?;
    let records: Vec<RawTrackRecord> = read_jsonl(raw)?;
    let out = build(&records, &cfg.build_config())?;
    log::info!("{} tracks -> {} instances, {} flagged", records.len(), out.full.len(), out.selection.flagged);

    let mut staging = stage(cfg)?;
    stage_instances(&mut staging, &out)?;
    staging.write_json("build.json", &build_summary(cfg, records.len(), &out))?;
    finish(staging)
}

pub fn synth_gen(cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = generate_corpus(cfg.synth.n, &cfg.corpus_template(), cfg.synth.seed)?;

    let mut staging = stage(cfg)?;
    staging.write_jsonl("raw_tracks.jsonl", &corpus.records)?;
    stage_instances(&mut staging, &corpus.build)?;
    staging.write_json("build.json", &build_summary(cfg, corpus.records.len(), &corpus.build))?;
    staging.write_json("scripts.json", &json!({ "config": cfg.as_json(), "scripts": corpus.scripts }))?;
    finish(staging)
}

/// The instance file to score and the file whose val split calibrates the
/// covariances: `full.jsonl` next to it when present, else the file itself.
fn instance_files(cfg: &RunConfig) -> Result<(PathBuf, PathBuf), CliError> {
    let given = required(&cfg.paths.instances, "--instances")?;
    let full_name = format!("{}.jsonl", Variant::Full.as_str());
    let file = if given.is_dir() { given.join(format!("{}.jsonl", cfg.eval.variant.as_str())) } else { given.to_path_buf() };
    let sibling = file.parent().map(|d| d.join(&full_name)).filter(|p| p.is_file());
    let calib = sibling.unwrap_or_else(|| file.clone());
    Ok((file, calib))
}

pub fn evaluate(cfg: &RunConfig, predictor: Option<&str>) -> Result<(), CliError> {
    let (inst_path, calib_path) = instance_files(cfg)?;
    let mut instances: Vec<PredictionInstance> = read_jsonl(&inst_path)?;
    if let Some(split) = cfg.eval.split {
        instances.retain(|i| i.split == split);
    }
    instances.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    let opts = EvalOptions {
        horizons: cfg.eval.horizons.clone(),
        rate_hz: cfg.task.rate_hz,
        convention: cfg.eval.convention,
        variant: cfg.eval.variant.as_str().to_string(),
    };

    let (name, unimodal, mut predictions, source) = match &cfg.paths.predictions {
        Some(path) => {
            let preds: Vec<MultimodalPrediction> = read_jsonl(path)?;
            let name = predictor
                .map(str::to_string)
                .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "external".into());
            let unimodal = !preds.is_empty() && preds.iter().all(|p| p.modes.len() == 1);
            (name, unimodal, preds, json!({ "kind": "external", "predictions": path }))
        }
        None => {
            let name = predictor.ok_or_else(|| CliError::usage("one of --predictor or --predictions is required"))?;
            let baseline = Baseline::from_name(name, cfg.da, &cfg.ensemble)?;
            let (model, calibration) = match cfg.ensemble.schedule_source {
                ScheduleSource::Default => (
                    KinematicPredictor::with_default_schedules(baseline, cfg.task.future_steps(), cfg.task.dt()),
                    json!({ "schedule": "default" }),
                ),
                ScheduleSource::Calibrated => {
                    let mut val: Vec<PredictionInstance> = read_jsonl(&calib_path)?;
                    val.retain(|i| i.split == Split::Val);
                    let schedules = calibrate_covariance(&val, &baseline, &cfg.kinematics)?;
                    let calibration = json!({
                        "schedule": "calibrated",
                        "file": calib_path,
                        "n_val": val.len(),
                        "variances": schedules.per_slot,
                    });
                    (KinematicPredictor::new(baseline, schedules), calibration)
                }
            };
            let model = KinematicPredictor { kinematics: cfg.kinematics, ..model };
            let preds = predict_all(&model, &instances);
            (name.to_ascii_lowercase(), model.baseline.is_unimodal(), preds, json!({ "kind": "built-in", "calibration": calibration }))
        }
    };
    let table = score(&instances, &predictions, &name, unimodal, &opts)?;
    predictions.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));

    let mut staging = stage(cfg)?;
    staging.write_json(
        "report.json",
        &json!({
            "config": cfg.as_json(),
            "predictor": name,
            "instances": inst_path,
            "source": source,
            "report": table.to_json(),
        }),
    )?;
    staging.write_text("report.txt", &render_text(std::slice::from_ref(&table)))?;
    if cfg.paths.predictions.is_none() {
        staging.write_jsonl("predictions.jsonl", &predictions)?;
    }
    finish(staging)
}

pub fn leakage_audit(cfg: &RunConfig) -> Result<(), CliError> {
    let raw = required(&cfg.paths.raw, "--raw")?;
    let records: Vec<RawTrackRecord> = read_jsonl(raw)?;
    let entries = records
        .par_iter()
        .filter(|r| r.track.samples.len() >= 2)
        .map(|r| {
            r.track.validate()?;
            let resampled = resample_track(&r.track, cfg.task.rate_hz, cfg.build.resample)?;
            Ok(audit_leakage(&r.track, &resampled, &cfg.onset))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let skipped = records.len() - entries.len();
    let report = LeakageReport::from_entries(entries);
    log::info!("{} tracks audited, {} with positive lead", report.summary.n_tracks, report.summary.n_positive);

    let mut staging = stage(cfg)?;
    staging.write_json(
        "leakage.json",
        &json!({
            "config": cfg.as_json(),
            "resample": cfg.build.resample,
            "skipped_tracks": skipped,
            "summary": report.summary,
            "entries": report.entries,
        }),
    )?;
    finish(staging)
}

/// Reads an evaluate `report.json`, or a directory holding one.
fn read_report(path: &Path) -> Result<(PathBuf, Value), CliError> {
    let file = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::new("MalformedRecord", format!("{}: {e}", file.display())))?;
    Ok((file, v))
}

pub fn report(cfg: &RunConfig, inputs: &[PathBuf]) -> Result<(), CliError> {
    let mut tables = Vec::new();
    let mut sources = Vec::new();
    for input in inputs {
        let (file, v) = read_report(input)?;
        let table = v.get("report").ok_or_else(|| {
            CliError::new("MalformedRecord", format!("{}: no \"report\" key", file.display()))
        })?;
        tables.push(ReportTable::from_json(table)?);
        sources.push(json!({
            "file": file,
            "predictor": v.get("predictor").cloned().unwrap_or(Value::Null),
            "config": v.get("config").cloned().unwrap_or(Value::Null),
        }));
    }
    let merged = ReportTable::merge(&tables)?;

    let mut staging = stage(cfg)?;
    staging.write_json(
        "report.json",
        &json!({
            "config": cfg.as_json(),
            "sources": sources,
            "tables": merged.iter().map(ReportTable::to_json).collect::<Vec<_>>(),
        }),
    )?;
    staging.write_text("table.txt", &render_text(&merged))?;
    finish(staging)
}
