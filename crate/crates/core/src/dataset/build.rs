use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_splits, assign_splits, extract_instances, select_motion_changes, DatasetError, MotionChangeSelection,
    PredictionInstance, Split, SplitConfig, TaskConfig, DEFAULT_MOTION_THRESHOLD,
};
use crate::camera::{crop_for_box, Box3D, CameraModel, DEFAULT_CROP_FACTOR};
use crate::trajectory::{match_camera_frames, resample_track, KinematicsConfig, RawTrack, ResampleMode};

/// A camera frame the pedestrian may appear in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_token: String,
    pub timestamp_us: i64,
    /// Calibration and pose at capture time; without it no crop is computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraModel>,
}

/// One line of a raw tracks file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTrackRecord {
    #[serde(flatten)]
    pub track: RawTrack,
    /// `test` marks agents from the held-out source split. Anything else is
    /// split into train/val here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<FrameRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    pub task: TaskConfig,
    pub split: SplitConfig,
    pub resample: ResampleMode,
    pub max_match_gap_us: i64,
    pub crop_factor: f64,
    pub motion_threshold_m: f64,
    pub selection_seed: u64,
    pub kinematics: KinematicsConfig,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            task: TaskConfig::default(),
            split: SplitConfig::default(),
            resample: ResampleMode::AntiCausal,
            max_match_gap_us: 60_000,
            crop_factor: DEFAULT_CROP_FACTOR,
            motion_threshold_m: DEFAULT_MOTION_THRESHOLD,
            selection_seed: 0,
            kinematics: KinematicsConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    /// Every instance, sorted by id.
    pub full: Vec<PredictionInstance>,
    pub selection: MotionChangeSelection,
    pub skipped_tracks: usize,
}

fn track_instances(rec: &RawTrackRecord, cfg: &BuildConfig) -> Result<Vec<PredictionInstance>, DatasetError> {
    rec.track.validate()?;
    if rec.track.samples.len() < 2 {
        return Ok(Vec::new());
    }
    let mut resampled = resample_track(&rec.track, cfg.task.rate_hz, cfg.resample)?;
    if !rec.frames.is_empty() {
        let mut frames: Vec<&FrameRecord> = rec.frames.iter().collect();
        frames.sort_by_key(|f| f.timestamp_us);
        let stamps: Vec<(String, i64)> = frames.iter().map(|f| (f.frame_token.clone(), f.timestamp_us)).collect();
        resampled = match_camera_frames(&resampled, &stamps, cfg.max_match_gap_us);
        let by_token: BTreeMap<&str, &FrameRecord> = frames.iter().map(|f| (f.frame_token.as_str(), *f)).collect();
        for step in &mut resampled.steps {
            let Some(fref) = step.frame_ref.as_mut() else { continue };
            let Some(cam) = by_token.get(fref.frame_token.as_str()).and_then(|f| f.camera.as_ref()) else { continue };
            let Some((center, size, yaw)) = rec.track.box_at(fref.frame_timestamp_us, cfg.resample) else { continue };
            fref.crop = Box3D::new(center, size, yaw)
                .and_then(|b| crop_for_box(cam, &b, cfg.crop_factor))
                .map_err(|e| log::debug!("no crop for {} at {}: {e}", rec.track.agent_id, fref.frame_token))
                .ok();
        }
    }
    Ok(extract_instances(&resampled, &cfg.task, &cfg.kinematics))
}

/// Resamples every track, cuts instances, assigns agent-level splits and
/// builds the motion-changes variant.
pub fn build_dataset(records: &[RawTrackRecord], cfg: &BuildConfig) -> Result<BuildOutput, DatasetError> {
    cfg.task.validate()?;
    cfg.split.validate()?;

    let per_track: Vec<Result<Vec<PredictionInstance>, DatasetError>> =
        records.par_iter().map(|r| track_instances(r, cfg)).collect();
    let mut full = Vec::new();
    let mut skipped = 0;
    for r in per_track {
        let inst = r?;
        if inst.is_empty() {
            skipped += 1;
        }
        full.extend(inst);
    }
    full.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));

    let test_agents: BTreeSet<&str> = records
        .iter()
        .filter(|r| r.split == Some(Split::Test))
        .map(|r| r.track.agent_id.as_str())
        .collect();
    let pool: Vec<String> = records
        .iter()
        .map(|r| r.track.agent_id.as_str())
        .filter(|a| !test_agents.contains(a))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    let mut splits = assign_splits(&pool, &cfg.split);
    splits.extend(test_agents.iter().map(|a| (a.to_string(), Split::Test)));
    apply_splits(&mut full, &splits);

    let selection = select_motion_changes(&mut full, cfg.motion_threshold_m, cfg.selection_seed);
    Ok(BuildOutput { full, selection, skipped_tracks: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{CameraView, RawSample};
    use nalgebra::{Matrix3, Vector3};

    fn record(agent: &str, view: CameraView, split: Option<Split>, with_frames: bool) -> RawTrackRecord {
        let samples = (0..11)
            .map(|k| RawSample {
                timestamp_us: k * 500_000,
                position: [10.0 + 0.7 * k as f64, 2.0, 0.9],
                box_size: [0.6, 0.6, 1.8],
                yaw: 0.0,
            })
            .collect();
        // Camera at the origin looking along +x with world z up.
        let rot = Matrix3::new(0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0);
        let cam = CameraModel::new(1266.0, 1266.0, 816.0, 491.0, rot, Vector3::zeros(), (1600, 900)).unwrap();
        let frames = if with_frames {
            (0..100)
                .map(|k| FrameRecord {
                    frame_token: format!("{agent}-f{k}"),
                    timestamp_us: k * 50_000 + 7_000,
                    camera: Some(cam.clone()),
                })
                .collect()
        } else {
            vec![]
        };
        RawTrackRecord { track: RawTrack { agent_id: agent.into(), camera_view: view, samples }, split, frames }
    }

    #[test]
    fn builds_instances_with_crops_and_splits() {
        let recs = vec![
            record("a", CameraView::Front, None, true),
            record("a", CameraView::FrontLeft, None, false),
            record("b", CameraView::Front, Some(Split::Test), true),
            record("c", CameraView::Front, None, false),
        ];
        let out = build_dataset(&recs, &BuildConfig::default()).unwrap();
        // 5 s at 10 Hz = 51 steps -> windows at 0, 5, 10.
        assert_eq!(out.full.len(), 12);
        let a_splits: BTreeSet<Split> = out.full.iter().filter(|i| i.agent_id == "a").map(|i| i.split).collect();
        assert_eq!(a_splits.len(), 1);
        assert!(out.full.iter().filter(|i| i.agent_id == "b").all(|i| i.split == Split::Test));

        let with_crops = out.full.iter().find(|i| i.agent_id == "a" && i.camera_view == CameraView::Front).unwrap();
        let c = with_crops.crop_refs[0].as_ref().unwrap();
        assert!(c.side > 0.0);
        assert!(c.frame_token.starts_with("a-f"));
        let without = out.full.iter().find(|i| i.camera_view == CameraView::FrontLeft).unwrap();
        assert!(without.crop_refs.iter().all(Option::is_none));

        let again = build_dataset(&recs, &BuildConfig::default()).unwrap();
        assert_eq!(out.full, again.full);
    }

    #[test]
    fn raw_record_wire_format() {
        let rec = record("z", CameraView::Back, Some(Split::Test), false);
        let line = serde_json::to_string(&rec).unwrap();
        assert!(line.contains("\"split\":\"test\""));
        let back: RawTrackRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(rec, back);
    }
}
