//! Prediction instances and the policies that shape the benchmark datasets.

mod build;
mod io;
mod leakage;

pub use build::{build_dataset, BuildConfig, BuildOutput, FrameRecord, RawTrackRecord};
pub use io::{read_instances, read_jsonl, read_jsonl_from, write_instances, write_jsonl, write_jsonl_to};
pub use leakage::{audit_leakage, detect_onset, LeakageEntry, LeakageReport, LeakageSummary, OnsetConfig};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::camera::SquareCrop;
use crate::numeric;
use crate::predictors::predict_cv;
use crate::trajectory::{estimate_kinematics_with, step_us, CameraView, KinematicsConfig, ResampledTrack, TimedPoint, TrajectoryError};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid task config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

impl DatasetError {
    pub fn kind(&self) -> &'static str {
        match self {
            DatasetError::MalformedRecord { .. } => "MalformedRecord",
            DatasetError::Io { .. } => "Io",
            DatasetError::InvalidConfig(_) => "InvalidConfig",
            DatasetError::Trajectory(e) => e.kind(),
        }
    }
}

/// Window lengths of the prediction task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    pub history_duration_s: f64,
    pub future_duration_s: f64,
    pub rate_hz: f64,
    /// Steps between consecutive window starts.
    pub window_stride: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self { history_duration_s: 1.0, future_duration_s: 3.0, rate_hz: 10.0, window_stride: 5 }
    }
}

impl TaskConfig {
    fn steps_for(&self, duration: f64, what: &str) -> Result<usize, DatasetError> {
        let n = duration * self.rate_hz;
        if !(duration > 0.0) || (n - n.round()).abs() > 1e-9 || n.round() < 1.0 {
            return Err(DatasetError::InvalidConfig(format!(
                "{what} duration {duration} s is not a positive multiple of 1/{} s",
                self.rate_hz
            )));
        }
        Ok(n.round() as usize)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        step_us(self.rate_hz)?;
        self.steps_for(self.history_duration_s, "history")?;
        self.steps_for(self.future_duration_s, "future")?;
        if self.window_stride == 0 {
            return Err(DatasetError::InvalidConfig("window_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn history_steps(&self) -> usize {
        (self.history_duration_s * self.rate_hz).round() as usize
    }

    pub fn future_steps(&self) -> usize {
        (self.future_duration_s * self.rate_hz).round() as usize
    }

    pub fn window_steps(&self) -> usize {
        self.history_steps() + self.future_steps()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.rate_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "val" | "validation" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split '{other}'")),
        }
    }
}

/// Appearance crop attached to a history step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CropRef {
    pub frame_token: String,
    pub center_u: f64,
    pub center_v: f64,
    pub side: f64,
}

impl CropRef {
    pub fn new(frame_token: impl Into<String>, crop: &SquareCrop) -> Self {
        Self { frame_token: frame_token.into(), center_u: crop.center_u, center_v: crop.center_v, side: crop.side }
    }

    pub fn crop(&self) -> SquareCrop {
        SquareCrop { center_u: self.center_u, center_v: self.center_v, side: self.side }
    }
}

/// One history/future window cut from a resampled track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionInstance {
    pub instance_id: String,
    pub agent_id: String,
    pub camera_view: CameraView,
    pub split: Split,
    pub motion_change: bool,
    /// ADE of the constant-velocity prediction over the whole future, m.
    pub cv_ade: f64,
    pub history: Vec<TimedPoint>,
    pub future: Vec<TimedPoint>,
    pub crop_refs: Vec<Option<CropRef>>,
}

/// Stable identifier from (agent, view, window start).
pub fn instance_id(agent_id: &str, view: CameraView, start_us: i64) -> String {
    let mut h = Sha256::new();
    h.update(agent_id.as_bytes());
    h.update([0u8]);
    h.update(view.as_str().as_bytes());
    h.update([0u8]);
    h.update(start_us.to_le_bytes());
    hex::encode(&h.finalize()[..12])
}

/// Constant-velocity ADE over the future, using the same state estimate
/// and CV predictor the benchmark uses.
pub fn compute_cv_ade(history: &[TimedPoint], future: &[TimedPoint], kin: &KinematicsConfig) -> f64 {
    let Some(last) = history.last() else { return f64::NAN };
    let Ok(state) = estimate_kinematics_with(history, kin) else {
        return numeric::mean(future.iter().map(|g| (g.pos - last.pos).norm()));
    };
    let dt = if history.len() >= 2 {
        (history[history.len() - 1].t_us - history[history.len() - 2].t_us) as f64 * 1e-6
    } else {
        0.1
    };
    let pred = predict_cv(&state, future.len(), dt);
    numeric::mean(pred.iter().zip(future).map(|(p, g)| (p - g.pos).norm()))
}

/// Cuts sliding windows from `track`. Split defaults to train and the
/// motion-change flag to false; both are set by later stages.
pub fn extract_instances(
    track: &ResampledTrack,
    cfg: &TaskConfig,
    kin: &KinematicsConfig,
) -> Vec<PredictionInstance> {
    let (nh, nf) = (cfg.history_steps(), cfg.future_steps());
    let window = nh + nf;
    if track.steps.len() < window || cfg.window_stride == 0 {
        return Vec::new();
    }
    (0..=track.steps.len() - window)
        .step_by(cfg.window_stride)
        .map(|start| {
            let steps = &track.steps[start..start + window];
            let pts: Vec<TimedPoint> = steps.iter().map(|s| TimedPoint { t_us: s.timestamp_us, pos: s.position }).collect();
            let (history, future) = pts.split_at(nh);
            let crop_refs = steps[..nh]
                .iter()
                .map(|s| {
                    s.frame_ref
                        .as_ref()
                        .and_then(|r| r.crop.as_ref().map(|c| CropRef::new(r.frame_token.clone(), c)))
                })
                .collect();
            PredictionInstance {
                instance_id: instance_id(&track.agent_id, track.camera_view, steps[0].timestamp_us),
                agent_id: track.agent_id.clone(),
                camera_view: track.camera_view,
                split: Split::Train,
                motion_change: false,
                cv_ade: compute_cv_ade(history, future, kin),
                history: history.to_vec(),
                future: future.to_vec(),
                crop_refs,
            }
        })
        .collect()
}

pub const DEFAULT_MOTION_THRESHOLD: f64 = 0.5;

pub fn is_motion_change(cv_ade: f64, threshold: f64) -> bool {
    cv_ade >= threshold
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionChangeSelection {
    pub flagged: usize,
    pub sampled: usize,
    /// True when fewer unflagged instances existed than flagged ones.
    pub insufficient_remainder: bool,
    /// Flagged instances plus the random unflagged sample, sorted by id.
    pub variant: Vec<PredictionInstance>,
}

/// Flags instances whose CV ADE reaches `threshold` and builds the
/// motion-changes variant: every flagged instance plus an equal-size seeded
/// uniform sample of the rest.
pub fn select_motion_changes(
    instances: &mut [PredictionInstance],
    threshold: f64,
    seed: u64,
) -> MotionChangeSelection {
    for inst in instances.iter_mut() {
        inst.motion_change = is_motion_change(inst.cv_ade, threshold);
    }
    let mut flagged: Vec<&PredictionInstance> = instances.iter().filter(|i| i.motion_change).collect();
    let mut rest: Vec<&PredictionInstance> = instances.iter().filter(|i| !i.motion_change).collect();
    rest.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));

    let insufficient_remainder = rest.len() < flagged.len();
    if insufficient_remainder {
        log::warn!(
            "InsufficientRemainder: {} flagged instances but only {} unflagged; taking all unflagged",
            flagged.len(),
            rest.len()
        );
    }
    let amount = flagged.len().min(rest.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = index::sample(&mut rng, rest.len(), amount).into_vec();
    picks.sort_unstable();

    let n_flagged = flagged.len();
    flagged.extend(picks.iter().map(|&i| rest[i]));
    let mut variant: Vec<PredictionInstance> = flagged.into_iter().cloned().collect();
    variant.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    MotionChangeSelection { flagged: n_flagged, sampled: amount, insufficient_remainder, variant }
}

/// Train/validation ratio and seed for the agent-level split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train_val_ratio: (u32, u32),
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train_val_ratio: (7, 1), seed: 0 }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.train_val_ratio.0 == 0 || self.train_val_ratio.1 == 0 {
            return Err(DatasetError::InvalidConfig("split ratio components must be positive".into()));
        }
        Ok(())
    }
}

/// Shuffles the agents with the configured seed and sends the first
/// ceil(train/(train+val) * N) to train, the rest to validation. The result
/// does not depend on the input order.
pub fn assign_splits(agent_ids: &[String], cfg: &SplitConfig) -> BTreeMap<String, Split> {
    let mut ids: Vec<&String> = agent_ids.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut rng);
    let (a, b) = (cfg.train_val_ratio.0 as usize, cfg.train_val_ratio.1 as usize);
    let n = ids.len();
    let n_train = (a * n).div_ceil(a + b);
    ids.into_iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), if i < n_train { Split::Train } else { Split::Val }))
        .collect()
}

/// Sets each instance's split from its agent; unknown agents go to train.
pub fn apply_splits(instances: &mut [PredictionInstance], splits: &BTreeMap<String, Split>) {
    for inst in instances {
        inst.split = splits.get(&inst.agent_id).copied().unwrap_or(Split::Train);
    }
}
