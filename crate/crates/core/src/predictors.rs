//! Kinematic predictors and the multimodal prediction representation.
//!
//! Every predictor produces a [`MultimodalPrediction`]: a set of weighted
//! modes, each a future trajectory with a 2x2 covariance per step. The
//! unimodal baselines (constant velocity, decaying acceleration) are wrapped
//! into a single weight-1 mode so the same metrics apply to them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::PredictionInstance;
use crate::numeric;
use crate::trajectory::{estimate_kinematics_with, KinematicState, KinematicsConfig, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictorError {
    #[error("too few instances for calibration: need at least {needed}, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("invalid predictor config: {0}")]
    InvalidConfig(String),
    #[error("unknown predictor '{0}'")]
    UnknownPredictor(String),
}

impl PredictorError {
    pub fn kind(&self) -> &'static str {
        match self {
            PredictorError::TooFewInstances { .. } => "TooFewInstances",
            PredictorError::InvalidConfig(_) => "InvalidConfig",
            PredictorError::UnknownPredictor(_) => "UnknownPredictor",
        }
    }
}

/// Symmetric 2x2 covariance in m².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cov2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Cov2 {
    pub fn isotropic(var: f64) -> Self {
        Self { xx: var, xy: 0.0, yy: var }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { xx: self.xx * c, xy: self.xy * c, yy: self.yy * c }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Eigenvalues, smallest first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let r = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        (mean - r, mean + r)
    }

    /// Clamps tiny negative eigenvalues (round-off) to zero.
    pub fn clamp_psd(&self) -> Self {
        let (lo, hi) = self.eigenvalues();
        if lo >= 0.0 {
            return *self;
        }
        let hi = hi.max(0.0);
        // Project onto the eigenvector of the largest eigenvalue.
        let (vx, vy) = if self.xy.abs() > 0.0 {
            (hi - self.yy, self.xy)
        } else if self.xx >= self.yy {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let n2 = vx * vx + vy * vy;
        if n2 == 0.0 {
            return Cov2::default();
        }
        Cov2 { xx: hi * vx * vx / n2, xy: hi * vx * vy / n2, yy: hi * vy * vy / n2 }
    }
}

/// Tolerance on negative eigenvalues accepted as round-off.
pub const PSD_TOLERANCE: f64 = 1e-12;
/// Tolerance on the sum of mode weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeStep {
    pub t_us: i64,
    pub mean: Vec2,
    pub cov: Cov2,
}

impl Serialize for ModeStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.t_us, self.mean.x, self.mean.y, self.cov.xx, self.cov.xy, self.cov.yy).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModeStep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (t_us, x, y, xx, xy, yy) = <(i64, f64, f64, f64, f64, f64)>::deserialize(d)?;
        Ok(ModeStep { t_us, mean: Vec2::new(x, y), cov: Cov2 { xx, xy, yy } })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModePrediction {
    pub weight: f64,
    pub steps: Vec<ModeStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultimodalPrediction {
    pub instance_id: String,
    pub modes: Vec<ModePrediction>,
}

impl MultimodalPrediction {
    /// Index of the highest-weight mode; ties go to the lowest index.
    pub fn most_probable(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, m) in self.modes.iter().enumerate() {
            match best {
                Some(b) if self.modes[b].weight >= m.weight => {}
                _ => best = Some(i),
            }
        }
        best
    }

    /// Checks weights, covariances and timestamps. Returns a description of
    /// the first problem found.
    pub fn validate(&self) -> Result<(), String> {
        if self.modes.is_empty() {
            return Err("prediction has no modes".into());
        }
        let mut total = 0.0;
        for (k, m) in self.modes.iter().enumerate() {
            if !(0.0..=1.0).contains(&m.weight) {
                return Err(format!("mode {k}: weight {} outside [0, 1]", m.weight));
            }
            total += m.weight;
            if m.steps.len() != self.modes[0].steps.len() {
                return Err(format!("mode {k}: step count differs from mode 0"));
            }
            for (j, s) in m.steps.iter().enumerate() {
                if s.t_us != self.modes[0].steps[j].t_us {
                    return Err(format!("mode {k} step {j}: timestamp differs from mode 0"));
                }
                let finite = [s.mean.x, s.mean.y, s.cov.xx, s.cov.xy, s.cov.yy].iter().all(|v| v.is_finite());
                if !finite {
                    return Err(format!("mode {k} step {j}: non-finite value"));
                }
                if s.cov.eigenvalues().0 < -PSD_TOLERANCE {
                    return Err(format!("mode {k} step {j}: covariance not positive semi-definite"));
                }
            }
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(format!("mode weights sum to {total}, expected 1"));
        }
        Ok(())
    }

    pub fn clamp_covariances(&mut self) {
        for m in &mut self.modes {
            for s in &mut m.steps {
                s.cov = s.cov.clamp_psd();
            }
        }
    }
}

/// Per-step isotropic variance for one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSchedule {
    pub variances: Vec<f64>,
}

/// Lower bound on calibrated variances, m².
pub const VARIANCE_FLOOR: f64 = 0.01;

impl CovarianceSchedule {
    /// Uncalibrated fallback: standard deviation growing as 0.1 m + 0.25 m/s.
    pub fn default_for(horizon_steps: usize, dt: f64) -> Self {
        let variances = (1..=horizon_steps)
            .map(|k| (0.1 + 0.25 * k as f64 * dt).powi(2).max(VARIANCE_FLOOR))
            .collect();
        Self { variances }
    }

    pub fn constant(horizon_steps: usize, var: f64) -> Self {
        Self { variances: vec![var; horizon_steps] }
    }

    fn at(&self, k: usize) -> f64 {
        self.variances.get(k).or(self.variances.last()).copied().unwrap_or(VARIANCE_FLOOR)
    }
}

/// One covariance schedule per mode slot of a predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSchedules {
    pub per_slot: Vec<CovarianceSchedule>,
}

impl ModeSchedules {
    pub fn uniform(slots: usize, schedule: CovarianceSchedule) -> Self {
        Self { per_slot: vec![schedule; slots] }
    }

    pub fn slot(&self, slot: usize) -> &CovarianceSchedule {
        &self.per_slot[slot.min(self.per_slot.len() - 1)]
    }
}

/// Decaying-acceleration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DaParams {
    /// Decay rate of the initial acceleration, 1/s.
    pub lambda: f64,
}

impl Default for DaParams {
    fn default() -> Self {
        Self { lambda: 5.5 }
    }
}

impl DaParams {
    pub fn validate(&self) -> Result<(), PredictorError> {
        if self.lambda > 0.0 && self.lambda.is_finite() {
            Ok(())
        } else {
            Err(PredictorError::InvalidConfig(format!("lambda must be positive, got {}", self.lambda)))
        }
    }
}

/// Constant-velocity means at `dt, 2dt, ..., horizon_steps * dt`.
pub fn predict_cv(state: &KinematicState, horizon_steps: usize, dt: f64) -> Vec<Vec2> {
    (1..=horizon_steps)
        .map(|k| state.position + state.velocity * (k as f64 * dt))
        .collect()
}

/// Displacement under acceleration `a0 * exp(-lambda t)` starting from zero
/// velocity, integrated twice in closed form.
fn decayed_displacement(a0: f64, lambda: f64, t: f64) -> f64 {
    a0 / lambda * t - a0 / (lambda * lambda) * (-(-lambda * t).exp_m1())
}

/// Decaying-acceleration means: the acceleration starts at the observed
/// value and decays exponentially, so short-term motion follows constant
/// acceleration and long-term motion constant velocity.
pub fn predict_da(state: &KinematicState, params: &DaParams, horizon_steps: usize, dt: f64) -> Vec<Vec2> {
    (1..=horizon_steps)
        .map(|k| {
            let t = k as f64 * dt;
            let dx = decayed_displacement(state.acceleration.x, params.lambda, t);
            let dy = decayed_displacement(state.acceleration.y, params.lambda, t);
            state.position + state.velocity * t + Vec2::new(dx, dy)
        })
        .collect()
}

/// Single weight-1 mode with covariances from `schedule`.
pub fn wrap_unimodal(
    instance_id: &str,
    trajectory: &[Vec2],
    timestamps: &[i64],
    schedule: &CovarianceSchedule,
) -> MultimodalPrediction {
    MultimodalPrediction {
        instance_id: instance_id.to_string(),
        modes: vec![build_mode(1.0, trajectory, timestamps, schedule)],
    }
}

fn build_mode(weight: f64, means: &[Vec2], timestamps: &[i64], schedule: &CovarianceSchedule) -> ModePrediction {
    ModePrediction {
        weight,
        steps: means
            .iter()
            .zip(timestamps)
            .enumerate()
            .map(|(k, (m, &t_us))| ModeStep { t_us, mean: *m, cov: Cov2::isotropic(schedule.at(k)) })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleSource {
    #[default]
    Calibrated,
    Default,
}

/// Rule-based five-mode ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Speeds below this select the slow-regime weight table, m/s.
    pub speed_gate: f64,
    /// Target speed of the walk-initiation mode, m/s.
    pub walk_speed: f64,
    /// Deceleration of the stopping mode, m/s².
    pub stop_decel: f64,
    /// Weights for [stationary, cv, da, walk, stop] when slow.
    pub slow_weights: [f64; 5],
    /// Weights for [stationary, cv, da, walk, stop] when moving.
    pub moving_weights: [f64; 5],
    pub da: DaParams,
    pub schedule_source: ScheduleSource,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            speed_gate: 0.25,
            walk_speed: 1.4,
            stop_decel: 2.0,
            slow_weights: [0.55, 0.10, 0.10, 0.20, 0.05],
            moving_weights: [0.05, 0.40, 0.25, 0.10, 0.20],
            da: DaParams::default(),
            schedule_source: ScheduleSource::Calibrated,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), PredictorError> {
        self.da.validate()?;
        for (name, table) in [("slow_weights", &self.slow_weights), ("moving_weights", &self.moving_weights)] {
            if table.iter().any(|w| !(0.0..=1.0).contains(w)) {
                return Err(PredictorError::InvalidConfig(format!("{name} entries must lie in [0, 1]")));
            }
            let s: f64 = table.iter().sum();
            if (s - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(PredictorError::InvalidConfig(format!("{name} sums to {s}, expected 1")));
            }
        }
        if !(self.stop_decel > 0.0) || !(self.walk_speed >= 0.0) || !(self.speed_gate >= 0.0) {
            return Err(PredictorError::InvalidConfig("speeds and deceleration must be non-negative".into()));
        }
        Ok(())
    }
}

/// Slot indices of the ensemble modes.
pub mod ensemble_slot {
    pub const STATIONARY: usize = 0;
    pub const CV: usize = 1;
    pub const DA: usize = 2;
    pub const WALK: usize = 3;
    pub const STOP: usize = 4;
}

/// Mode means before covariances are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotMode {
    pub slot: usize,
    pub weight: f64,
    pub means: Vec<Vec2>,
}

fn ensemble_modes(state: &KinematicState, cfg: &EnsembleConfig, horizon_steps: usize, dt: f64) -> Vec<SlotMode> {
    use ensemble_slot::*;
    let table = if state.speed < cfg.speed_gate { &cfg.slow_weights } else { &cfg.moving_weights };
    let times: Vec<f64> = (1..=horizon_steps).map(|k| k as f64 * dt).collect();
    let along = |dir: Vec2, dist: &dyn Fn(f64) -> f64| -> Vec<Vec2> {
        times.iter().map(|&t| state.position + dir * dist(t)).collect()
    };

    let mut modes = vec![
        SlotMode { slot: STATIONARY, weight: table[STATIONARY], means: vec![state.position; horizon_steps] },
        SlotMode { slot: CV, weight: table[CV], means: predict_cv(state, horizon_steps, dt) },
        SlotMode { slot: DA, weight: table[DA], means: predict_da(state, &cfg.da, horizon_steps, dt) },
    ];

    match state.heading.or(state.drift_heading) {
        Some(h) => {
            let dir = Vec2::new(h.cos(), h.sin());
            let s0 = state.velocity.dot(&dir).max(0.0);
            let lambda = cfg.da.lambda;
            let gain = cfg.walk_speed - s0;
            // Speed relaxes from s0 to walk_speed with the decaying profile.
            let dist = move |t: f64| s0 * t + gain * (t + (-lambda * t).exp_m1() / lambda);
            modes.push(SlotMode { slot: WALK, weight: table[WALK], means: along(dir, &dist) });
        }
        None => modes[STATIONARY].weight += table[WALK],
    }

    let stop_means = if state.speed > 0.0 {
        let dir = state.velocity / state.speed;
        let (s, a) = (state.speed, cfg.stop_decel);
        let t_stop = s / a;
        let dist = move |t: f64| if t < t_stop { s * t - 0.5 * a * t * t } else { s * s / (2.0 * a) };
        along(dir, &dist)
    } else {
        vec![state.position; horizon_steps]
    };
    modes.push(SlotMode { slot: STOP, weight: table[STOP], means: stop_means });

    let total: f64 = modes.iter().map(|m| m.weight).sum();
    if total > 0.0 {
        for m in &mut modes {
            m.weight /= total;
        }
    }
    modes
}

/// Five-mode ensemble prediction (four modes when no heading can be
/// estimated; the walk-initiation weight then moves to the stationary mode).
pub fn predict_ensemble(
    instance_id: &str,
    state: &KinematicState,
    cfg: &EnsembleConfig,
    schedules: &ModeSchedules,
    timestamps: &[i64],
    dt: f64,
) -> MultimodalPrediction {
    let modes = ensemble_modes(state, cfg, timestamps.len(), dt)
        .into_iter()
        .map(|m| build_mode(m.weight, &m.means, timestamps, schedules.slot(m.slot)))
        .collect();
    MultimodalPrediction { instance_id: instance_id.to_string(), modes }
}

/// The built-in kinematic models.
#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Cv,
    Da(DaParams),
    Ensemble(EnsembleConfig),
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Cv => "cv",
            Baseline::Da(_) => "da",
            Baseline::Ensemble(_) => "ensemble",
        }
    }

    pub fn slots(&self) -> usize {
        match self {
            Baseline::Cv | Baseline::Da(_) => 1,
            Baseline::Ensemble(_) => 5,
        }
    }

    pub fn is_unimodal(&self) -> bool {
        self.slots() == 1
    }

    pub fn modes(&self, state: &KinematicState, horizon_steps: usize, dt: f64) -> Vec<SlotMode> {
        match self {
            Baseline::Cv => vec![SlotMode { slot: 0, weight: 1.0, means: predict_cv(state, horizon_steps, dt) }],
            Baseline::Da(p) => vec![SlotMode { slot: 0, weight: 1.0, means: predict_da(state, p, horizon_steps, dt) }],
            Baseline::Ensemble(cfg) => ensemble_modes(state, cfg, horizon_steps, dt),
        }
    }

    /// Builds a baseline by name with the given parameters.
    pub fn from_name(name: &str, da: DaParams, ensemble: &EnsembleConfig) -> Result<Self, PredictorError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "cv" => Ok(Baseline::Cv),
            "da" => Ok(Baseline::Da(da)),
            "ensemble" => Ok(Baseline::Ensemble(ensemble.clone())),
            other => Err(PredictorError::UnknownPredictor(other.to_string())),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = PredictorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Baseline::from_name(s, DaParams::default(), &EnsembleConfig::default())
    }
}

/// Anything that turns a prediction instance into a multimodal prediction.
pub trait Predictor: Sync {
    fn name(&self) -> &str;
    /// Unimodal predictors are scored with the RMS row only.
    fn is_unimodal(&self) -> bool;
    fn predict(&self, instance: &PredictionInstance) -> MultimodalPrediction;
}

/// Kinematic state of an instance's history, or a stationary state at the
/// last point if the history is too short.
pub fn instance_state(instance: &PredictionInstance, cfg: &KinematicsConfig) -> KinematicState {
    let last = instance.history.last().copied().unwrap_or_else(|| crate::trajectory::TimedPoint::new(0, 0.0, 0.0));
    estimate_kinematics_with(&instance.history, cfg).unwrap_or_else(|_| KinematicState::stationary(last.t_us, last.pos))
}

/// Time step of an instance in seconds.
pub fn instance_dt(instance: &PredictionInstance) -> f64 {
    match (instance.history.len(), instance.future.first(), instance.history.last()) {
        (n, _, _) if n >= 2 => (instance.history[n - 1].t_us - instance.history[n - 2].t_us) as f64 * 1e-6,
        (_, Some(f), Some(h)) => (f.t_us - h.t_us) as f64 * 1e-6,
        _ => 0.1,
    }
}

/// Timestamps the predictor should emit: one per future step, continuing
/// the history grid.
pub fn future_timestamps(instance: &PredictionInstance) -> Vec<i64> {
    let dt_us = (instance_dt(instance) * 1e6).round() as i64;
    let last = instance.history.last().map(|p| p.t_us).unwrap_or(0);
    (1..=instance.future.len() as i64).map(|k| last + k * dt_us).collect()
}

/// A baseline with its covariance schedules.
#[derive(Debug, Clone)]
pub struct KinematicPredictor {
    pub baseline: Baseline,
    pub schedules: ModeSchedules,
    pub kinematics: KinematicsConfig,
}

impl KinematicPredictor {
    pub fn new(baseline: Baseline, schedules: ModeSchedules) -> Self {
        Self { baseline, schedules, kinematics: KinematicsConfig::default() }
    }

    /// Uses the uncalibrated default schedule for every slot.
    pub fn with_default_schedules(baseline: Baseline, horizon_steps: usize, dt: f64) -> Self {
        let slots = baseline.slots();
        Self::new(baseline, ModeSchedules::uniform(slots, CovarianceSchedule::default_for(horizon_steps, dt)))
    }
}

impl Predictor for KinematicPredictor {
    fn name(&self) -> &str {
        self.baseline.name()
    }

    fn is_unimodal(&self) -> bool {
        self.baseline.is_unimodal()
    }

    fn predict(&self, instance: &PredictionInstance) -> MultimodalPrediction {
        let state = instance_state(instance, &self.kinematics);
        let timestamps = future_timestamps(instance);
        let dt = instance_dt(instance);
        let modes = self
            .baseline
            .modes(&state, timestamps.len(), dt)
            .into_iter()
            .map(|m| build_mode(m.weight, &m.means, &timestamps, self.schedules.slot(m.slot)))
            .collect();
        MultimodalPrediction { instance_id: instance.instance_id.clone(), modes }
    }
}

pub const MIN_CALIBRATION_INSTANCES: usize = 50;

/// Fits per-slot isotropic variance schedules on validation instances.
///
/// For each slot and step, the variance is the mean squared per-axis
/// residual over the instances where that slot was the closest mode (by
/// ADE over the whole future). A slot that is never closest falls back to
/// every instance where it was produced. Results are floored at
/// [`VARIANCE_FLOOR`] and made non-decreasing in time.
pub fn calibrate_covariance(
    val_instances: &[PredictionInstance],
    baseline: &Baseline,
    kinematics: &KinematicsConfig,
) -> Result<ModeSchedules, PredictorError> {
    if val_instances.len() < MIN_CALIBRATION_INSTANCES {
        return Err(PredictorError::TooFewInstances {
            needed: MIN_CALIBRATION_INSTANCES,
            got: val_instances.len(),
        });
    }
    let horizon = val_instances.iter().map(|i| i.future.len()).max().unwrap_or(0);
    let slots = baseline.slots();
    // [slot][step] -> per-axis squared residuals
    let mut closest: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); horizon]; slots];
    let mut any: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); horizon]; slots];

    for inst in val_instances {
        let state = instance_state(inst, kinematics);
        let modes = baseline.modes(&state, inst.future.len(), instance_dt(inst));
        let ades: Vec<f64> = modes
            .iter()
            .map(|m| numeric::mean(m.means.iter().zip(&inst.future).map(|(p, g)| (p - g.pos).norm())))
            .collect();
        let best = ades
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (i, &a)| match acc {
                Some((_, b)) if b <= a => acc,
                _ => Some((i, a)),
            })
            .map(|(i, _)| i);
        for (mi, m) in modes.iter().enumerate() {
            for (k, (p, g)) in m.means.iter().zip(&inst.future).enumerate() {
                let r = p - g.pos;
                let sq = 0.5 * (r.x * r.x + r.y * r.y);
                any[m.slot][k].push(sq);
                if Some(mi) == best {
                    closest[m.slot][k].push(sq);
                }
            }
        }
    }

    let per_slot = (0..slots)
        .map(|slot| {
            let source = if closest[slot].iter().any(|v| !v.is_empty()) { &closest[slot] } else { &any[slot] };
            let mut running = VARIANCE_FLOOR;
            let variances = source
                .iter()
                .map(|v| {
                    let est = if v.is_empty() { VARIANCE_FLOOR } else { numeric::mean(v.iter().copied()) };
                    running = running.max(est.max(VARIANCE_FLOOR));
                    running
                })
                .collect();
            CovarianceSchedule { variances }
        })
        .collect();
    Ok(ModeSchedules { per_slot })
}

/// Per-step variance estimates before flooring and the running max, for
/// diagnostics.
pub fn raw_residual_variances(
    val_instances: &[PredictionInstance],
    baseline: &Baseline,
    kinematics: &KinematicsConfig,
) -> Vec<Vec<f64>> {
    let horizon = val_instances.iter().map(|i| i.future.len()).max().unwrap_or(0);
    let mut acc = vec![vec![Vec::new(); horizon]; baseline.slots()];
    for inst in val_instances {
        let state = instance_state(inst, kinematics);
        for m in baseline.modes(&state, inst.future.len(), instance_dt(inst)) {
            for (k, (p, g)) in m.means.iter().zip(&inst.future).enumerate() {
                let r = p - g.pos;
                acc[m.slot][k].push(0.5 * (r.x * r.x + r.y * r.y));
            }
        }
    }
    acc.into_iter()
        .map(|steps| steps.into_iter().map(|v| numeric::mean(v)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::KinematicState;

    fn state(v: (f64, f64), a: (f64, f64)) -> KinematicState {
        let velocity = Vec2::new(v.0, v.1);
        let speed = velocity.norm();
        KinematicState {
            timestamp_us: 0,
            position: Vec2::new(2.0, -1.0),
            velocity,
            acceleration: Vec2::new(a.0, a.1),
            speed,
            heading: (speed >= 0.1).then(|| velocity.y.atan2(velocity.x)),
            drift_heading: (speed > 0.0).then(|| velocity.y.atan2(velocity.x)),
        }
    }

    #[test]
    fn cv_examples() {
        let s = state((0.0, 0.0), (0.0, 0.0));
        assert!(predict_cv(&s, 30, 0.1).iter().all(|p| *p == s.position));
        let s = state((1.0, 0.0), (0.0, 0.0));
        let traj = predict_cv(&s, 30, 0.1);
        assert!((traj[29] - (s.position + Vec2::new(3.0, 0.0))).norm() < 1e-12);
        let s = state((0.6, 0.8), (0.0, 0.0));
        assert!(((predict_cv(&s, 30, 0.1)[29] - s.position).norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn da_closed_form_value() {
        let s = state((1.0, 0.0), (1.0, 0.0));
        let traj = predict_da(&s, &DaParams::default(), 30, 0.1);
        let dx = traj[29].x - s.position.x;
        let expected = 3.0 + 3.0 / 5.5 - (1.0 - (-16.5f64).exp()) / (5.5 * 5.5);
        assert!((dx - expected).abs() < 1e-12, "{dx}");
        assert!((dx - 3.51240).abs() < 5e-6);
    }

    #[test]
    fn da_without_acceleration_is_cv() {
        let s = state((0.7, -0.3), (0.0, 0.0));
        for (a, b) in predict_da(&s, &DaParams::default(), 30, 0.1).iter().zip(predict_cv(&s, 30, 0.1)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn da_converges_to_cv_with_fast_decay() {
        let s = state((1.0, 0.5), (2.0, -1.0));
        let cv = predict_cv(&s, 30, 0.1);
        let gaps: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&lambda| (predict_da(&s, &DaParams { lambda }, 30, 0.1)[29] - cv[29]).norm())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        // The gap shrinks like 1/lambda.
        assert!(gaps[2] < 1e-2);
    }

    #[test]
    fn unimodal_wrapper() {
        let s = state((1.0, 0.0), (0.0, 0.0));
        let traj = predict_cv(&s, 30, 0.1);
        let ts: Vec<i64> = (1..=30).map(|k| k * 100_000).collect();
        let p = wrap_unimodal("x", &traj, &ts, &CovarianceSchedule::default_for(30, 0.1));
        assert_eq!(p.modes.len(), 1);
        assert_eq!(p.modes[0].weight, 1.0);
        p.validate().unwrap();
    }

    fn ts30() -> Vec<i64> {
        (1..=30).map(|k| k * 100_000).collect()
    }

    fn sched() -> ModeSchedules {
        ModeSchedules::uniform(5, CovarianceSchedule::default_for(30, 0.1))
    }

    #[test]
    fn ensemble_regimes() {
        let cfg = EnsembleConfig::default();
        let mut standing = state((0.0, 0.0), (0.0, 0.0));
        standing.heading = Some(0.3);
        let p = predict_ensemble("s", &standing, &cfg, &sched(), &ts30(), 0.1);
        assert_eq!(p.modes.len(), 5);
        assert_eq!(p.most_probable(), Some(ensemble_slot::STATIONARY));
        assert!((p.modes[0].weight - 0.55).abs() < 1e-12);
        p.validate().unwrap();

        let walking = state((1.4, 0.0), (0.0, 0.0));
        let p = predict_ensemble("w", &walking, &cfg, &sched(), &ts30(), 0.1);
        assert_eq!(p.most_probable(), Some(ensemble_slot::CV));
        assert!((p.modes[1].weight - 0.40).abs() < 1e-12);
        p.validate().unwrap();
    }

    #[test]
    fn ensemble_collapses_without_heading() {
        let cfg = EnsembleConfig::default();
        let still = state((0.0, 0.0), (0.0, 0.0));
        let p = predict_ensemble("s", &still, &cfg, &sched(), &ts30(), 0.1);
        assert_eq!(p.modes.len(), 4);
        assert!((p.modes[0].weight - 0.75).abs() < 1e-12);
        p.validate().unwrap();
    }

    #[test]
    fn walk_mode_reaches_walk_speed() {
        let cfg = EnsembleConfig::default();
        let mut s = state((0.0, 0.0), (0.0, 0.0));
        s.heading = Some(0.0);
        let modes = ensemble_modes(&s, &cfg, 30, 0.1);
        let walk = modes.iter().find(|m| m.slot == ensemble_slot::WALK).unwrap();
        let late_speed = (walk.means[29].x - walk.means[28].x) / 0.1;
        assert!((late_speed - 1.4).abs() < 1e-3);
        let first = walk.means[0].x - s.position.x;
        assert!(first > 0.0 && first < 0.14 * 0.5, "{first}");
    }

    #[test]
    fn stop_mode_halts() {
        let cfg = EnsembleConfig::default();
        let s = state((1.0, 0.0), (0.0, 0.0));
        let modes = ensemble_modes(&s, &cfg, 30, 0.1);
        let stop = modes.iter().find(|m| m.slot == ensemble_slot::STOP).unwrap();
        // Stops after 0.5 s having covered v^2 / 2a = 0.25 m.
        assert!((stop.means[29].x - s.position.x - 0.25).abs() < 1e-12);
        assert_eq!(stop.means[10], stop.means[29]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = EnsembleConfig::default();
        cfg.validate().unwrap();
        cfg.slow_weights[0] = 0.6;
        assert!(cfg.validate().is_err());
        assert!(DaParams { lambda: 0.0 }.validate().is_err());
    }

    #[test]
    fn clamp_psd_small_negative() {
        let c = Cov2 { xx: 1.0, xy: 1.0 + 1e-13, yy: 1.0 };
        assert!(c.eigenvalues().0 < 0.0);
        let cl = c.clamp_psd();
        assert!(cl.eigenvalues().0 >= -1e-15);
        assert!((cl.xx - 1.0).abs() < 1e-9);
    }

    #[test]
    fn most_probable_tie_goes_to_lowest_index() {
        let m = |w| ModePrediction { weight: w, steps: vec![] };
        let p = MultimodalPrediction { instance_id: "t".into(), modes: vec![m(0.2), m(0.4), m(0.4)] };
        assert_eq!(p.most_probable(), Some(1));
    }

    #[test]
    fn mode_step_wire_format() {
        let s = ModeStep { t_us: 5, mean: Vec2::new(1.5, -2.0), cov: Cov2 { xx: 0.1, xy: 0.0, yy: 0.2 } };
        assert_eq!(serde_json::to_string(&s).unwrap(), "[5,1.5,-2.0,0.1,0.0,0.2]");
    }
}
