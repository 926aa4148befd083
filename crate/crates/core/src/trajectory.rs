//! Trajectory types, fixed-rate resampling, camera frame matching and
//! kinematic state estimation.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::SquareCrop;

pub type Vec2 = nalgebra::Vector2<f64>;

const MICROS_PER_SECOND: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("timestamps not strictly increasing at sample {index}")]
    NonMonotonicTimestamps { index: usize },
    #[error("rate {0} Hz does not give a whole-microsecond step")]
    InvalidRate(f64),
    #[error("invalid sample {index}: {reason}")]
    InvalidSample { index: usize, reason: String },
}

impl TrajectoryError {
    pub fn kind(&self) -> &'static str {
        match self {
            TrajectoryError::TooFewSamples { .. } => "TooFewSamples",
            TrajectoryError::NonMonotonicTimestamps { .. } => "NonMonotonicTimestamps",
            TrajectoryError::InvalidRate(_) => "InvalidRate",
            TrajectoryError::InvalidSample { .. } => "InvalidSample",
        }
    }
}

/// Camera the pedestrian was observed from. Each view of the same agent is
/// treated as its own trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CameraView {
    #[serde(alias = "CAM_FRONT")]
    Front,
    #[serde(alias = "CAM_FRONT_LEFT")]
    FrontLeft,
    #[serde(alias = "CAM_FRONT_RIGHT")]
    FrontRight,
    #[serde(alias = "CAM_BACK")]
    Back,
    #[serde(alias = "CAM_BACK_LEFT")]
    BackLeft,
    #[serde(alias = "CAM_BACK_RIGHT")]
    BackRight,
}

impl CameraView {
    pub const ALL: [CameraView; 6] = [
        CameraView::Front,
        CameraView::FrontLeft,
        CameraView::FrontRight,
        CameraView::Back,
        CameraView::BackLeft,
        CameraView::BackRight,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CameraView::Front => "front",
            CameraView::FrontLeft => "front_left",
            CameraView::FrontRight => "front_right",
            CameraView::Back => "back",
            CameraView::BackLeft => "back_left",
            CameraView::BackRight => "back_right",
        }
    }
}

impl fmt::Display for CameraView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CameraView {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let norm = norm.strip_prefix("cam_").unwrap_or(&norm);
        CameraView::ALL
            .into_iter()
            .find(|v| v.as_str() == norm)
            .ok_or_else(|| format!("unknown camera view '{s}'"))
    }
}

/// One low-rate 3D annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSample {
    pub timestamp_us: i64,
    /// World frame, meters. The third component is vertical.
    pub position: [f64; 3],
    /// (length, width, height) in meters.
    pub box_size: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

impl RawSample {
    pub fn position_2d(&self) -> Vec2 {
        Vec2::new(self.position[0], self.position[1])
    }
}

/// Annotations of one pedestrian as seen from one camera view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTrack {
    pub agent_id: String,
    pub camera_view: CameraView,
    pub samples: Vec<RawSample>,
}

impl RawTrack {
    /// Checks ordering and box sizes.
    pub fn validate(&self) -> Result<(), TrajectoryError> {
        for (i, s) in self.samples.iter().enumerate() {
            if s.box_size.iter().any(|&d| !(d > 0.0)) {
                return Err(TrajectoryError::InvalidSample {
                    index: i,
                    reason: "box dimensions must be positive".into(),
                });
            }
            if s.position.iter().any(|p| !p.is_finite()) {
                return Err(TrajectoryError::InvalidSample {
                    index: i,
                    reason: "non-finite position".into(),
                });
            }
        }
        check_monotonic(self.samples.iter().map(|s| s.timestamp_us))
    }

    /// Median spacing between consecutive samples, in microseconds.
    pub fn median_period_us(&self) -> Option<i64> {
        let mut gaps: Vec<i64> = self
            .samples
            .windows(2)
            .map(|w| w[1].timestamp_us - w[0].timestamp_us)
            .collect();
        if gaps.is_empty() {
            return None;
        }
        gaps.sort_unstable();
        Some(gaps[gaps.len() / 2])
    }

    /// Box (center, size, yaw) at time `t_us` under the given resampling
    /// mode. Times outside the sample span clamp to the end samples.
    pub fn box_at(&self, t_us: i64, mode: ResampleMode) -> Option<(Vector3<f64>, [f64; 3], f64)> {
        let first = self.samples.first()?;
        let idx = self.samples.partition_point(|s| s.timestamp_us <= t_us);
        if idx == 0 {
            return Some((Vector3::from(first.position), first.box_size, first.yaw));
        }
        let a = &self.samples[idx - 1];
        let as_tuple = |s: &RawSample| (Vector3::from(s.position), s.box_size, s.yaw);
        if idx == self.samples.len() || a.timestamp_us == t_us || mode == ResampleMode::Causal {
            return Some(as_tuple(a));
        }
        let b = &self.samples[idx];
        let f = (t_us - a.timestamp_us) as f64 / (b.timestamp_us - a.timestamp_us) as f64;
        let center = Vector3::from(a.position).lerp(&Vector3::from(b.position), f);
        let mut size = [0.0; 3];
        for (k, s) in size.iter_mut().enumerate() {
            *s = a.box_size[k] + f * (b.box_size[k] - a.box_size[k]);
        }
        let dyaw = wrap_angle(b.yaw - a.yaw);
        Some((center, size, a.yaw + f * dyaw))
    }
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r > std::f64::consts::PI {
        r -= two_pi;
    } else if r < -std::f64::consts::PI {
        r += two_pi;
    }
    r
}

fn check_monotonic(ts: impl Iterator<Item = i64>) -> Result<(), TrajectoryError> {
    let mut prev: Option<i64> = None;
    for (i, t) in ts.enumerate() {
        if let Some(p) = prev {
            if t <= p {
                return Err(TrajectoryError::NonMonotonicTimestamps { index: i });
            }
        }
        prev = Some(t);
    }
    Ok(())
}

/// Reference from a resampled step to the camera frame closest in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraFrameRef {
    pub frame_token: String,
    pub frame_timestamp_us: i64,
    pub crop: Option<SquareCrop>,
}

/// A timestamped planar position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(i64, f64, f64)", into = "(i64, f64, f64)")]
pub struct TimedPoint {
    pub t_us: i64,
    pub pos: Vec2,
}

impl TimedPoint {
    pub fn new(t_us: i64, x: f64, y: f64) -> Self {
        Self { t_us, pos: Vec2::new(x, y) }
    }
}

impl From<(i64, f64, f64)> for TimedPoint {
    fn from((t, x, y): (i64, f64, f64)) -> Self {
        TimedPoint::new(t, x, y)
    }
}

impl From<TimedPoint> for (i64, f64, f64) {
    fn from(p: TimedPoint) -> Self {
        (p.t_us, p.pos.x, p.pos.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackStep {
    pub timestamp_us: i64,
    pub position: Vec2,
    pub frame_ref: Option<CameraFrameRef>,
}

/// Fixed-rate planar track.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledTrack {
    pub agent_id: String,
    pub camera_view: CameraView,
    pub rate_hz: f64,
    pub steps: Vec<TrackStep>,
}

impl ResampledTrack {
    pub fn points(&self) -> Vec<TimedPoint> {
        self.steps
            .iter()
            .map(|s| TimedPoint { t_us: s.timestamp_us, pos: s.position })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleMode {
    /// Linear interpolation between the bracketing raw samples. Uses the
    /// sample after `t` to produce the value at `t`.
    #[default]
    #[serde(alias = "anti_causal_linear", alias = "anti-causal-linear")]
    AntiCausal,
    /// Holds the most recent raw sample at or before `t`.
    #[serde(alias = "causal_hold", alias = "causal-hold")]
    Causal,
}

impl ResampleMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResampleMode::AntiCausal => "anti-causal",
            ResampleMode::Causal => "causal",
        }
    }
}

impl FromStr for ResampleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "anti-causal" | "anti-causal-linear" | "linear" => Ok(ResampleMode::AntiCausal),
            "causal" | "causal-hold" | "hold" => Ok(ResampleMode::Causal),
            other => Err(format!("unknown resample mode '{other}'")),
        }
    }
}

impl fmt::Display for ResampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Step length in microseconds for `rate_hz`, if it is a whole number.
pub fn step_us(rate_hz: f64) -> Result<i64, TrajectoryError> {
    if !(rate_hz > 0.0) || !rate_hz.is_finite() {
        return Err(TrajectoryError::InvalidRate(rate_hz));
    }
    let step = MICROS_PER_SECOND / rate_hz;
    let rounded = step.round();
    if rounded < 1.0 || (step - rounded).abs() > 1e-6 {
        return Err(TrajectoryError::InvalidRate(rate_hz));
    }
    Ok(rounded as i64)
}

/// Resamples `raw` onto a grid at `rate_hz` aligned to its first timestamp,
/// covering the raw span without extrapolation. The vertical axis is dropped.
pub fn resample_track(
    raw: &RawTrack,
    rate_hz: f64,
    mode: ResampleMode,
) -> Result<ResampledTrack, TrajectoryError> {
    if raw.samples.len() < 2 {
        return Err(TrajectoryError::TooFewSamples { needed: 2, got: raw.samples.len() });
    }
    check_monotonic(raw.samples.iter().map(|s| s.timestamp_us))?;
    let step = step_us(rate_hz)?;
    let t0 = raw.samples[0].timestamp_us;
    let t_end = raw.samples[raw.samples.len() - 1].timestamp_us;

    let n = ((t_end - t0) / step + 1) as usize;
    let mut steps = Vec::with_capacity(n);
    // Index of the last raw sample at or before the current grid time.
    let mut seg = 0usize;
    for k in 0..n {
        let t = t0 + k as i64 * step;
        while seg + 1 < raw.samples.len() && raw.samples[seg + 1].timestamp_us <= t {
            seg += 1;
        }
        let a = &raw.samples[seg];
        let position = match mode {
            ResampleMode::Causal => a.position_2d(),
            ResampleMode::AntiCausal => {
                if a.timestamp_us == t || seg + 1 == raw.samples.len() {
                    a.position_2d()
                } else {
                    let b = &raw.samples[seg + 1];
                    let f = (t - a.timestamp_us) as f64 / (b.timestamp_us - a.timestamp_us) as f64;
                    a.position_2d() + (b.position_2d() - a.position_2d()) * f
                }
            }
        };
        steps.push(TrackStep { timestamp_us: t, position, frame_ref: None });
    }

    Ok(ResampledTrack {
        agent_id: raw.agent_id.clone(),
        camera_view: raw.camera_view,
        rate_hz,
        steps,
    })
}

/// Attaches to every step the nearest camera frame, if within `max_gap_us`.
/// Ties go to the earlier frame. `camera_timestamps` must be sorted.
pub fn match_camera_frames(
    track: &ResampledTrack,
    camera_timestamps: &[(String, i64)],
    max_gap_us: i64,
) -> ResampledTrack {
    debug_assert!(camera_timestamps.windows(2).all(|w| w[0].1 <= w[1].1));
    let mut out = track.clone();
    for step in &mut out.steps {
        let t = step.timestamp_us;
        let idx = camera_timestamps.partition_point(|(_, ts)| *ts < t);
        let before = idx.checked_sub(1).map(|i| &camera_timestamps[i]);
        let after = camera_timestamps.get(idx);
        let best = match (before, after) {
            (Some(b), Some(a)) => {
                if (a.1 - t) < (t - b.1) {
                    Some(a)
                } else {
                    Some(b)
                }
            }
            (Some(b), None) => Some(b),
            (None, Some(a)) => Some(a),
            (None, None) => None,
        };
        let matched = best.filter(|(_, ts)| (ts - t).abs() <= max_gap_us);
        step.frame_ref = match matched {
            None => None,
            Some((token, ts)) => {
                let crop = step
                    .frame_ref
                    .as_ref()
                    .filter(|r| &r.frame_token == token)
                    .and_then(|r| r.crop.clone());
                Some(CameraFrameRef { frame_token: token.clone(), frame_timestamp_us: *ts, crop })
            }
        };
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicsConfig {
    /// Below this speed the heading is not estimated from the velocity.
    pub heading_min_speed: f64,
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        Self { heading_min_speed: 0.1 }
    }
}

/// Planar motion state at the last history step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState {
    pub timestamp_us: i64,
    pub position: Vec2,
    pub velocity: Vec2,
    pub acceleration: Vec2,
    pub speed: f64,
    /// Radians; `None` while the pedestrian has not moved fast enough.
    pub heading: Option<f64>,
    /// Direction of the longest single-step displacement in the history.
    pub drift_heading: Option<f64>,
}

impl KinematicState {
    pub fn stationary(timestamp_us: i64, position: Vec2) -> Self {
        Self {
            timestamp_us,
            position,
            velocity: Vec2::zeros(),
            acceleration: Vec2::zeros(),
            speed: 0.0,
            heading: None,
            drift_heading: None,
        }
    }
}

/// Least-squares quadratic fit per axis, with time measured relative to the
/// last history point. Velocity is the linear coefficient, acceleration
/// twice the quadratic one. Two points give a finite difference.
pub fn estimate_kinematics(history: &[TimedPoint]) -> Result<KinematicState, TrajectoryError> {
    estimate_kinematics_with(history, &KinematicsConfig::default())
}

pub fn estimate_kinematics_with(
    history: &[TimedPoint],
    cfg: &KinematicsConfig,
) -> Result<KinematicState, TrajectoryError> {
    if history.len() < 2 {
        return Err(TrajectoryError::TooFewSamples { needed: 2, got: history.len() });
    }
    check_monotonic(history.iter().map(|p| p.t_us))?;
    let last = history[history.len() - 1];
    let tau: Vec<f64> = history
        .iter()
        .map(|p| (p.t_us - last.t_us) as f64 / MICROS_PER_SECOND)
        .collect();

    let (velocity, acceleration) = if history.len() == 2 {
        let prev = history[0];
        let dt = -tau[0];
        ((last.pos - prev.pos) / dt, Vec2::zeros())
    } else {
        // Relative positions keep the fit well conditioned for large world
        // coordinates.
        let n = history.len();
        let design = DMatrix::from_fn(n, 3, |r, c| tau[r].powi(c as i32));
        let svd = design.svd(true, true);
        let mut vel = Vec2::zeros();
        let mut acc = Vec2::zeros();
        for axis in 0..2 {
            let rhs = DVector::from_iterator(n, history.iter().map(|p| p.pos[axis] - last.pos[axis]));
            let coef = svd.solve(&rhs, 1e-14).expect("svd computed with u and v");
            vel[axis] = coef[1];
            acc[axis] = 2.0 * coef[2];
        }
        (vel, acc)
    };

    let speed = velocity.norm();
    let heading = if speed >= cfg.heading_min_speed {
        Some(velocity.y.atan2(velocity.x))
    } else {
        // Carry the heading from the most recent step that moved fast enough.
        history.windows(2).rev().find_map(|w| {
            let dt = (w[1].t_us - w[0].t_us) as f64 / MICROS_PER_SECOND;
            let d = w[1].pos - w[0].pos;
            (d.norm() / dt >= cfg.heading_min_speed).then(|| d.y.atan2(d.x))
        })
    };
    let drift_heading = history
        .windows(2)
        .map(|w| w[1].pos - w[0].pos)
        .filter(|d| d.norm() > 0.0)
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .map(|d| d.y.atan2(d.x));

    Ok(KinematicState {
        timestamp_us: last.t_us,
        position: last.pos,
        velocity,
        acceleration,
        speed,
        heading,
        drift_heading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(points: &[(i64, f64)]) -> RawTrack {
        RawTrack {
            agent_id: "a".into(),
            camera_view: CameraView::Front,
            samples: points
                .iter()
                .map(|&(t, x)| RawSample {
                    timestamp_us: t,
                    position: [x, 0.0, 1.0],
                    box_size: [0.5, 0.5, 1.8],
                    yaw: 0.0,
                })
                .collect(),
        }
    }

    fn at(track: &ResampledTrack, t_us: i64) -> Vec2 {
        track.steps.iter().find(|s| s.timestamp_us == t_us).unwrap().position
    }

    #[test]
    fn linear_resample_interpolates() {
        let r = raw(&[(0, 0.0), (500_000, 1.0)]);
        let tr = resample_track(&r, 10.0, ResampleMode::AntiCausal).unwrap();
        assert_eq!(tr.steps.len(), 6);
        assert!((at(&tr, 200_000).x - 0.4).abs() < 1e-12);
    }

    #[test]
    fn causal_hold_keeps_previous_sample() {
        let r = raw(&[(0, 0.0), (500_000, 1.0)]);
        let tr = resample_track(&r, 10.0, ResampleMode::Causal).unwrap();
        assert_eq!(at(&tr, 200_000).x, 0.0);
        assert_eq!(at(&tr, 500_000).x, 1.0);
    }

    #[test]
    fn on_grid_samples_are_identity() {
        let pts: Vec<(i64, f64)> = (0..6).map(|k| (k * 100_000, (k * k) as f64 * 0.3)).collect();
        let r = raw(&pts);
        for mode in [ResampleMode::AntiCausal, ResampleMode::Causal] {
            let tr = resample_track(&r, 10.0, mode).unwrap();
            for (s, (_, x)) in tr.steps.iter().zip(&pts) {
                assert_eq!(s.position.x, *x);
            }
        }
    }

    #[test]
    fn resample_errors() {
        assert_eq!(
            resample_track(&raw(&[(0, 0.0)]), 10.0, ResampleMode::AntiCausal),
            Err(TrajectoryError::TooFewSamples { needed: 2, got: 1 })
        );
        assert_eq!(
            resample_track(&raw(&[(0, 0.0), (0, 1.0)]), 10.0, ResampleMode::AntiCausal),
            Err(TrajectoryError::NonMonotonicTimestamps { index: 1 })
        );
        assert!(matches!(
            resample_track(&raw(&[(0, 0.0), (10, 1.0)]), 7.0, ResampleMode::AntiCausal),
            Err(TrajectoryError::InvalidRate(_))
        ));
    }

    #[test]
    fn grid_does_not_extrapolate() {
        let r = raw(&[(0, 0.0), (450_000, 1.0)]);
        let tr = resample_track(&r, 10.0, ResampleMode::AntiCausal).unwrap();
        assert_eq!(tr.steps.last().unwrap().timestamp_us, 400_000);
    }

    fn frames() -> Vec<(String, i64)> {
        vec![("f0".into(), 80_000), ("f1".into(), 180_000)]
    }

    fn track_at(ts: &[i64]) -> ResampledTrack {
        ResampledTrack {
            agent_id: "a".into(),
            camera_view: CameraView::Front,
            rate_hz: 10.0,
            steps: ts
                .iter()
                .map(|&t| TrackStep { timestamp_us: t, position: Vec2::zeros(), frame_ref: None })
                .collect(),
        }
    }

    #[test]
    fn frame_matching_examples() {
        let m = match_camera_frames(&track_at(&[100_000, 130_000, 400_000]), &frames(), 60_000);
        let tokens: Vec<Option<&str>> =
            m.steps.iter().map(|s| s.frame_ref.as_ref().map(|r| r.frame_token.as_str())).collect();
        assert_eq!(tokens, vec![Some("f0"), Some("f0"), None]);
        assert_eq!(m.steps[0].frame_ref.as_ref().unwrap().frame_timestamp_us, 80_000);
    }

    #[test]
    fn frame_matching_is_idempotent() {
        let tr = track_at(&[0, 100_000, 130_000, 160_000, 400_000]);
        let once = match_camera_frames(&tr, &frames(), 60_000);
        let twice = match_camera_frames(&once, &frames(), 60_000);
        assert_eq!(once, twice);
    }

    fn line_history(f: impl Fn(f64) -> f64) -> Vec<TimedPoint> {
        (0..10)
            .map(|k| {
                let t_us = -900_000 + k * 100_000;
                let t = t_us as f64 / 1e6;
                TimedPoint::new(t_us, f(t), 0.0)
            })
            .collect()
    }

    #[test]
    fn kinematics_of_linear_motion() {
        let s = estimate_kinematics(&line_history(|t| t)).unwrap();
        assert!((s.velocity - Vec2::new(1.0, 0.0)).norm() < 1e-9);
        assert!(s.acceleration.norm() < 1e-9);
        assert!((s.heading.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn kinematics_of_quadratic_motion() {
        // x(t) = 0.5 t^2 over t in [-0.9, 0]: derivative at t = 0 is 0, second
        // derivative 1.
        let s = estimate_kinematics(&line_history(|t| 0.5 * t * t)).unwrap();
        assert!(s.velocity.norm() < 1e-9, "{:?}", s.velocity);
        assert!((s.acceleration - Vec2::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn kinematics_stationary() {
        let s = estimate_kinematics(&line_history(|_| 3.0)).unwrap();
        assert_eq!(s.speed, 0.0);
        assert!(s.acceleration.norm() < 1e-12);
        assert_eq!(s.heading, None);
        assert_eq!(s.drift_heading, None);
    }

    #[test]
    fn two_point_finite_difference() {
        let h = [TimedPoint::new(0, 0.0, 0.0), TimedPoint::new(500_000, 0.0, 1.0)];
        let s = estimate_kinematics(&h).unwrap();
        assert!((s.velocity - Vec2::new(0.0, 2.0)).norm() < 1e-12);
        assert_eq!(s.acceleration, Vec2::zeros());
        assert!(estimate_kinematics(&h[..1]).is_err());
    }

    #[test]
    fn heading_carried_from_recent_motion() {
        // Moves along +y at 1 m/s, then stands for the last 3 steps.
        let h: Vec<TimedPoint> =
            (0..10).map(|k| TimedPoint::new(k * 100_000, 0.0, k.min(6) as f64 * 0.1)).collect();
        let s = estimate_kinematics(&h).unwrap();
        assert!(s.speed < 0.1);
        assert!((s.heading.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn camera_view_parsing() {
        assert_eq!("CAM_FRONT_LEFT".parse::<CameraView>().unwrap(), CameraView::FrontLeft);
        assert_eq!("back-right".parse::<CameraView>().unwrap(), CameraView::BackRight);
        assert!("roof".parse::<CameraView>().is_err());
    }
}
