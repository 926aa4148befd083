//! Audits how much earlier a resampled track shows motion than its raw
//! annotations support.
//!
//! Onset is detected the same way on both tracks. A step from sample `i-1`
//! to `i` marks onset at `t_i` when its speed reaches `v_on` and the mean
//! speed from `t_{i-1}` to the first sample at least `W` later also reaches
//! `v_on`. `W` is the larger of the sustain duration and the raw sampling
//! period, so the mean is always taken over at least one raw interval and a
//! sample-and-hold resample of the raw track can never fire earlier than
//! the raw track itself.

use serde::{Deserialize, Serialize};

use crate::numeric;
use crate::trajectory::{CameraView, RawTrack, ResampledTrack, TimedPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OnsetConfig {
    /// Onset speed threshold, m/s.
    pub v_on: f64,
    /// Minimum duration the motion must be sustained, s.
    pub sustain_s: f64,
}

impl Default for OnsetConfig {
    fn default() -> Self {
        Self { v_on: 0.25, sustain_s: 0.3 }
    }
}

/// First onset time in `points`, averaging over at least `window_us`.
pub fn detect_onset(points: &[TimedPoint], v_on: f64, window_us: i64) -> Option<i64> {
    for i in 1..points.len() {
        let (a, b) = (points[i - 1], points[i]);
        let dt = (b.t_us - a.t_us) as f64 * 1e-6;
        if (b.pos - a.pos).norm() < v_on * dt {
            continue;
        }
        let end = points[i..].iter().find(|p| p.t_us - a.t_us >= window_us)?;
        let span = (end.t_us - a.t_us) as f64 * 1e-6;
        if (end.pos - a.pos).norm() >= v_on * span {
            return Some(b.t_us);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageEntry {
    pub agent_id: String,
    pub camera_view: CameraView,
    pub raw_onset_us: Option<i64>,
    pub resampled_onset_us: Option<i64>,
    /// Raw onset minus resampled onset, s. Positive means the resampled
    /// track moves before the raw data shows motion.
    pub lead_s: Option<f64>,
    /// Set to `NoOnsetDetected` when either track has no onset.
    pub note: Option<String>,
}

/// Compares onsets of `raw` (at its native rate) and `resampled`.
pub fn audit_leakage(raw: &RawTrack, resampled: &ResampledTrack, cfg: &OnsetConfig) -> LeakageEntry {
    let native = raw.median_period_us().unwrap_or(0);
    let window = native.max((cfg.sustain_s * 1e6).round() as i64);
    let raw_pts: Vec<TimedPoint> =
        raw.samples.iter().map(|s| TimedPoint { t_us: s.timestamp_us, pos: s.position_2d() }).collect();
    let raw_onset = detect_onset(&raw_pts, cfg.v_on, window);
    let res_onset = detect_onset(&resampled.points(), cfg.v_on, window);
    let lead_s = match (raw_onset, res_onset) {
        (Some(r), Some(s)) => Some((r - s) as f64 * 1e-6),
        _ => None,
    };
    LeakageEntry {
        agent_id: raw.agent_id.clone(),
        camera_view: raw.camera_view,
        raw_onset_us: raw_onset,
        resampled_onset_us: res_onset,
        lead_s,
        note: lead_s.is_none().then(|| "NoOnsetDetected".to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageSummary {
    pub n_tracks: usize,
    /// Tracks where both onsets were detected.
    pub n_with_lead: usize,
    pub n_positive: usize,
    pub mean_positive_lead_s: Option<f64>,
    pub max_lead_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub entries: Vec<LeakageEntry>,
    pub summary: LeakageSummary,
}

impl LeakageReport {
    pub fn from_entries(entries: Vec<LeakageEntry>) -> Self {
        let leads: Vec<f64> = entries.iter().filter_map(|e| e.lead_s).collect();
        let positive: Vec<f64> = leads.iter().copied().filter(|&l| l > 0.0).collect();
        let summary = LeakageSummary {
            n_tracks: entries.len(),
            n_with_lead: leads.len(),
            n_positive: positive.len(),
            mean_positive_lead_s: (!positive.is_empty()).then(|| numeric::mean(positive.iter().copied())),
            max_lead_s: leads.iter().copied().reduce(f64::max),
        };
        Self { entries, summary }
    }
}
