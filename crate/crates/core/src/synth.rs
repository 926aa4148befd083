//! Scripted synthetic pedestrians with known behaviour modes.
//!
//! A scenario is a list of phases integrated at a fine rate. The noiseless
//! fine track is kept as ground truth; the observed track is subsampled to
//! the native annotation rate with Gaussian position noise added.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{build_dataset, BuildConfig, BuildOutput, DatasetError, RawTrackRecord, Split};
use crate::trajectory::{step_us, CameraView, RawSample, RawTrack, TimedPoint};

pub const MAX_SPEED: f64 = 3.0;
const BOX_SIZE: [f64; 3] = [0.7, 0.7, 1.75];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid script: {0}")]
    InvalidScript(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

impl SynthError {
    pub fn kind(&self) -> &'static str {
        match self {
            SynthError::InvalidScript(_) => "InvalidScript",
            SynthError::Dataset(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    /// Speed 0.
    Stand,
    /// Ramp to the target speed over the ramp time, then hold it.
    Walk,
    /// Linear speed change to the target over the whole phase.
    Accelerate,
    Decelerate,
    /// Walk at the target speed while the heading changes at `turn_rate`.
    Turn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub duration_s: f64,
    #[serde(default)]
    pub target_speed: f64,
    /// rad/s, only used by turn phases.
    #[serde(default)]
    pub turn_rate: f64,
}

impl Phase {
    pub fn stand(duration_s: f64) -> Self {
        Self { kind: PhaseKind::Stand, duration_s, target_speed: 0.0, turn_rate: 0.0 }
    }

    pub fn walk(duration_s: f64, speed: f64) -> Self {
        Self { kind: PhaseKind::Walk, duration_s, target_speed: speed, turn_rate: 0.0 }
    }

    pub fn turn(duration_s: f64, speed: f64, turn_rate: f64) -> Self {
        Self { kind: PhaseKind::Turn, duration_s, target_speed: speed, turn_rate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub agent_id: String,
    pub camera_view: CameraView,
    pub seed: u64,
    pub phases: Vec<Phase>,
    /// Position noise standard deviation, m.
    pub noise_sigma: f64,
    pub native_rate_hz: f64,
    pub fine_rate_hz: f64,
    pub initial_position: [f64; 2],
    pub initial_heading: f64,
    /// Time a walk phase takes to reach its speed, s.
    pub ramp_s: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            agent_id: "synth".into(),
            camera_view: CameraView::Front,
            seed: 0,
            phases: Vec::new(),
            noise_sigma: 0.05,
            native_rate_hz: 2.0,
            fine_rate_hz: 10.0,
            initial_position: [0.0, 0.0],
            initial_heading: 0.0,
            ramp_s: 0.5,
        }
    }
}

impl ScenarioParams {
    pub fn duration_s(&self) -> f64 {
        self.phases.iter().map(|p| p.duration_s).sum()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidScript(m));
        if self.phases.is_empty() {
            return bad("script has no phases".into());
        }
        for (i, p) in self.phases.iter().enumerate() {
            if !(p.duration_s > 0.0 && p.duration_s.is_finite()) {
                return bad(format!("phase {i}: duration must be positive, got {}", p.duration_s));
            }
            if !(0.0..=MAX_SPEED).contains(&p.target_speed) {
                return bad(format!("phase {i}: speed {} outside [0, {MAX_SPEED}]", p.target_speed));
            }
            if !p.turn_rate.is_finite() {
                return bad(format!("phase {i}: turn rate must be finite"));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be non-negative, got {}", self.noise_sigma));
        }
        if !(self.ramp_s > 0.0 && self.ramp_s.is_finite()) {
            return bad(format!("ramp time must be positive, got {}", self.ramp_s));
        }
        let fine = step_us(self.fine_rate_hz).map_err(|e| SynthError::InvalidScript(e.to_string()))?;
        let native = step_us(self.native_rate_hz).map_err(|e| SynthError::InvalidScript(e.to_string()))?;
        if native % fine != 0 {
            return bad(format!("fine rate {} is not a multiple of native rate {}", self.fine_rate_hz, self.native_rate_hz));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTrack {
    /// Noiseless positions at the fine rate.
    pub truth: Vec<TimedPoint>,
    /// Scripted speed at each fine step, m/s.
    pub truth_speed: Vec<f64>,
    /// Noisy samples at the native rate.
    pub observed: RawTrack,
    /// Phase active at each fine step. The last step carries the last phase.
    pub mode_labels: Vec<PhaseKind>,
}

/// Speed at `t` seconds into phase `p`, entered at speed `v0`.
fn phase_speed(p: &Phase, v0: f64, t: f64, ramp_s: f64) -> f64 {
    match p.kind {
        PhaseKind::Stand => 0.0,
        PhaseKind::Walk | PhaseKind::Turn => v0 + (p.target_speed - v0) * (t / ramp_s).min(1.0),
        PhaseKind::Accelerate | PhaseKind::Decelerate => v0 + (p.target_speed - v0) * (t / p.duration_s).min(1.0),
    }
}

pub fn generate_scenario(params: &ScenarioParams) -> Result<SyntheticTrack, SynthError> {
    params.validate()?;
    let fine_us = step_us(params.fine_rate_hz).expect("validated");
    let native_us = step_us(params.native_rate_hz).expect("validated");
    let dt = fine_us as f64 * 1e-6;

    // A walking script starts already at its speed.
    let mut v = match params.phases[0].kind {
        PhaseKind::Stand | PhaseKind::Accelerate | PhaseKind::Decelerate => 0.0,
        PhaseKind::Walk | PhaseKind::Turn => params.phases[0].target_speed,
    };
    let mut heading = params.initial_heading;
    let mut pos = params.initial_position;
    let mut k: i64 = 0;
    let mut truth = vec![TimedPoint::new(0, pos[0], pos[1])];
    let mut truth_speed = vec![v];
    let mut headings = vec![heading];
    let mut mode_labels = Vec::new();

    for p in &params.phases {
        let n = (p.duration_s / dt).round().max(1.0) as i64;
        let v_entry = v;
        let omega = if p.kind == PhaseKind::Turn { p.turn_rate } else { 0.0 };
        for j in 1..=n {
            let v_next = phase_speed(p, v_entry, j as f64 * dt, params.ramp_s);
            let h_next = heading + omega * dt;
            let dist = 0.5 * (v + v_next) * dt;
            let h_mid = 0.5 * (heading + h_next);
            pos = [pos[0] + dist * h_mid.cos(), pos[1] + dist * h_mid.sin()];
            v = v_next;
            heading = h_next;
            k += 1;
            mode_labels.push(p.kind);
            truth.push(TimedPoint::new(k * fine_us, pos[0], pos[1]));
            truth_speed.push(v);
            headings.push(heading);
        }
    }
    mode_labels.push(params.phases.last().expect("validated").kind);

    let stride = (native_us / fine_us) as usize;
    let normal = Normal::new(0.0, params.noise_sigma).expect("validated sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let samples = truth
        .iter()
        .step_by(stride)
        .zip(headings.iter().step_by(stride))
        .map(|(p, &yaw)| {
            let nx = normal.sample(&mut rng);
            let ny = normal.sample(&mut rng);
            RawSample { timestamp_us: p.t_us, position: [p.pos.x + nx, p.pos.y + ny, 0.0], box_size: BOX_SIZE, yaw }
        })
        .collect();
    let observed = RawTrack { agent_id: params.agent_id.clone(), camera_view: params.camera_view, samples };

    Ok(SyntheticTrack { truth, truth_speed, observed, mode_labels })
}

/// Centered moving average over `window` samples, shrinking symmetrically
/// near the ends so the first and last samples are left in place. Positions
/// therefore depend on later samples, which is the point.
///
/// # Panics
/// If `window` is even or smaller than 3.
pub fn apply_smoothing_artifact(track: &RawTrack, window: usize) -> RawTrack {
    assert!(window >= 3 && window % 2 == 1, "smoothing window must be odd and at least 3, got {window}");
    let n = track.samples.len();
    let half = window / 2;
    let samples = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let span = &track.samples[i - h..=i + h];
            let mut position = [0.0; 3];
            for s in span {
                for (acc, x) in position.iter_mut().zip(s.position) {
                    *acc += x;
                }
            }
            for acc in &mut position {
                *acc /= span.len() as f64;
            }
            RawSample { position, ..track.samples[i].clone() }
        })
        .collect();
    RawTrack { agent_id: track.agent_id.clone(), camera_view: track.camera_view, samples }
}

/// Distribution the corpus scripts are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusTemplate {
    pub duration_s: f64,
    pub noise_sigma: f64,
    pub native_rate_hz: f64,
    pub fine_rate_hz: f64,
    pub ramp_s: f64,
    /// Probability that a scenario's agent is held out as test.
    pub test_fraction: f64,
    pub build: BuildConfig,
}

impl Default for CorpusTemplate {
    fn default() -> Self {
        Self {
            duration_s: 8.0,
            noise_sigma: 0.05,
            native_rate_hz: 2.0,
            fine_rate_hz: 10.0,
            ramp_s: 0.5,
            test_fraction: 0.2,
            build: BuildConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub scripts: Vec<ScenarioParams>,
    pub records: Vec<RawTrackRecord>,
    pub tracks: Vec<SyntheticTrack>,
    pub build: BuildOutput,
}

/// Random script for scenario `index`: constant walk, standing, stand to
/// walk, walk to stand, or a turn. Transitions land between 1.5 s and 4.5 s
/// so they fall inside some window's future.
fn random_script(rng: &mut ChaCha8Rng, duration_s: f64) -> Vec<Phase> {
    let speed = rng.random_range(0.8..1.8);
    // Whole tenths keep phase boundaries on the fine grid.
    let switch = rng.random_range(15..=45) as f64 / 10.0;
    let rest = duration_s - switch;
    match rng.random_range(0..100) {
        0..25 => vec![Phase::walk(duration_s, speed)],
        25..35 => vec![Phase::stand(duration_s)],
        35..60 => vec![Phase::stand(switch), Phase::walk(rest, speed)],
        60..85 => vec![Phase::walk(switch, speed), Phase::stand(rest)],
        _ => {
            let rate = rng.random_range(0.3..0.8) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            vec![Phase::walk(switch, speed), Phase::turn(1.5, speed, rate), Phase::walk(rest - 1.5, speed)]
        }
    }
}

fn scenario(index: usize, template: &CorpusTemplate, seed: u64) -> (ScenarioParams, Option<Split>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let phases = random_script(&mut rng, template.duration_s);
    let params = ScenarioParams {
        agent_id: format!("synth-{seed}-{index:06}"),
        camera_view: CameraView::ALL[rng.random_range(0..CameraView::ALL.len())],
        seed: rng.random(),
        phases,
        noise_sigma: template.noise_sigma,
        native_rate_hz: template.native_rate_hz,
        fine_rate_hz: template.fine_rate_hz,
        initial_position: [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)],
        initial_heading: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        ramp_s: template.ramp_s,
    };
    let split = rng.random_bool(template.test_fraction.clamp(0.0, 1.0)).then_some(Split::Test);
    (params, split)
}

/// Generates `n` random scenarios and runs them through the dataset build.
/// Each scenario draws from its own stream of `seed`, so the output does not
/// depend on thread count.
pub fn generate_corpus(n: usize, template: &CorpusTemplate, seed: u64) -> Result<SynthCorpus, SynthError> {
    if !(template.duration_s > 2.0 && template.duration_s.is_finite()) {
        return Err(SynthError::InvalidScript(format!("corpus duration must exceed 2 s, got {}", template.duration_s)));
    }
    let generated: Vec<(ScenarioParams, Option<Split>, SyntheticTrack)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (params, split) = scenario(i, template, seed);
            let track = generate_scenario(&params)?;
            Ok((params, split, track))
        })
        .collect::<Result<_, SynthError>>()?;

    let mut scripts = Vec::with_capacity(n);
    let mut records = Vec::with_capacity(n);
    let mut tracks = Vec::with_capacity(n);
    for (params, split, track) in generated {
        records.push(RawTrackRecord { track: track.observed.clone(), split, frames: Vec::new() });
        scripts.push(params);
        tracks.push(track);
    }
    let build = build_dataset(&records, &template.build)?;
    Ok(SynthCorpus { scripts, records, tracks, build })
}
