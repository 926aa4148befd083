use std::path::{Path, PathBuf};

use pedbench::dataset::{BuildConfig, OnsetConfig};
use pedbench::metrics::HorizonConvention;
use pedbench::synth::CorpusTemplate;
use pedbench::trajectory::KinematicsConfig;
use pedbench::{DaParams, EnsembleConfig, HorizonSet, ResampleMode, Split, SplitConfig, TaskConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Full,
    MotionChanges,
}

impl Variant {
    /// Name used in file names and reports.
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::MotionChanges => "motion_changes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildSection {
    pub resample: ResampleMode,
    pub max_match_gap_us: i64,
    pub crop_factor: f64,
    pub motion_threshold_m: f64,
    pub selection_seed: u64,
}

impl Default for BuildSection {
    fn default() -> Self {
        let b = BuildConfig::default();
        Self {
            resample: b.resample,
            max_match_gap_us: b.max_match_gap_us,
            crop_factor: b.crop_factor,
            motion_threshold_m: b.motion_threshold_m,
            selection_seed: b.selection_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub horizons: HorizonSet,
    pub convention: HorizonConvention,
    pub variant: Variant,
    /// Only score instances of this split; all instances when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { horizons: HorizonSet::default(), convention: HorizonConvention::AtHorizon, variant: Variant::Full, split: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n: usize,
    pub seed: u64,
    pub duration_s: f64,
    pub noise_sigma: f64,
    pub native_rate_hz: f64,
    pub fine_rate_hz: f64,
    pub ramp_s: f64,
    pub test_fraction: f64,
}

impl Default for SynthSection {
    fn default() -> Self {
        let t = CorpusTemplate::default();
        Self {
            n: 2000,
            seed: 42,
            duration_s: t.duration_s,
            noise_sigma: t.noise_sigma,
            native_rate_hz: t.native_rate_hz,
            fine_rate_hz: t.fine_rate_hz,
            ramp_s: t.ramp_s,
            test_fraction: t.test_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictions: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Everything a run depends on. Missing keys take their defaults, so an
/// empty file is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub task: TaskConfig,
    pub split: SplitConfig,
    pub build: BuildSection,
    pub kinematics: KinematicsConfig,
    pub da: DaParams,
    pub ensemble: EnsembleConfig,
    pub eval: EvalSection,
    pub onset: OnsetConfig,
    pub synth: SynthSection,
    pub paths: Paths,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::new("InvalidConfig", e.to_string().replace('\n', " ")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// `--seed` drives every seeded stage.
    pub fn set_seed(&mut self, seed: u64) {
        self.split.seed = seed;
        self.build.selection_seed = seed;
        self.synth.seed = seed;
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.task.validate()?;
        self.split.validate()?;
        self.da.validate()?;
        self.ensemble.validate()?;
        if !(self.build.crop_factor > 0.0) || self.build.max_match_gap_us < 0 {
            return Err(CliError::new("InvalidConfig", "crop_factor must be positive and max_match_gap_us non-negative"));
        }
        self.eval.horizons.steps(self.task.rate_hz, self.task.future_steps())?;
        Ok(())
    }

    pub fn build_config(&self) -> BuildConfig {
        BuildConfig {
            task: self.task,
            split: self.split,
            resample: self.build.resample,
            max_match_gap_us: self.build.max_match_gap_us,
            crop_factor: self.build.crop_factor,
            motion_threshold_m: self.build.motion_threshold_m,
            selection_seed: self.build.selection_seed,
            kinematics: self.kinematics,
        }
    }

    pub fn corpus_template(&self) -> CorpusTemplate {
        CorpusTemplate {
            duration_s: self.synth.duration_s,
            noise_sigma: self.synth.noise_sigma,
            native_rate_hz: self.synth.native_rate_hz,
            fine_rate_hz: self.synth.fine_rate_hz,
            ramp_s: self.synth.ramp_s,
            test_fraction: self.synth.test_fraction,
            build: self.build_config(),
        }
    }

    pub fn as_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
