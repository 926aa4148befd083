use thiserror::Error;

use crate::camera::CameraError;
use crate::dataset::DatasetError;
use crate::metrics::MetricsError;
use crate::predictors::PredictorError;
use crate::synth::SynthError;
use crate::trajectory::TrajectoryError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Umbrella error for callers driving the full pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl Error {
    /// Short stable identifier, used by the CLI for machine-readable errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Trajectory(e) => e.kind(),
            Error::Camera(e) => e.kind(),
            Error::Dataset(e) => e.kind(),
            Error::Metrics(e) => e.kind(),
            Error::Predictor(e) => e.kind(),
            Error::Synth(e) => e.kind(),
        }
    }
}
