//! Desk-scale pedestrian motion prediction benchmark.
//!
//! The crate covers the whole offline pipeline:
//!
//! * [`trajectory`]: raw low-rate annotations, fixed-rate resampling (both the
//!   interpolating and the causal variant), camera frame matching and
//!   kinematic state estimation.
//! * [`camera`]: pinhole projection of 3D boxes and square crop geometry.
//! * [`dataset`]: prediction instances, motion-change selection, agent-level
//!   splits, the leakage auditor and the line-delimited file formats.
//! * [`predictors`]: constant-velocity, decaying-acceleration and a rule-based
//!   five-mode ensemble, plus covariance calibration.
//! * [`metrics`]: minADE, minFDE, predRMS, expRMS and mixture NLL, and the
//!   report tables built from them.
//! * [`synth`]: seeded synthetic pedestrian scenarios.

pub mod camera;
pub mod dataset;
pub mod metrics;
pub mod numeric;
pub mod predictors;
pub mod synth;
pub mod trajectory;

mod error;

pub use error::{Error, Result};

pub use camera::{Box3D, CameraModel, PixelBox, SquareCrop};
pub use dataset::{LeakageReport, PredictionInstance, Split, SplitConfig, TaskConfig};
pub use metrics::{HorizonSet, MetricKind, ReportTable};
pub use predictors::{
    CovarianceSchedule, DaParams, EnsembleConfig, ModePrediction, MultimodalPrediction, Predictor,
};
pub use trajectory::{
    CameraFrameRef, CameraView, KinematicState, RawSample, RawTrack, ResampleMode, ResampledTrack,
    TimedPoint, Vec2,
};
