use std::fmt;
use std::path::Path;

use pedbench::dataset::DatasetError;
use pedbench::metrics::MetricsError;
use pedbench::predictors::PredictorError;
use pedbench::synth::SynthError;
use pedbench::trajectory::TrajectoryError;

/// Failure reported to the user as one `error: kind=... msg="..."` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: String,
    pub msg: String,
}

impl CliError {
    pub fn new(kind: impl Into<String>, msg: impl Into<String>) -> Self {
        Self { kind: kind.into(), msg: msg.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("Io", format!("{}: {e}", path.display()))
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Self::new("Usage", msg)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.msg.split_whitespace().collect::<Vec<_>>().join(" ");
        write!(f, "error: kind={} msg={:?}", self.kind, msg)
    }
}

impl std::error::Error for CliError {}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::new(e.kind(), e.to_string())
            }
        }
    )*};
}

from_core!(DatasetError, MetricsError, PredictorError, SynthError, TrajectoryError, pedbench::Error);
