use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::plugin::PluginError;
use crate::route::CycleError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error for loading, simulating, and packaging a case.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: malformed YAML: {message}")]
    Parse { path: String, message: String },

    #[error("invalid `{field}`: {constraint}")]
    Schema { field: String, constraint: String },

    #[error("unknown {slot} model `{key}` (available: {})", available.join(", "))]
    UnknownModel {
        slot: &'static str,
        key: String,
        available: Vec<&'static str>,
    },

    #[error(transparent)]
    Cycle(#[from] CycleError),

    #[error("efficiency map {path}: {message}")]
    MapFormat { path: String, message: String },

    #[error("numerical failure at step {step}: {signal} = {value}")]
    Numerical {
        step: usize,
        signal: &'static str,
        value: f64,
    },

    /// Plugin failure while building the engine (spawn, handshake).
    #[error("external model: {0}")]
    Plugin(#[from] PluginError),

    /// Plugin failure once the run is under way.
    #[error("external model failed at step {step}: {source}")]
    PluginStep { step: usize, source: PluginError },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },

    #[error("{} already exists (use overwrite to replace it)", .0.display())]
    Exists(PathBuf),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code: 1 config/usage, 2 filesystem, 3 numerical or run abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Schema { .. }
            | Error::UnknownModel { .. }
            | Error::Cycle(_)
            | Error::MapFormat { .. }
            | Error::Plugin(_)
            | Error::Usage(_) => 1,
            Error::Io { .. } | Error::Exists(_) => 2,
            Error::Numerical { .. } | Error::PluginStep { .. } => 3,
        }
    }
}

/// A non-finite or out-of-band value produced inside a model step. The engine
/// attaches the step index when converting into [`Error::Numerical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalIssue {
    pub signal: &'static str,
    pub value: f64,
}

impl NumericalIssue {
    pub fn new(signal: &'static str, value: f64) -> Self {
        Self { signal, value }
    }

    /// Returns `Err` unless `value` is finite.
    pub fn check_finite(signal: &'static str, value: f64) -> Result<f64, NumericalIssue> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Self::new(signal, value))
        }
    }
}

impl std::fmt::Display for NumericalIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.signal, self.value)
    }
}

/// Failure of a slot model (builtin or external) during one step.
#[derive(Debug, Error)]
pub enum StepError {
    #[error("{} = {}", .0.signal, .0.value)]
    Numerical(NumericalIssue),
    #[error(transparent)]
    Plugin(#[from] PluginError),
}

impl From<NumericalIssue> for StepError {
    fn from(issue: NumericalIssue) -> Self {
        StepError::Numerical(issue)
    }
}

impl StepError {
    pub(crate) fn at_step(self, step: usize) -> Error {
        match self {
            StepError::Numerical(i) => Error::Numerical {
                step,
                signal: i.signal,
                value: i.value,
            },
            StepError::Plugin(source) => Error::PluginStep { step, source },
        }
    }
}
