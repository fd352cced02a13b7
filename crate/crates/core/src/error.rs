use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors produced by the estimation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (asymmetry {asymmetry:e})")]
    NotSkewSymmetric { asymmetry: f64 },
    #[error("matrix is singular or has non-positive determinant (det = {det:e})")]
    DegenerateMatrix { det: f64 },
    #[error("landmark index {index} out of range for a map of {len} landmarks")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("the landmark map is empty")]
    EmptyMap,
    #[error("landmark and measurement counts differ ({landmarks} vs {observations})")]
    LengthMismatch { landmarks: usize, observations: usize },
    #[error("attitude is unobservable: fewer than two non-collinear directions")]
    DegenerateGeometry,
    #[error("zero-length vector in attitude pair {index}")]
    ZeroVector { index: usize },
    #[error("time step must be positive and finite (got {dt})")]
    InvalidTimeStep { dt: f64 },
    #[error("non-finite value in observer state{}", match .step { Some(k) => alloc::format!(" at step {k}"), None => String::new() })]
    NonFiniteState { step: Option<usize> },
    #[error("invalid scenario: {0}")]
    ConfigInvalid(ConfigIssues),
    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
}

/// A single field-level validation failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every validation failure found in one pass over a scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigIssues(pub Vec<ConfigIssue>);

impl ConfigIssues {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigIssue::new(field, message));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConfigIssue> {
        self.0.iter()
    }
}

impl fmt::Display for ConfigIssues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
