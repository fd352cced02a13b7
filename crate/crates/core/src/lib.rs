//! Nonlinear landmark observer on SE(3).
//!
//! Propagates a pose estimate and a landmark map from body-frame angular
//! velocity, linear velocity and relative landmark positions, with a
//! simulator and error metrics to check convergence numerically.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and batch execution live in the `geoslam` crate.
//!
//! Module map:
//! - [`liegroup`]: hat/vee, SO(3)/SE(3) exponentials, re-orthonormalization.
//! - [`observer`]: correction terms and the discrete observer step.
//! - [`attitude`]: attitude reconstruction from landmark directions.
//! - [`simulator`]: trajectories, landmark layouts and noisy measurements.
//! - [`metrics`]: pose/map errors and the Lyapunov function.
//! - [`scenario`] and [`engine`]: experiment description and the run loop.

#![no_std]

extern crate alloc;

pub mod attitude;
pub mod engine;
pub mod error;
pub mod liegroup;
pub mod metrics;
pub mod observer;
pub mod scenario;
pub mod simulator;

pub use engine::{run, RunOptions, RunResult, RunSummary};
pub use error::{ConfigIssue, ConfigIssues, Error, Result};
pub use liegroup::{Matrix3, Matrix4, Pose, Rotation, Vector3};
pub use metrics::ErrorRecord;
pub use observer::{AttitudeSource, Gains, MeasurementFrame, ObserverState};
pub use scenario::{AttitudeMode, InitialEstimate, LandmarkLayout, Scenario};
