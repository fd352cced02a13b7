//! Simulation loop: truth → measurements → observer step → metrics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::liegroup::{Pose, Rotation};
use crate::metrics::{evaluate, ErrorRecord};
use crate::observer::{resolve_attitude, step_with_attitude, AttitudeSource, ObserverState};
use crate::scenario::{noise_rng, AttitudeMode, Scenario};
use crate::simulator::{measure, truth_at};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep every `decimate`-th record; the final record is always kept.
    pub decimate: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { decimate: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub initial: ErrorRecord,
    pub last: ErrorRecord,
    /// Steps whose attitude reconstruction failed and reused the previous attitude.
    pub degenerate_frames: usize,
}

/// `initial / final`; infinite when the final value is exactly zero.
pub fn convergence_factor(initial: f64, last: f64) -> f64 {
    if last == 0.0 {
        if initial == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        initial / last
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

impl RunSummary {
    pub fn lyapunov_factor(&self) -> f64 {
        convergence_factor(self.initial.lyapunov, self.last.lyapunov)
    }

    pub fn attitude_factor(&self) -> f64 {
        convergence_factor(self.initial.attitude_error_angle, self.last.attitude_error_angle)
    }

    pub fn position_factor(&self) -> f64 {
        convergence_factor(self.initial.position_error, self.last.position_error)
    }

    /// Worst-landmark map error factor.
    pub fn map_factor(&self) -> f64 {
        convergence_factor(max_of(&self.initial.map_error), max_of(&self.last.map_error))
    }

    pub fn relative_map_factor(&self) -> f64 {
        convergence_factor(
            max_of(&self.initial.relative_map_error),
            max_of(&self.last.relative_map_error),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub records: Vec<ErrorRecord>,
    pub summary: RunSummary,
    pub final_state: ObserverState,
    pub final_truth: Pose,
}

/// Runs `scenario` for `step_count()` steps of `dt`, recording metrics at
/// `t = k·dt` for `k = 0..=steps`. Record `k` carries the attitude flag of
/// the step that produced it (record 0 is always flagged ok).
///
/// In reconstructed mode a failed attitude solve reuses the previous
/// step's attitude (or the estimate's own, on the first step) and clears the
/// record's flag.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunResult> {
    scenario.validate()?;
    let decimate = options.decimate.max(1);
    let steps = scenario.step_count();
    let dt = scenario.dt;

    let start = truth_at(&scenario.trajectory, 0.0);
    let (landmarks, mut state) = scenario.initialize(&start.pose);
    let mut rng = noise_rng(scenario.seed);

    let first = evaluate(&state, &start.pose, &landmarks, 0.0, true)?;
    let mut records = Vec::with_capacity(steps / decimate + 2);
    records.push(first.clone());

    let mut previous_attitude: Option<Rotation> = None;
    let mut degenerate_frames = 0;
    let mut truth = start;
    let mut last = first.clone();

    for k in 0..steps {
        let meas = measure(&truth.with_landmarks(&landmarks), &scenario.noise, &mut rng);
        let source = match scenario.attitude_mode {
            AttitudeMode::TrueAttitude => AttitudeSource::TrueAttitude(truth.pose.body_from_datum()),
            AttitudeMode::Reconstructed => AttitudeSource::Reconstructed,
        };
        let (c_ba, ok) = match resolve_attitude(&state, &meas, &source) {
            Ok(c) => (c, true),
            Err(Error::DegenerateGeometry) | Err(Error::ZeroVector { .. }) => {
                degenerate_frames += 1;
                (previous_attitude.unwrap_or_else(|| state.c_ea()), false)
            }
            Err(e) => return Err(e),
        };
        previous_attitude = Some(c_ba);

        state = step_with_attitude(&state, &meas, &c_ba, &scenario.gains, dt).map_err(|e| match e {
            Error::NonFiniteState { .. } => Error::NonFiniteState { step: Some(k) },
            other => other,
        })?;

        let t = (k + 1) as f64 * dt;
        truth = truth_at(&scenario.trajectory, t);
        let index = k + 1;
        if index % decimate == 0 || index == steps {
            last = evaluate(&state, &truth.pose, &landmarks, t, ok)?;
            if !last.lyapunov.is_finite() {
                return Err(Error::NonFiniteState { step: Some(k) });
            }
            records.push(last.clone());
        }
    }

    Ok(RunResult {
        records,
        summary: RunSummary {
            steps,
            initial: first,
            last,
            degenerate_frames,
        },
        final_state: state,
        final_truth: truth.pose,
    })
}
