//! The landmark observer on SE(3).
//!
//! Continuous dynamics, with `C_ea` the transpose of the estimate's rotation block:
//!
//! ```text
//! d/dt X̂   = X̂ [[ω̂×, v̂], [0, 0]]
//! d/dt p̂_i = C_eaᵀ α_i
//! ω̂   = ω_y − k1 e,           e = ½ (C_ba C_eaᵀ − C_ea C_baᵀ)^∨
//! v̂   = v_y + (ω̂ − ω_y)× C_ea r̂ + k2 Σ s̃_i − k3 (C_ea r̂ + s_y,1)
//! α_i = (ω̂ − ω_y)× C_ea p̂_i − k2 s̃_i
//! s̃_i = C_ea (p̂_i − r̂) − s_y,i
//! ```
//!
//! Landmark indices are zero-based, so `s_y,1` is `landmark_obs[0]`.
//! [`step`] discretizes with Lie–Euler for the pose and explicit Euler for the
//! map, evaluating every correction at the pre-step state.

use alloc::vec::Vec;

use crate::attitude::{solve_attitude, VectorPair};
use crate::error::{ConfigIssues, Error, Result};
use crate::liegroup::{exp_se3, hat, reorthonormalize, vee, Pose, Rotation, Vector3};

/// Observer gains (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    /// Attitude correction.
    pub k1: f64,
    /// Map and velocity coupling through the innovations.
    pub k2: f64,
    /// Position correction against the first landmark.
    pub k3: f64,
}

impl Gains {
    /// Checked constructor; every gain must be finite and strictly positive.
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let gains = Self { k1, k2, k3 };
        let issues = gains.issues("gains");
        if issues.is_empty() {
            Ok(gains)
        } else {
            Err(Error::ConfigInvalid(issues))
        }
    }

    pub(crate) fn issues(&self, prefix: &str) -> ConfigIssues {
        let mut issues = ConfigIssues::default();
        for (name, k) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3)] {
            if !(k.is_finite() && k > 0.0) {
                issues.push(
                    alloc::format!("{prefix}.{name}"),
                    alloc::format!("must be finite and > 0 (got {k})"),
                );
            }
        }
        issues
    }
}

impl Default for Gains {
    fn default() -> Self {
        Self {
            k1: 1.0,
            k2: 1.0,
            k3: 1.0,
        }
    }
}

/// Pose and map estimate at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverState {
    pub pose_estimate: Pose,
    /// Estimated landmark positions in the datum frame.
    pub landmarks: Vec<Vector3>,
    pub time: f64,
}

impl ObserverState {
    pub fn new(pose_estimate: Pose, landmarks: Vec<Vector3>, time: f64) -> Self {
        Self {
            pose_estimate,
            landmarks,
            time,
        }
    }

    /// Estimated body-from-datum attitude `C_ea`.
    pub fn c_ea(&self) -> Rotation {
        self.pose_estimate.body_from_datum()
    }

    fn is_finite(&self) -> bool {
        self.time.is_finite()
            && self.pose_estimate.is_finite()
            && self.landmarks.iter().all(|p| p.iter().all(|x| x.is_finite()))
    }
}

/// Body-frame sensor data for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFrame {
    /// Angular velocity (rad/s).
    pub omega: Vector3,
    /// Linear velocity (m/s).
    pub velocity: Vector3,
    /// Landmark positions relative to the vehicle (m), index-aligned with the map.
    pub landmark_obs: Vec<Vector3>,
    pub time: f64,
}

/// Where the attitude used by the correction `e` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttitudeSource {
    /// The true `C_ba` for the current step is known.
    TrueAttitude(Rotation),
    /// `C_ba` is reconstructed from the landmark observations and the map estimate.
    Reconstructed,
}

fn check_index(state: &ObserverState, i: usize) -> Result<()> {
    if i < state.landmarks.len() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index: i,
            len: state.landmarks.len(),
        })
    }
}

fn check_aligned(state: &ObserverState, meas: &MeasurementFrame) -> Result<()> {
    if state.landmarks.len() == meas.landmark_obs.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            landmarks: state.landmarks.len(),
            observations: meas.landmark_obs.len(),
        })
    }
}

/// `s̃_i = C_ea (p̂_i − r̂) − s_y,i`.
pub fn innovation(state: &ObserverState, meas: &MeasurementFrame, i: usize) -> Result<Vector3> {
    check_index(state, i)?;
    let obs = meas.landmark_obs.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: meas.landmark_obs.len(),
    })?;
    Ok(innovation_unchecked(&state.c_ea(), state, obs, i))
}

fn innovation_unchecked(
    c_ea: &Rotation,
    state: &ObserverState,
    obs: &Vector3,
    i: usize,
) -> Vector3 {
    c_ea.apply(&(state.landmarks[i] - state.pose_estimate.position)) - obs
}

/// `e = ½ (C_ba C_eaᵀ − C_ea C_baᵀ)^∨`.
pub fn attitude_error(c_ba: &Rotation, c_ea: &Rotation) -> Vector3 {
    let m = c_ba.matrix() * c_ea.matrix().transpose();
    // m − mᵀ is exactly antisymmetric in floating point.
    vee(&((m - m.transpose()) * 0.5)).expect("difference of a matrix and its transpose is skew")
}

/// `ω̂ = ω_y − k1 e`.
pub fn corrected_angular_velocity(meas: &MeasurementFrame, e: &Vector3, gains: &Gains) -> Vector3 {
    meas.omega - e * gains.k1
}

/// `v̂ = v_y + (ω̂ − ω_y)× C_ea r̂ + k2 Σ s̃_i − k3 (C_ea r̂ + s_y,1)`.
pub fn corrected_velocity(
    state: &ObserverState,
    meas: &MeasurementFrame,
    omega_hat: &Vector3,
    gains: &Gains,
) -> Result<Vector3> {
    if state.landmarks.is_empty() {
        return Err(Error::EmptyMap);
    }
    check_aligned(state, meas)?;
    let c_ea = state.c_ea();
    let innovations: Vec<Vector3> = (0..state.landmarks.len())
        .map(|i| innovation_unchecked(&c_ea, state, &meas.landmark_obs[i], i))
        .collect();
    Ok(corrected_velocity_with(
        &c_ea,
        state,
        meas,
        omega_hat,
        gains,
        &innovations,
    ))
}

fn corrected_velocity_with(
    c_ea: &Rotation,
    state: &ObserverState,
    meas: &MeasurementFrame,
    omega_hat: &Vector3,
    gains: &Gains,
    innovations: &[Vector3],
) -> Vector3 {
    let position_body = c_ea.apply(&state.pose_estimate.position);
    let innovation_sum = innovations.iter().fold(Vector3::zeros(), |acc, s| acc + s);
    meas.velocity
        + hat(&(omega_hat - meas.omega)) * position_body
        + innovation_sum * gains.k2
        - (position_body + meas.landmark_obs[0]) * gains.k3
}

/// Datum-frame landmark velocity `C_eaᵀ α_i`.
pub fn landmark_rate(
    state: &ObserverState,
    meas: &MeasurementFrame,
    omega_hat: &Vector3,
    gains: &Gains,
    i: usize,
) -> Result<Vector3> {
    let s = innovation(state, meas, i)?;
    Ok(landmark_rate_with(&state.c_ea(), state, meas, omega_hat, gains, i, &s))
}

fn landmark_rate_with(
    c_ea: &Rotation,
    state: &ObserverState,
    meas: &MeasurementFrame,
    omega_hat: &Vector3,
    gains: &Gains,
    i: usize,
    innovation: &Vector3,
) -> Vector3 {
    let alpha =
        hat(&(omega_hat - meas.omega)) * c_ea.apply(&state.landmarks[i]) - innovation * gains.k2;
    c_ea.transpose().apply(&alpha)
}

/// The attitude `C_ba` the correction is computed against.
///
/// In reconstructed mode this solves the attitude problem on the pairs
/// `(s_y,i, p̂_i − r̂)` and propagates `DegenerateGeometry`.
pub fn resolve_attitude(
    state: &ObserverState,
    meas: &MeasurementFrame,
    source: &AttitudeSource,
) -> Result<Rotation> {
    match source {
        AttitudeSource::TrueAttitude(c_ba) => Ok(*c_ba),
        AttitudeSource::Reconstructed => {
            check_aligned(state, meas)?;
            let pairs: Vec<VectorPair> = meas
                .landmark_obs
                .iter()
                .zip(&state.landmarks)
                .map(|(s, p)| VectorPair::new(*s, p - state.pose_estimate.position))
                .collect();
            solve_attitude(&pairs)
        }
    }
}

/// Advances the estimate by `dt` seconds.
pub fn step(
    state: &ObserverState,
    meas: &MeasurementFrame,
    source: &AttitudeSource,
    gains: &Gains,
    dt: f64,
) -> Result<ObserverState> {
    let c_ba = resolve_attitude(state, meas, source)?;
    step_with_attitude(state, meas, &c_ba, gains, dt)
}

/// [`step`] with an already resolved attitude `C_ba`.
pub fn step_with_attitude(
    state: &ObserverState,
    meas: &MeasurementFrame,
    c_ba: &Rotation,
    gains: &Gains,
    dt: f64,
) -> Result<ObserverState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep { dt });
    }
    if state.landmarks.is_empty() {
        return Err(Error::EmptyMap);
    }
    check_aligned(state, meas)?;

    let c_ea = state.c_ea();
    let e = attitude_error(c_ba, &c_ea);
    let omega_hat = corrected_angular_velocity(meas, &e, gains);
    let innovations: Vec<Vector3> = (0..state.landmarks.len())
        .map(|i| innovation_unchecked(&c_ea, state, &meas.landmark_obs[i], i))
        .collect();
    let v_hat = corrected_velocity_with(&c_ea, state, meas, &omega_hat, gains, &innovations);

    let landmarks = innovations
        .iter()
        .enumerate()
        .map(|(i, s)| {
            state.landmarks[i]
                + landmark_rate_with(&c_ea, state, meas, &omega_hat, gains, i, s) * dt
        })
        .collect();

    let increment = exp_se3(&(omega_hat * dt), &(v_hat * dt));
    let advanced = state.pose_estimate.compose(&increment);
    if !advanced.is_finite() {
        return Err(Error::NonFiniteState { step: None });
    }
    let attitude = reorthonormalize(advanced.attitude.matrix())?;

    let next = ObserverState {
        pose_estimate: Pose::new(attitude, advanced.position),
        landmarks,
        time: state.time + dt,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFiniteState { step: None })
    }
}
