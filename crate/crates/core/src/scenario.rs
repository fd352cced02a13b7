//! Declarative description of one simulated experiment.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{ConfigIssues, Error, Result};
use crate::liegroup::{exp_so3, Pose, Rotation, Vector3, ROTATION_TOLERANCE};
use crate::observer::{Gains, ObserverState};
use crate::simulator::{
    place_landmarks, sim_rng, ChannelNoise, LandmarkBox, NoiseDistribution, NoiseSpec, SimRng,
    TrajectoryFamily, TrajectorySpec,
};

/// Attitude fed to the observer correction for the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttitudeMode {
    TrueAttitude,
    Reconstructed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LandmarkLayout {
    Explicit(Vec<Vector3>),
    /// `count` uniform points drawn from their own generator seeded with
    /// `seed`. With `anchor_first_at_origin` the first landmark is moved to
    /// the datum origin, which fixes the datum frame on landmark 1.
    Random {
        count: usize,
        region: LandmarkBox,
        seed: u64,
        anchor_first_at_origin: bool,
    },
}

impl LandmarkLayout {
    pub fn len(&self) -> usize {
        match self {
            LandmarkLayout::Explicit(points) => points.len(),
            LandmarkLayout::Random { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn materialize(&self) -> Vec<Vector3> {
        match self {
            LandmarkLayout::Explicit(points) => points.clone(),
            LandmarkLayout::Random {
                count,
                region,
                seed,
                anchor_first_at_origin,
            } => {
                let mut points = place_landmarks(*count, region, &mut sim_rng(*seed));
                if *anchor_first_at_origin {
                    if let Some(first) = points.first_mut() {
                        *first = Vector3::zeros();
                    }
                }
                points
            }
        }
    }
}

/// How the observer is initialized relative to the truth at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialEstimate {
    /// Perturb the truth: the estimate's rotation block is the true one
    /// right-multiplied by `exp(attitude)`, its position is shifted by
    /// `position`, and every landmark moves `landmark_offset` meters in a
    /// direction drawn from the run's initialization stream.
    Offset {
        attitude: Vector3,
        position: Vector3,
        landmark_offset: f64,
    },
    Explicit {
        pose: Pose,
        landmarks: Vec<Vector3>,
    },
}

impl Default for InitialEstimate {
    fn default() -> Self {
        InitialEstimate::Offset {
            attitude: Vector3::zeros(),
            position: Vector3::zeros(),
            landmark_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub trajectory: TrajectorySpec,
    pub landmarks: LandmarkLayout,
    pub gains: Gains,
    pub noise: NoiseSpec,
    pub attitude_mode: AttitudeMode,
    /// s
    pub duration: f64,
    /// s
    pub dt: f64,
    pub initial_estimate: InitialEstimate,
    /// Seeds measurement noise and the initial-estimate perturbation.
    pub seed: u64,
}

/// Stream ids carved out of the run seed.
const NOISE_STREAM: u64 = 0;
const INIT_STREAM: u64 = 1;

pub(crate) fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = sim_rng(seed);
    rng.set_stream(id);
    rng
}

pub(crate) fn noise_rng(seed: u64) -> SimRng {
    stream(seed, NOISE_STREAM)
}

fn finite3(v: &Vector3) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector3 {
    // rejection sampling in the unit ball
    loop {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let w: f64 = rng.random();
        let p = Vector3::new(2.0 * u - 1.0, 2.0 * v - 1.0, 2.0 * w - 1.0);
        let n = p.norm();
        if n > 1e-3 && n <= 1.0 {
            return p / n;
        }
    }
}

impl Scenario {
    /// Number of integration steps: `duration / dt`, rounded when within
    /// 1e-9 relative of an integer, truncated otherwise.
    pub fn step_count(&self) -> usize {
        let ratio = self.duration / self.dt;
        let nearest = libm::round(ratio);
        let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            libm::floor(ratio)
        };
        steps as usize
    }

    /// Checks every scenario invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut issues = ConfigIssues::default();
        if self.name.trim().is_empty() {
            issues.push("name", "must not be empty");
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            issues.push("duration", format!("must be finite and > 0 (got {})", self.duration));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            issues.push("dt", format!("must be finite and > 0 (got {})", self.dt));
        } else if self.dt > self.duration {
            issues.push("dt", format!("must not exceed duration ({} > {})", self.dt, self.duration));
        }
        issues.0.extend(self.gains.issues("gains").0);
        self.validate_trajectory(&mut issues);
        self.validate_landmarks(&mut issues);
        for (name, channel) in [
            ("omega", &self.noise.omega),
            ("velocity", &self.noise.velocity),
            ("landmark", &self.noise.landmark),
        ] {
            validate_channel(&format!("noise.{name}"), channel, &mut issues);
        }
        self.validate_initial_estimate(&mut issues);
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(issues))
        }
    }

    fn validate_trajectory(&self, issues: &mut ConfigIssues) {
        let params: Vec<(&str, f64)> = match self.trajectory.family {
            TrajectoryFamily::Static => Vec::new(),
            TrajectoryFamily::Circle { radius, rate } => [("radius", radius), ("rate", rate)].into(),
            TrajectoryFamily::Helix {
                radius,
                rate,
                vertical_rate,
            } => [("radius", radius), ("rate", rate), ("vertical_rate", vertical_rate)].into(),
            TrajectoryFamily::SinusoidalTumble {
                radius,
                rate,
                vertical_rate,
                roll_amplitude,
                pitch_amplitude,
            } => [
                ("radius", radius),
                ("rate", rate),
                ("vertical_rate", vertical_rate),
                ("roll_amplitude", roll_amplitude),
                ("pitch_amplitude", pitch_amplitude),
            ]
            .into(),
        };
        for (name, value) in params {
            if !value.is_finite() {
                issues.push(format!("trajectory.{name}"), format!("must be finite (got {value})"));
            } else if name == "radius" && value < 0.0 {
                issues.push("trajectory.radius", format!("must be >= 0 (got {value})"));
            }
        }
        let pose = &self.trajectory.initial_pose;
        if !pose.is_finite() {
            issues.push("trajectory.initial_pose", "must be finite");
        } else if Rotation::from_matrix(*pose.attitude.matrix()).is_err() {
            issues.push(
                "trajectory.initial_pose.attitude",
                format!("is not a rotation within {ROTATION_TOLERANCE:e}"),
            );
        }
    }

    fn validate_landmarks(&self, issues: &mut ConfigIssues) {
        let count = self.landmarks.len();
        if count == 0 {
            issues.push("landmarks", "at least one landmark is required");
        }
        if self.attitude_mode == AttitudeMode::Reconstructed && count < 2 {
            issues.push(
                "landmarks",
                format!("reconstructed attitude needs at least 2 landmarks (got {count})"),
            );
        }
        match &self.landmarks {
            LandmarkLayout::Explicit(points) => {
                for (i, p) in points.iter().enumerate() {
                    if !finite3(p) {
                        issues.push(format!("landmarks.positions[{i}]"), "must be finite");
                    }
                }
            }
            LandmarkLayout::Random { region, .. } => {
                if !finite3(&region.min) || !finite3(&region.max) {
                    issues.push("landmarks.box", "bounds must be finite");
                } else if region.min.iter().zip(region.max.iter()).any(|(lo, hi)| lo > hi) {
                    issues.push("landmarks.box", "box_min must not exceed box_max on any axis");
                }
            }
        }
    }

    fn validate_initial_estimate(&self, issues: &mut ConfigIssues) {
        match &self.initial_estimate {
            InitialEstimate::Offset {
                attitude,
                position,
                landmark_offset,
            } => {
                if !finite3(attitude) {
                    issues.push("initial_estimate.attitude_offset", "must be finite");
                }
                if !finite3(position) {
                    issues.push("initial_estimate.position_offset", "must be finite");
                }
                if !(landmark_offset.is_finite() && *landmark_offset >= 0.0) {
                    issues.push(
                        "initial_estimate.landmark_offset",
                        format!("must be finite and >= 0 (got {landmark_offset})"),
                    );
                }
            }
            InitialEstimate::Explicit { pose, landmarks } => {
                if !pose.is_finite() || Rotation::from_matrix(*pose.attitude.matrix()).is_err() {
                    issues.push("initial_estimate.pose", "must be a finite rigid transform");
                }
                if landmarks.len() != self.landmarks.len() {
                    issues.push(
                        "initial_estimate.landmarks",
                        format!(
                            "has {} entries but the map has {} landmarks",
                            landmarks.len(),
                            self.landmarks.len()
                        ),
                    );
                }
                if !landmarks.iter().all(finite3) {
                    issues.push("initial_estimate.landmarks", "must be finite");
                }
            }
        }
    }

    /// True landmark positions and the observer's starting state.
    pub fn initialize(&self, truth_pose: &Pose) -> (Vec<Vector3>, ObserverState) {
        let truth = self.landmarks.materialize();
        let state = match &self.initial_estimate {
            InitialEstimate::Offset {
                attitude,
                position,
                landmark_offset,
            } => {
                let mut rng = stream(self.seed, INIT_STREAM);
                let pose = Pose::new(
                    truth_pose.attitude * exp_so3(attitude),
                    truth_pose.position + position,
                );
                let landmarks = truth
                    .iter()
                    .map(|p| {
                        if *landmark_offset > 0.0 {
                            p + random_unit(&mut rng) * *landmark_offset
                        } else {
                            *p
                        }
                    })
                    .collect();
                ObserverState::new(pose, landmarks, 0.0)
            }
            InitialEstimate::Explicit { pose, landmarks } => {
                ObserverState::new(*pose, landmarks.clone(), 0.0)
            }
        };
        (truth, state)
    }

    /// Overwrites the numeric field named by a dotted `path` (e.g. `gains.k1`,
    /// `noise.landmark.scale`, `dt`).
    pub fn set_parameter(&mut self, path: &str, value: f64) -> Result<()> {
        let unknown = || Error::UnknownParameter(path.to_string());
        let parts: Vec<&str> = path.split('.').collect();
        match parts.as_slice() {
            ["duration"] => self.duration = value,
            ["dt"] => self.dt = value,
            ["seed"] => self.seed = as_integer(path, value)?,
            ["gains", "k1"] => self.gains.k1 = value,
            ["gains", "k2"] => self.gains.k2 = value,
            ["gains", "k3"] => self.gains.k3 = value,
            ["noise", channel, field @ ..] => {
                let noise = match *channel {
                    "omega" => &mut self.noise.omega,
                    "velocity" => &mut self.noise.velocity,
                    "landmark" => &mut self.noise.landmark,
                    _ => return Err(unknown()),
                };
                match field {
                    ["scale"] => noise.scale = value,
                    ["dof"] => match &mut noise.distribution {
                        NoiseDistribution::StudentT { dof } => *dof = value,
                        _ => return Err(unknown()),
                    },
                    ["bias", axis] => *vector_axis(&mut noise.bias, axis).ok_or_else(unknown)? = value,
                    _ => return Err(unknown()),
                }
            }
            ["trajectory", "initial_pose", "position", axis] => {
                *vector_axis(&mut self.trajectory.initial_pose.position, axis).ok_or_else(unknown)? =
                    value
            }
            ["trajectory", name] => {
                *trajectory_parameter(&mut self.trajectory.family, name).ok_or_else(unknown)? = value
            }
            ["landmarks", "seed"] => match &mut self.landmarks {
                LandmarkLayout::Random { seed, .. } => *seed = as_integer(path, value)?,
                LandmarkLayout::Explicit(_) => return Err(unknown()),
            },
            ["landmarks", "count"] => match &mut self.landmarks {
                LandmarkLayout::Random { count, .. } => *count = as_integer(path, value)? as usize,
                LandmarkLayout::Explicit(_) => return Err(unknown()),
            },
            ["initial_estimate", field @ ..] => match &mut self.initial_estimate {
                InitialEstimate::Offset {
                    attitude,
                    position,
                    landmark_offset,
                } => match field {
                    ["landmark_offset"] => *landmark_offset = value,
                    ["attitude_offset", axis] => *vector_axis(attitude, axis).ok_or_else(unknown)? = value,
                    ["position_offset", axis] => *vector_axis(position, axis).ok_or_else(unknown)? = value,
                    _ => return Err(unknown()),
                },
                InitialEstimate::Explicit { .. } => return Err(unknown()),
            },
            _ => return Err(unknown()),
        }
        Ok(())
    }

    /// Copy of `self` with noise and bias removed from every channel.
    pub fn noise_free(&self) -> Scenario {
        let mut s = self.clone();
        s.noise = NoiseSpec::none();
        s
    }
}

fn validate_channel(prefix: &str, channel: &ChannelNoise, issues: &mut ConfigIssues) {
    if !(channel.scale.is_finite() && channel.scale >= 0.0) {
        issues.push(format!("{prefix}.scale"), format!("must be finite and >= 0 (got {})", channel.scale));
    }
    if let NoiseDistribution::StudentT { dof } = channel.distribution {
        if !(dof.is_finite() && dof > 2.0) {
            issues.push(format!("{prefix}.dof"), format!("must be finite and > 2 (got {dof})"));
        }
    }
    if !finite3(&channel.bias) {
        issues.push(format!("{prefix}.bias"), "must be finite");
    }
}

fn as_integer(path: &str, value: f64) -> Result<u64> {
    if value.is_finite() && value >= 0.0 && libm::trunc(value) == value && value <= u64::MAX as f64 {
        Ok(value as u64)
    } else {
        let mut issues = ConfigIssues::default();
        issues.push(path, format!("must be a non-negative integer (got {value})"));
        Err(Error::ConfigInvalid(issues))
    }
}

fn vector_axis<'a>(v: &'a mut Vector3, axis: &str) -> Option<&'a mut f64> {
    match axis {
        "x" | "0" => Some(&mut v.x),
        "y" | "1" => Some(&mut v.y),
        "z" | "2" => Some(&mut v.z),
        _ => None,
    }
}

fn trajectory_parameter<'a>(family: &'a mut TrajectoryFamily, name: &str) -> Option<&'a mut f64> {
    match (family, name) {
        (TrajectoryFamily::Circle { radius, .. }, "radius")
        | (TrajectoryFamily::Helix { radius, .. }, "radius")
        | (TrajectoryFamily::SinusoidalTumble { radius, .. }, "radius") => Some(radius),
        (TrajectoryFamily::Circle { rate, .. }, "rate")
        | (TrajectoryFamily::Helix { rate, .. }, "rate")
        | (TrajectoryFamily::SinusoidalTumble { rate, .. }, "rate") => Some(rate),
        (TrajectoryFamily::Helix { vertical_rate, .. }, "vertical_rate")
        | (TrajectoryFamily::SinusoidalTumble { vertical_rate, .. }, "vertical_rate") => Some(vertical_rate),
        (TrajectoryFamily::SinusoidalTumble { roll_amplitude, .. }, "roll_amplitude") => Some(roll_amplitude),
        (TrajectoryFamily::SinusoidalTumble { pitch_amplitude, .. }, "pitch_amplitude") => Some(pitch_amplitude),
        _ => None,
    }
}
