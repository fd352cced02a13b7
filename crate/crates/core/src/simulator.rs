//! Ground-truth trajectories and synthetic body-frame measurements.
//!
//! Every trajectory obeys `d/dt X = X [[ω×, v], [0, 0]]` with `X` the vehicle
//! pose, so `ω` and `v` are body-frame rates and `d/dt r_a = C_baᵀ v`.
//! Trajectories are expressed relative to an initial pose `X0`:
//! `X(t) = X0 · T(0)⁻¹ · T(t)` where `T` is the family's closed form, which
//! leaves the body rates of `T` unchanged.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::liegroup::{exp_se3, exp_so3, Pose, Vector3};
use crate::observer::MeasurementFrame;

/// Portable, seedable generator used for all simulated randomness:
/// ChaCha with 8 rounds, keyed through `SeedableRng::seed_from_u64`.
pub type SimRng = ChaCha8Rng;

pub fn sim_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of the ground-truth motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryFamily {
    Static,
    /// Constant yaw rate `rate` (rad/s) with forward speed `radius · rate`.
    Circle { radius: f64, rate: f64 },
    /// A circle climbing at `vertical_rate` (m/s) along the body z axis.
    Helix {
        radius: f64,
        rate: f64,
        vertical_rate: f64,
    },
    /// Circular orbit with sinusoidal roll and pitch:
    /// yaw `rate·t`, pitch `pitch_amplitude·cos(rate·t)`, roll
    /// `roll_amplitude·sin(rate·t)`, position
    /// `(radius cos(rate·t), radius sin(rate·t), vertical_rate·t)`.
    SinusoidalTumble {
        radius: f64,
        rate: f64,
        vertical_rate: f64,
        roll_amplitude: f64,
        pitch_amplitude: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    pub family: TrajectoryFamily,
    pub initial_pose: Pose,
}

/// Vehicle pose and body-frame rates at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motion {
    pub time: f64,
    pub pose: Pose,
    /// rad/s
    pub omega_body: Vector3,
    /// m/s
    pub velocity_body: Vector3,
}

impl Motion {
    pub fn with_landmarks(self, landmarks: &[Vector3]) -> GroundTruth<'_> {
        GroundTruth {
            motion: self,
            landmarks,
        }
    }
}

/// True motion plus the fixed landmark positions `p_a^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth<'a> {
    pub motion: Motion,
    pub landmarks: &'a [Vector3],
}

/// Closed-form pose and analytically exact body rates of `spec` at time `t`.
pub fn truth_at(spec: &TrajectorySpec, t: f64) -> Motion {
    let (relative, omega_body, velocity_body) = match spec.family {
        TrajectoryFamily::Static => (Pose::identity(), Vector3::zeros(), Vector3::zeros()),
        TrajectoryFamily::Circle { radius, rate } => {
            constant_twist(t, Vector3::new(0.0, 0.0, rate), Vector3::new(radius * rate, 0.0, 0.0))
        }
        TrajectoryFamily::Helix {
            radius,
            rate,
            vertical_rate,
        } => constant_twist(
            t,
            Vector3::new(0.0, 0.0, rate),
            Vector3::new(radius * rate, 0.0, vertical_rate),
        ),
        TrajectoryFamily::SinusoidalTumble {
            radius,
            rate,
            vertical_rate,
            roll_amplitude,
            pitch_amplitude,
        } => {
            let tumble = |t: f64| {
                tumble_at(t, radius, rate, vertical_rate, roll_amplitude, pitch_amplitude)
            };
            let (start, _, _) = tumble(0.0);
            let (now, omega, velocity) = tumble(t);
            (start.inverse().compose(&now), omega, velocity)
        }
    };
    Motion {
        time: t,
        pose: spec.initial_pose.compose(&relative),
        omega_body,
        velocity_body,
    }
}

fn constant_twist(t: f64, omega: Vector3, velocity: Vector3) -> (Pose, Vector3, Vector3) {
    (exp_se3(&(omega * t), &(velocity * t)), omega, velocity)
}

fn tumble_at(
    t: f64,
    radius: f64,
    rate: f64,
    vertical_rate: f64,
    roll_amplitude: f64,
    pitch_amplitude: f64,
) -> (Pose, Vector3, Vector3) {
    let phase = rate * t;
    let (sin_phase, cos_phase) = (libm::sin(phase), libm::cos(phase));

    let yaw = phase;
    let pitch = pitch_amplitude * cos_phase;
    let roll = roll_amplitude * sin_phase;
    let yaw_rate = rate;
    let pitch_rate = -pitch_amplitude * rate * sin_phase;
    let roll_rate = roll_amplitude * rate * cos_phase;

    // C_baᵀ = Rz(yaw) Ry(pitch) Rx(roll)
    let attitude = exp_so3(&Vector3::new(0.0, 0.0, yaw))
        * exp_so3(&Vector3::new(0.0, pitch, 0.0))
        * exp_so3(&Vector3::new(roll, 0.0, 0.0));

    let (sr, cr) = (libm::sin(roll), libm::cos(roll));
    let (sp, cp) = (libm::sin(pitch), libm::cos(pitch));
    let omega = Vector3::new(
        roll_rate - yaw_rate * sp,
        pitch_rate * cr + yaw_rate * cp * sr,
        -pitch_rate * sr + yaw_rate * cp * cr,
    );

    let position = Vector3::new(radius * cos_phase, radius * sin_phase, vertical_rate * t);
    let position_rate = Vector3::new(-radius * rate * sin_phase, radius * rate * cos_phase, vertical_rate);
    let velocity = attitude.transpose().apply(&position_rate);

    (Pose::new(attitude, position), omega, velocity)
}

/// Sampling law for one sensor channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseDistribution {
    None,
    /// Zero-mean normal with standard deviation `scale`.
    Gaussian,
    /// Student-t with `dof` degrees of freedom, multiplied by `scale`.
    StudentT { dof: f64 },
    /// Uniform on `[-scale, scale]`.
    UniformBounded,
}

/// Additive i.i.d. per-axis noise plus a constant bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelNoise {
    pub distribution: NoiseDistribution,
    pub scale: f64,
    pub bias: Vector3,
}

impl ChannelNoise {
    pub const fn none() -> Self {
        Self {
            distribution: NoiseDistribution::None,
            scale: 0.0,
            bias: Vector3::new(0.0, 0.0, 0.0),
        }
    }

    pub fn gaussian(scale: f64) -> Self {
        Self {
            distribution: NoiseDistribution::Gaussian,
            scale,
            bias: Vector3::zeros(),
        }
    }

    fn sample_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.distribution {
            NoiseDistribution::None => 0.0,
            NoiseDistribution::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                z * self.scale
            }
            NoiseDistribution::StudentT { dof } => {
                // dof > 2 is enforced by scenario validation
                let t = StudentT::new(dof).map(|d| d.sample(rng)).unwrap_or(0.0);
                t * self.scale
            }
            NoiseDistribution::UniformBounded => {
                let u: f64 = rng.random();
                (2.0 * u - 1.0) * self.scale
            }
        }
    }

    /// Corrupts `exact` with bias and one noise draw per axis.
    pub fn corrupt<R: Rng + ?Sized>(&self, exact: &Vector3, rng: &mut R) -> Vector3 {
        if self.distribution == NoiseDistribution::None {
            return exact + self.bias;
        }
        let x = self.sample_scalar(rng);
        let y = self.sample_scalar(rng);
        let z = self.sample_scalar(rng);
        exact + self.bias + Vector3::new(x, y, z)
    }
}

impl Default for ChannelNoise {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSpec {
    pub omega: ChannelNoise,
    pub velocity: ChannelNoise,
    pub landmark: ChannelNoise,
}

impl NoiseSpec {
    pub const fn none() -> Self {
        Self {
            omega: ChannelNoise::none(),
            velocity: ChannelNoise::none(),
            landmark: ChannelNoise::none(),
        }
    }
}

/// Synthesizes one measurement frame: `ω`, `v` and `s_i = C_ba (p_i − r_a)`,
/// each corrupted by its channel's noise. Draw order is ω, v, then landmarks
/// in index order, x before y before z.
pub fn measure<R: Rng + ?Sized>(truth: &GroundTruth<'_>, noise: &NoiseSpec, rng: &mut R) -> MeasurementFrame {
    let motion = &truth.motion;
    let c_ba = motion.pose.body_from_datum();
    let omega = noise.omega.corrupt(&motion.omega_body, rng);
    let velocity = noise.velocity.corrupt(&motion.velocity_body, rng);
    let landmark_obs = truth
        .landmarks
        .iter()
        .map(|p| {
            let exact = c_ba.apply(&(p - motion.pose.position));
            noise.landmark.corrupt(&exact, rng)
        })
        .collect();
    MeasurementFrame {
        omega,
        velocity,
        landmark_obs,
        time: motion.time,
    }
}

/// Axis-aligned box `min ≤ p ≤ max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandmarkBox {
    pub min: Vector3,
    pub max: Vector3,
}

/// `count` i.i.d. uniform points in `region`. A box with a zero-width side
/// collapses that coordinate.
pub fn place_landmarks<R: Rng + ?Sized>(count: usize, region: &LandmarkBox, rng: &mut R) -> Vec<Vector3> {
    let extent = region.max - region.min;
    (0..count)
        .map(|_| {
            let u = Vector3::new(rng.random(), rng.random(), rng.random());
            region.min + extent.component_mul(&u)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn static_family_does_not_move() {
        let start = Pose::new(exp_so3(&Vector3::new(0.1, 0.2, 0.3)), Vector3::new(1.0, 2.0, 3.0));
        let spec = TrajectorySpec {
            family: TrajectoryFamily::Static,
            initial_pose: start,
        };
        let m = truth_at(&spec, 12.5);
        assert_eq!(m.pose, start);
        assert_eq!(m.omega_body, Vector3::zeros());
        assert_eq!(m.velocity_body, Vector3::zeros());
    }

    #[test]
    fn circle_is_periodic() {
        let spec = TrajectorySpec {
            family: TrajectoryFamily::Circle { radius: 1.0, rate: 1.0 },
            initial_pose: Pose::identity(),
        };
        let a = truth_at(&spec, 0.0).pose.to_homogeneous();
        let b = truth_at(&spec, 2.0 * PI).pose.to_homogeneous();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn tumble_starts_at_initial_pose() {
        let start = Pose::new(exp_so3(&Vector3::new(0.0, 0.0, 1.0)), Vector3::new(1.0, -1.0, 0.0));
        let spec = TrajectorySpec {
            family: TrajectoryFamily::SinusoidalTumble {
                radius: 3.0,
                rate: 0.5,
                vertical_rate: 0.1,
                roll_amplitude: 0.3,
                pitch_amplitude: 0.2,
            },
            initial_pose: start,
        };
        let m = truth_at(&spec, 0.0);
        assert!((m.pose.to_homogeneous() - start.to_homogeneous()).norm() < 1e-15);
    }

    #[test]
    fn noiseless_measurement_at_identity() {
        let landmarks = [Vector3::new(1.0, 2.0, 3.0)];
        let motion = Motion {
            time: 0.0,
            pose: Pose::identity(),
            omega_body: Vector3::x(),
            velocity_body: Vector3::y(),
        };
        let mut rng = sim_rng(1);
        let frame = measure(&motion.with_landmarks(&landmarks), &NoiseSpec::none(), &mut rng);
        assert_eq!(frame.landmark_obs, vec![Vector3::new(1.0, 2.0, 3.0)]);
        assert_eq!(frame.omega, Vector3::x());
        assert_eq!(frame.velocity, Vector3::y());
    }

    #[test]
    fn bias_is_added_without_noise() {
        let channel = ChannelNoise {
            distribution: NoiseDistribution::None,
            scale: 5.0,
            bias: Vector3::new(0.1, 0.0, -0.1),
        };
        let mut rng = sim_rng(0);
        assert_eq!(channel.corrupt(&Vector3::zeros(), &mut rng), Vector3::new(0.1, 0.0, -0.1));
    }

    #[test]
    fn uniform_noise_stays_in_bounds() {
        let channel = ChannelNoise {
            distribution: NoiseDistribution::UniformBounded,
            scale: 0.25,
            bias: Vector3::zeros(),
        };
        let mut rng = sim_rng(3);
        for _ in 0..1000 {
            let v = channel.corrupt(&Vector3::zeros(), &mut rng);
            assert!(v.iter().all(|x| x.abs() <= 0.25));
        }
    }

    #[test]
    fn landmark_placement_is_reproducible() {
        let region = LandmarkBox {
            min: Vector3::zeros(),
            max: Vector3::new(1.0, 1.0, 1.0),
        };
        let a = place_landmarks(1, &region, &mut sim_rng(42));
        let b = place_landmarks(1, &region, &mut sim_rng(42));
        assert_eq!(a, b);
        assert!(a[0].iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn degenerate_box_collapses() {
        let region = LandmarkBox {
            min: Vector3::new(2.0, -1.0, 0.0),
            max: Vector3::new(2.0, -1.0, 0.0),
        };
        for p in place_landmarks(5, &region, &mut sim_rng(9)) {
            assert_eq!(p, Vector3::new(2.0, -1.0, 0.0));
        }
    }

    #[test]
    fn body_velocity_convention() {
        // Start facing +y: forward body velocity moves the vehicle along datum +y.
        let start = Pose::from_body_from_datum(
            exp_so3(&Vector3::new(0.0, 0.0, PI / 2.0)).transpose(),
            Vector3::zeros(),
        );
        let spec = TrajectorySpec {
            family: TrajectoryFamily::Helix { radius: 1e6, rate: 1e-6, vertical_rate: 0.0 },
            initial_pose: start,
        };
        let m = truth_at(&spec, 1.0);
        assert!((m.pose.position - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-6);
        let heading = m.pose.attitude.apply(&Vector3::x());
        assert!((heading - Vector3::y()).norm() < 1e-6);
    }
}
