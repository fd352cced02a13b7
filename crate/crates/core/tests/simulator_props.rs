use geoslam_core::liegroup::{exp_so3, Matrix4, Pose, Vector3};
use geoslam_core::simulator::{
    measure, place_landmarks, sim_rng, truth_at, ChannelNoise, LandmarkBox, NoiseDistribution, NoiseSpec,
    TrajectoryFamily, TrajectorySpec,
};
use rand::Rng;

fn families() -> Vec<TrajectoryFamily> {
    vec![
        TrajectoryFamily::Static,
        TrajectoryFamily::Circle { radius: 3.0, rate: 0.5 },
        TrajectoryFamily::Helix {
            radius: 2.0,
            rate: -0.8,
            vertical_rate: 0.3,
        },
        TrajectoryFamily::SinusoidalTumble {
            radius: 3.0,
            rate: 0.7,
            vertical_rate: 0.2,
            roll_amplitude: 0.4,
            pitch_amplitude: 0.3,
        },
    ]
}

/// Body twist recovered from a central difference of the pose:
/// `X⁻¹ dX/dt = [[ω×, v], [0, 0]]`.
fn finite_difference_twist(spec: &TrajectorySpec, t: f64, h: f64) -> (Vector3, Vector3) {
    let ahead = truth_at(spec, t + h).pose.to_homogeneous();
    let behind = truth_at(spec, t - h).pose.to_homogeneous();
    let x_inv: Matrix4 = truth_at(spec, t).pose.inverse().to_homogeneous();
    let a = x_inv * (ahead - behind) / (2.0 * h);
    let omega = Vector3::new(
        0.5 * (a[(2, 1)] - a[(1, 2)]),
        0.5 * (a[(0, 2)] - a[(2, 0)]),
        0.5 * (a[(1, 0)] - a[(0, 1)]),
    );
    (omega, Vector3::new(a[(0, 3)], a[(1, 3)], a[(2, 3)]))
}

#[test]
fn kinematics_agree_with_finite_differences() {
    let start = Pose::new(exp_so3(&Vector3::new(0.3, -0.4, 1.0)), Vector3::new(1.0, -2.0, 0.5));
    let mut rng = sim_rng(77);
    for family in families() {
        let spec = TrajectorySpec {
            family,
            initial_pose: start,
        };
        for _ in 0..100 {
            let t = rng.random_range(0.001..30.0);
            let truth = truth_at(&spec, t);
            let (omega, v) = finite_difference_twist(&spec, t, 1e-6);
            assert!(
                (omega - truth.omega_body).norm() < 1e-6,
                "{family:?} t={t}: ω {omega:?} vs {:?}",
                truth.omega_body
            );
            assert!(
                (v - truth.velocity_body).norm() < 1e-6,
                "{family:?} t={t}: v {v:?} vs {:?}",
                truth.velocity_body
            );
        }
    }
}

#[test]
fn gaussian_sample_deviation() {
    let sigma = 0.05;
    let channel = ChannelNoise::gaussian(sigma);
    let mut rng = sim_rng(5);
    let n = 100_000;
    let samples: Vec<Vector3> = (0..n).map(|_| channel.corrupt(&Vector3::zeros(), &mut rng)).collect();
    for axis in 0..3 {
        let mean = samples.iter().map(|s| s[axis]).sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s[axis] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        assert!((sd - sigma).abs() < 0.03 * sigma, "axis {axis}: sd {sd}");
    }
}

#[test]
fn student_t_has_heavier_tails_than_gaussian() {
    let mut rng = sim_rng(8);
    let heavy = ChannelNoise {
        distribution: NoiseDistribution::StudentT { dof: 3.0 },
        scale: 1.0,
        bias: Vector3::zeros(),
    };
    let light = ChannelNoise::gaussian(1.0);
    let count_big = |c: &ChannelNoise, rng: &mut _| {
        (0..20_000)
            .filter(|_| c.corrupt(&Vector3::zeros(), rng).x.abs() > 4.0)
            .count()
    };
    let heavy_big = count_big(&heavy, &mut rng);
    let light_big = count_big(&light, &mut rng);
    assert!(heavy_big > 10 * light_big.max(1), "{heavy_big} vs {light_big}");
}

#[test]
fn landmark_mean_is_box_center() {
    let region = LandmarkBox {
        min: Vector3::zeros(),
        max: Vector3::new(1.0, 1.0, 1.0),
    };
    let points = place_landmarks(1000, &region, &mut sim_rng(10));
    let mean = points.iter().fold(Vector3::zeros(), |acc, p| acc + p) / 1000.0;
    for axis in 0..3 {
        assert!((mean[axis] - 0.5).abs() < 0.05, "axis {axis}: {}", mean[axis]);
    }
}

#[test]
fn measurement_streams_are_deterministic() {
    let spec = TrajectorySpec {
        family: TrajectoryFamily::Circle { radius: 2.0, rate: 0.3 },
        initial_pose: Pose::identity(),
    };
    let noise = NoiseSpec {
        omega: ChannelNoise::gaussian(0.01),
        velocity: ChannelNoise {
            distribution: NoiseDistribution::UniformBounded,
            scale: 0.02,
            bias: Vector3::new(0.0, 0.001, 0.0),
        },
        landmark: ChannelNoise {
            distribution: NoiseDistribution::StudentT { dof: 3.0 },
            scale: 0.05,
            bias: Vector3::zeros(),
        },
    };
    let landmarks = [Vector3::new(1.0, 2.0, 3.0), Vector3::new(-4.0, 0.0, 1.0)];
    let stream = |seed| {
        let mut rng = sim_rng(seed);
        (0..200)
            .map(|k| measure(&truth_at(&spec, k as f64 * 0.01).with_landmarks(&landmarks), &noise, &mut rng))
            .collect::<Vec<_>>()
    };
    let a = stream(3);
    let b = stream(3);
    let c = stream(4);
    assert_eq!(a, b);
    assert_ne!(a, c);
}
