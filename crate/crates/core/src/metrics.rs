//! Estimation errors and the Lyapunov function used to check stability.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::liegroup::{rotation_angle, Matrix4, Pose, Vector3};
use crate::observer::ObserverState;

/// Error metrics of one estimate against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub time: f64,
    /// `V`
    pub lyapunov: f64,
    /// Angle (rad) of the rotation block of the pose error.
    pub attitude_error_angle: f64,
    /// Norm (m) of the translation of the pose error.
    pub position_error: f64,
    /// `‖p̃_i‖` per landmark (m).
    pub map_error: Vec<f64>,
    /// Norm of [`relative_map_error`] per landmark (m).
    pub relative_map_error: Vec<f64>,
    /// False when the attitude reconstruction that produced this state failed.
    pub attitude_source_ok: bool,
}

/// `X̃ = X̂ X⁻¹`.
pub fn pose_error(estimate: &Pose, truth: &Pose) -> Pose {
    estimate.compose(&truth.inverse())
}

fn check_index(len: usize, i: usize) -> Result<()> {
    if i < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, len })
    }
}

/// `p̃_i = C_ea p̂_i − C_ba p_i`.
pub fn map_error(
    estimate: &ObserverState,
    truth_pose: &Pose,
    truth_landmarks: &[Vector3],
    i: usize,
) -> Result<Vector3> {
    check_index(estimate.landmarks.len(), i)?;
    check_index(truth_landmarks.len(), i)?;
    Ok(estimate.c_ea().apply(&estimate.landmarks[i])
        - truth_pose.body_from_datum().apply(&truth_landmarks[i]))
}

/// `C_ea (p̂_i − r̂) − C_ba (p_i − r)`: error of the landmark position relative
/// to the vehicle, in body coordinates. Invariant under any common datum-frame
/// translation of the estimated pose and map.
pub fn relative_map_error(
    estimate: &ObserverState,
    truth_pose: &Pose,
    truth_landmarks: &[Vector3],
    i: usize,
) -> Result<Vector3> {
    check_index(estimate.landmarks.len(), i)?;
    check_index(truth_landmarks.len(), i)?;
    let estimated = estimate
        .c_ea()
        .apply(&(estimate.landmarks[i] - estimate.pose_estimate.position));
    let actual = truth_pose
        .body_from_datum()
        .apply(&(truth_landmarks[i] - truth_pose.position));
    Ok(estimated - actual)
}

/// `V = ½ ‖I₄ − X̃‖²_F + Σ ‖p̃_i‖²`.
pub fn lyapunov(pose_err: &Pose, map_errs: &[Vector3]) -> f64 {
    let pose_term = 0.5 * (Matrix4::identity() - pose_err.to_homogeneous()).norm_squared();
    pose_term + map_errs.iter().map(|p| p.norm_squared()).sum::<f64>()
}

/// All metrics of `estimate` against the truth at the same instant.
pub fn evaluate(
    estimate: &ObserverState,
    truth_pose: &Pose,
    truth_landmarks: &[Vector3],
    time: f64,
    attitude_source_ok: bool,
) -> Result<ErrorRecord> {
    if estimate.landmarks.len() != truth_landmarks.len() {
        return Err(Error::LengthMismatch {
            landmarks: estimate.landmarks.len(),
            observations: truth_landmarks.len(),
        });
    }
    let x_err = pose_error(&estimate.pose_estimate, truth_pose);
    let n = truth_landmarks.len();
    let map_errs = (0..n)
        .map(|i| map_error(estimate, truth_pose, truth_landmarks, i))
        .collect::<Result<Vec<_>>>()?;
    let relative = (0..n)
        .map(|i| relative_map_error(estimate, truth_pose, truth_landmarks, i).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorRecord {
        time,
        lyapunov: lyapunov(&x_err, &map_errs),
        attitude_error_angle: rotation_angle(&x_err.attitude),
        position_error: x_err.position.norm(),
        map_error: map_errs.iter().map(|p| p.norm()).collect(),
        relative_map_error: relative,
        attitude_source_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::{exp_so3, Rotation};
    use alloc::vec;
    use core::f64::consts::PI;

    fn sample_pose(seed: f64) -> Pose {
        Pose::new(
            exp_so3(&Vector3::new(0.3 * seed, -0.5, 0.2 + seed)),
            Vector3::new(seed, 2.0, -1.0),
        )
    }

    #[test]
    fn pose_error_identities() {
        let x = sample_pose(0.7);
        let e = pose_error(&x, &x);
        assert!((e.to_homogeneous() - Matrix4::identity()).norm() < 1e-15);
        assert_eq!(pose_error(&x, &Pose::identity()), x);
    }

    #[test]
    fn pose_error_recomposes() {
        let est = sample_pose(0.3);
        let truth = sample_pose(-1.1);
        let back = pose_error(&est, &truth).compose(&truth);
        assert!((back.to_homogeneous() - est.to_homogeneous()).norm() < 1e-12);
    }

    #[test]
    fn map_error_reduces_to_difference() {
        let state = ObserverState::new(Pose::identity(), vec![Vector3::new(1.0, 2.0, 3.0)], 0.0);
        let truth = [Vector3::new(0.5, 2.0, 4.0)];
        let e = map_error(&state, &Pose::identity(), &truth, 0).unwrap();
        assert_eq!(e, Vector3::new(0.5, 0.0, -1.0));
        assert!(matches!(
            map_error(&state, &Pose::identity(), &truth, 1),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn relative_error_ignores_shared_translation() {
        let c_ba = exp_so3(&Vector3::new(0.2, 0.4, -0.9));
        let truth_pose = Pose::from_body_from_datum(c_ba, Vector3::new(1.0, 1.0, 0.0));
        let truth = [Vector3::new(3.0, -1.0, 2.0), Vector3::new(-2.0, 0.0, 1.0)];
        let shift = Vector3::new(0.7, -3.0, 11.0);
        let state = ObserverState::new(
            Pose::from_body_from_datum(c_ba, truth_pose.position + shift),
            truth.iter().map(|p| p + shift).collect(),
            0.0,
        );
        for i in 0..2 {
            assert_eq!(relative_map_error(&state, &truth_pose, &truth, i).unwrap().norm(), 0.0);
            assert!(map_error(&state, &truth_pose, &truth, i).unwrap().norm() > 1.0);
        }
    }

    #[test]
    fn lyapunov_values() {
        assert_eq!(lyapunov(&Pose::identity(), &[Vector3::zeros()]), 0.0);
        let shift = Pose::new(Rotation::identity(), Vector3::x());
        assert_eq!(lyapunov(&shift, &[]), 0.5);
        let half_turn = Pose::new(exp_so3(&Vector3::new(0.0, 0.0, PI)), Vector3::zeros());
        assert!((lyapunov(&half_turn, &[]) - 4.0).abs() < 1e-14);
        let v = lyapunov(&Pose::identity(), &[Vector3::new(1.0, 2.0, 2.0)]);
        assert_eq!(v, 9.0);
    }

    #[test]
    fn evaluate_at_truth_is_zero() {
        let pose = sample_pose(0.4);
        let landmarks = vec![Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 5.0, -1.0)];
        let state = ObserverState::new(pose, landmarks.clone(), 2.0);
        let rec = evaluate(&state, &pose, &landmarks, 2.0, true).unwrap();
        assert!(rec.lyapunov < 1e-28);
        assert!(rec.attitude_error_angle < 1e-14);
        assert!(rec.position_error < 1e-14);
        assert!(rec.map_error.iter().chain(&rec.relative_map_error).all(|e| *e < 1e-14));
    }
}
