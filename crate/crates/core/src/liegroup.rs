//! SO(3) and SE(3) primitives.
//!
//! Conventions:
//! - `hat(v) * w == v.cross(&w)` (right-handed cross-product matrix).
//! - A [`Pose`] stores the rotation block of its 4×4 homogeneous matrix,
//!   `[[C, r], [0, 1]]`. For the vehicle pose that block is the transpose of
//!   the body-from-datum direction cosine matrix, so `Pose::body_from_datum`
//!   returns `C^T`.

use core::ops::Mul;

use crate::error::{Error, Result};

pub type Vector3 = nalgebra::Vector3<f64>;
pub type Matrix3 = nalgebra::Matrix3<f64>;
pub type Matrix4 = nalgebra::Matrix4<f64>;

/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` for a matrix to count as a rotation.
pub const ROTATION_TOLERANCE: f64 = 1e-9;
/// Tolerance on `‖M + Mᵀ‖_F` accepted by [`vee`].
pub const SKEW_TOLERANCE: f64 = 1e-9;
/// Below this angle the exponentials switch to their series expansions.
pub const SMALL_ANGLE: f64 = 1e-8;

/// A 3×3 direction cosine matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3);

impl Rotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps `m` after checking orthonormality and `det = +1` to [`ROTATION_TOLERANCE`].
    pub fn from_matrix(m: Matrix3) -> Result<Self> {
        if orthonormality_defect(&m) <= ROTATION_TOLERANCE
            && (m.determinant() - 1.0).abs() <= ROTATION_TOLERANCE
        {
            Ok(Self(m))
        } else {
            Err(Error::DegenerateMatrix {
                det: m.determinant(),
            })
        }
    }

    /// Wraps `m` without checking. Callers must guarantee the rotation invariants.
    pub fn from_matrix_unchecked(m: Matrix3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix3 {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn apply(&self, v: &Vector3) -> Vector3 {
        self.0 * v
    }

    /// `‖RᵀR − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.0)
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<Vector3> for Rotation {
    type Output = Vector3;

    fn mul(self, rhs: Vector3) -> Vector3 {
        self.0 * rhs
    }
}

fn orthonormality_defect(m: &Matrix3) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// An element of SE(3): `[[attitude, position], [0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub attitude: Rotation,
    pub position: Vector3,
}

impl Pose {
    pub fn new(attitude: Rotation, position: Vector3) -> Self {
        Self { attitude, position }
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Vector3::zeros())
    }

    /// Builds a pose from the body-from-datum DCM `C_ba` and the datum-frame position.
    pub fn from_body_from_datum(c_ba: Rotation, position: Vector3) -> Self {
        Self::new(c_ba.transpose(), position)
    }

    /// `C_ba`, the transpose of the stored rotation block.
    pub fn body_from_datum(&self) -> Rotation {
        self.attitude.transpose()
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            attitude: self.attitude * other.attitude,
            position: self.attitude.apply(&other.position) + self.position,
        }
    }

    /// Closed-form inverse `[[Cᵀ, −Cᵀ r], [0, 1]]`.
    pub fn inverse(&self) -> Pose {
        let ct = self.attitude.transpose();
        Pose {
            attitude: ct,
            position: -ct.apply(&self.position),
        }
    }

    pub fn to_homogeneous(&self) -> Matrix4 {
        let mut h = Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(self.attitude.matrix());
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        h
    }

    pub fn is_finite(&self) -> bool {
        self.attitude.matrix().iter().all(|x| x.is_finite())
            && self.position.iter().all(|x| x.is_finite())
    }
}

/// Skew-symmetric cross-product matrix of `v`.
#[rustfmt::skip]
pub fn hat(v: &Vector3) -> Matrix3 {
    Matrix3::new(
         0.0, -v.z,  v.y,
         v.z,  0.0, -v.x,
        -v.y,  v.x,  0.0,
    )
}

/// Inverse of [`hat`]: returns `(m32, m13, m21)`.
pub fn vee(m: &Matrix3) -> Result<Vector3> {
    let asymmetry = (m + m.transpose()).norm();
    if asymmetry.is_nan() || asymmetry > SKEW_TOLERANCE {
        return Err(Error::NotSkewSymmetric { asymmetry });
    }
    Ok(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// Coefficients `(sin θ/θ, (1 − cos θ)/θ², (θ − sin θ)/θ³)` shared by both exponentials.
fn exp_coefficients(theta: f64) -> (f64, f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0)
    } else {
        let t2 = theta * theta;
        let s = libm::sin(theta);
        let half = libm::sin(0.5 * theta);
        // 2 sin²(θ/2) avoids the cancellation in 1 − cos θ.
        (s / theta, 2.0 * half * half / t2, (theta - s) / (t2 * theta))
    }
}

/// Rodrigues formula: rotation by `‖axis_angle‖` radians about its direction.
pub fn exp_so3(axis_angle: &Vector3) -> Rotation {
    let k = hat(axis_angle);
    let (a, b, _) = exp_coefficients(axis_angle.norm());
    Rotation(Matrix3::identity() + k * a + k * k * b)
}

/// Exponential of the twist `[[hat(omega), v], [0, 0]]`.
pub fn exp_se3(omega: &Vector3, v: &Vector3) -> Pose {
    let k = hat(omega);
    let k2 = k * k;
    let (a, b, c) = exp_coefficients(omega.norm());
    let rotation = Matrix3::identity() + k * a + k2 * b;
    let left_jacobian = Matrix3::identity() + k * b + k2 * c;
    Pose {
        attitude: Rotation(rotation),
        position: left_jacobian * v,
    }
}

/// Nearest rotation to `m` in the Frobenius norm (polar factor `U Vᵀ`).
pub fn reorthonormalize(m: &Matrix3) -> Result<Rotation> {
    let det = m.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(Error::DegenerateMatrix { det });
    }
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::DegenerateMatrix { det }),
    };
    if svd.singular_values.min() <= f64::EPSILON * svd.singular_values.max() {
        return Err(Error::DegenerateMatrix { det });
    }
    Ok(Rotation(u * v_t))
}

/// Rotation angle in `[0, π]`.
///
/// Evaluated as `atan2(sin θ, cos θ)` with `cos θ = (tr R − 1)/2` and
/// `sin θ = ‖vee(R − Rᵀ)‖/2`, which agrees with the clamped arccos of the
/// trace but keeps full precision near 0 and π.
pub fn rotation_angle(r: &Rotation) -> f64 {
    let m = r.matrix();
    let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let sin = 0.5
        * Vector3::new(
            m[(2, 1)] - m[(1, 2)],
            m[(0, 2)] - m[(2, 0)],
            m[(1, 0)] - m[(0, 1)],
        )
        .norm();
    libm::atan2(sin, cos)
}
