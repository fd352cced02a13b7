//! Attitude reconstruction from paired direction observations.
//!
//! Given pairs `(body_i, datum_i)` related by `body_i ≈ C · datum_i`, finds
//! the rotation `C` minimizing `Σ ‖b̂_i − C d̂_i‖²` over the unit-normalized
//! pairs (Wahba's problem), solved in closed form through the SVD of the
//! attitude profile matrix `B = Σ b̂_i d̂_iᵀ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::liegroup::{Matrix3, Rotation, Vector3};

/// Directions closer than this angle (rad) are treated as collinear.
pub const COLLINEARITY_THRESHOLD: f64 = 1e-4;
/// Vectors shorter than this carry no direction.
pub const MIN_VECTOR_NORM: f64 = 1e-12;

/// One observation pair: `body` measured in the vehicle frame, `datum` the
/// same vector predicted in the map frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorPair {
    pub body: Vector3,
    pub datum: Vector3,
}

impl VectorPair {
    pub fn new(body: Vector3, datum: Vector3) -> Self {
        Self { body, datum }
    }
}

/// Number of linearly independent datum directions, counted by pivoted
/// Gram–Schmidt: a direction adds to the rank when its angle to the span of
/// those already accepted exceeds [`COLLINEARITY_THRESHOLD`].
pub fn collinearity_rank(pairs: &[VectorPair]) -> usize {
    let sin_threshold = libm::sin(COLLINEARITY_THRESHOLD);
    let mut remaining: Vec<Vector3> = pairs
        .iter()
        .filter_map(|p| {
            let n = p.datum.norm();
            (n >= MIN_VECTOR_NORM).then(|| p.datum / n)
        })
        .collect();
    let mut rank = 0;
    while rank < 3 {
        // Residuals of unit vectors are the sines of their angles to the span.
        let best = remaining
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((index, norm)) = best else { break };
        if norm <= sin_threshold {
            break;
        }
        let basis = remaining.swap_remove(index) / norm;
        for r in remaining.iter_mut() {
            *r -= basis * basis.dot(r);
        }
        rank += 1;
    }
    rank
}

/// Rotation `C` best mapping each `datum` direction onto its `body` direction.
pub fn solve_attitude(pairs: &[VectorPair]) -> Result<Rotation> {
    for (index, pair) in pairs.iter().enumerate() {
        let too_short = |v: &Vector3| v.norm().is_nan() || v.norm() < MIN_VECTOR_NORM;
        if too_short(&pair.body) || too_short(&pair.datum) {
            return Err(Error::ZeroVector { index });
        }
    }
    if pairs.len() < 2 || collinearity_rank(pairs) < 2 {
        return Err(Error::DegenerateGeometry);
    }

    let profile = pairs.iter().fold(Matrix3::zeros(), |acc, p| {
        acc + p.body.normalize() * p.datum.normalize().transpose()
    });
    let svd = profile.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::DegenerateGeometry),
    };
    let sign = (u.determinant() * v_t.determinant()).signum();
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, sign));
    Ok(Rotation::from_matrix_unchecked(u * correction * v_t))
}
