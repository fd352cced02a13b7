use geoslam_core::attitude::{collinearity_rank, solve_attitude, VectorPair, COLLINEARITY_THRESHOLD};
use geoslam_core::liegroup::{exp_so3, Matrix3, Vector3};
use geoslam_core::simulator::sim_rng;
use geoslam_core::Error;
use proptest::prelude::*;
use rand::Rng;

/// Count of singular values of the stacked unit directions above the
/// threshold, relative to the largest.
fn svd_rank(pairs: &[VectorPair]) -> usize {
    if pairs.is_empty() {
        return 0;
    }
    // singular values of the stacked directions are the square roots of the
    // eigenvalues of their 3×3 Gram matrix
    let gram = pairs.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p.datum.normalize();
        acc + d * d.transpose()
    });
    let sv: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).collect();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > COLLINEARITY_THRESHOLD * largest).count()
}

fn vec3(range: f64) -> impl Strategy<Value = Vector3> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

fn datum_set() -> impl Strategy<Value = Vec<Vector3>> {
    prop::collection::vec(vec3(10.0).prop_filter("long enough", |v| v.norm() > 0.1), 3..=10)
        .prop_filter("non-degenerate", |ds| {
            let pairs: Vec<_> = ds.iter().map(|d| VectorPair::new(*d, *d)).collect();
            svd_rank(&pairs) >= 2 && collinearity_rank(&pairs) >= 2
        })
}

fn generate(rotation: &Matrix3, datums: &[Vector3]) -> Vec<VectorPair> {
    datums
        .iter()
        .map(|d| VectorPair::new(rotation * d, *d))
        .collect()
}

#[test]
fn random_directions_have_full_rank() {
    let mut rng = sim_rng(2024);
    let pairs: Vec<_> = (0..10)
        .map(|_| {
            let d = Vector3::new(rng.random(), rng.random(), rng.random()) * 2.0
                - Vector3::new(1.0, 1.0, 1.0);
            VectorPair::new(d, d)
        })
        .collect();
    assert_eq!(svd_rank(&pairs), 3);
    assert_eq!(collinearity_rank(&pairs), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_pairs_recover_rotation(axis_angle in vec3(3.0), datums in datum_set()) {
        let truth = exp_so3(&axis_angle);
        let solved = solve_attitude(&generate(truth.matrix(), &datums)).unwrap();
        prop_assert!((solved.into_matrix() - truth.into_matrix()).norm() < 1e-10);
        prop_assert!(solved.orthonormality_defect() < 1e-9);
        prop_assert!((solved.matrix().determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn noisy_pairs_still_give_a_rotation(
        axis_angle in vec3(3.0),
        datums in datum_set(),
        noise in prop::collection::vec(vec3(0.5), 10),
    ) {
        let truth = exp_so3(&axis_angle);
        let mut pairs = generate(truth.matrix(), &datums);
        for (p, n) in pairs.iter_mut().zip(&noise) {
            p.body += n;
        }
        if let Ok(solved) = solve_attitude(&pairs) {
            prop_assert!(solved.orthonormality_defect() < 1e-9);
            prop_assert!((solved.matrix().determinant() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rotating_the_body_side_rotates_the_answer(
        axis_angle in vec3(3.0),
        q_axis in vec3(3.0),
        datums in datum_set(),
        noise in prop::collection::vec(vec3(0.2), 10),
    ) {
        let truth = exp_so3(&axis_angle);
        let q = exp_so3(&q_axis);
        let mut pairs = generate(truth.matrix(), &datums);
        for (p, n) in pairs.iter_mut().zip(&noise) {
            p.body += n;
        }
        let rotated: Vec<_> = pairs.iter().map(|p| VectorPair::new(q.apply(&p.body), p.datum)).collect();
        if let (Ok(a), Ok(b)) = (solve_attitude(&pairs), solve_attitude(&rotated)) {
            prop_assert!(((q * a).into_matrix() - b.into_matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn pair_order_does_not_matter(
        axis_angle in vec3(3.0),
        datums in datum_set(),
        noise in prop::collection::vec(vec3(0.2), 10),
        seed in any::<u64>(),
    ) {
        let truth = exp_so3(&axis_angle);
        let mut pairs = generate(truth.matrix(), &datums);
        for (p, n) in pairs.iter_mut().zip(&noise) {
            p.body += n;
        }
        let mut shuffled = pairs.clone();
        let mut rng = sim_rng(seed);
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        if let (Ok(a), Ok(b)) = (solve_attitude(&pairs), solve_attitude(&shuffled)) {
            prop_assert!((a.into_matrix() - b.into_matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn collinear_sets_are_rejected(
        dir in vec3(1.0).prop_filter("non-zero", |v| v.norm() > 1e-2),
        scales in prop::collection::vec(prop_oneof![-10.0..-0.1f64, 0.1..10.0f64], 2..10),
        axis_angle in vec3(3.0),
    ) {
        let truth = exp_so3(&axis_angle);
        let datums: Vec<_> = scales.iter().map(|s| dir * *s).collect();
        let pairs = generate(truth.matrix(), &datums);
        prop_assert_eq!(collinearity_rank(&pairs), 1);
        prop_assert_eq!(solve_attitude(&pairs), Err(Error::DegenerateGeometry));
    }
}
