//! Integration of the spin-s Lie-algebra representation to a unitary
//! SO(3) representation.
//!
//! The hat map identifies (R^3, cross product) with (so(3), bracket); the
//! rescaled spin generators X_i = (1/i hbar) Q_{J^i} satisfy the same real
//! brackets, so x -> sum x_i X_i is a Lie algebra homomorphism and
//! U(g) = exp(rho(log g)) a group homomorphism. The truncated
//! Campbell-Baker-Hausdorff series is used only as a verification oracle at
//! small norms, never to construct U.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{matrix_exp, DenseMatrix};
use crate::spin::SpinRep;

/// Guard band around the branch cut of the principal logarithm at angle pi.
pub const LOG_BRANCH_GUARD: f64 = 1e-6;

/// A proper rotation: orthogonal 3x3 with determinant +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: Matrix3<f64>,
}

impl Rotation {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    /// Validate orthogonality and determinant to `tol`.
    pub fn from_matrix(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let ortho_defect = (m.transpose() * m - Matrix3::identity()).norm();
        let det_defect = (m.determinant() - 1.0).abs();
        let defect = ortho_defect.max(det_defect);
        if defect > tol {
            return Err(Error::NotARotation { defect, tol });
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation { m: self.m * other.m }
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            m: self.m.transpose(),
        }
    }

    /// Principal rotation angle in [0, pi].
    pub fn angle(&self) -> f64 {
        (((self.m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0)).acos()
    }
}

/// The hat map: x -> the skew matrix acting as x cross (.).
pub fn hat(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -x.z, x.y, x.z, 0.0, -x.x, -x.y, x.x, 0.0)
}

/// Inverse of the hat map; the input must be skew-symmetric to `tol`.
pub fn unhat(m: &Matrix3<f64>, tol: f64) -> Result<Vector3<f64>> {
    let defect = (m + m.transpose()).norm();
    if defect > tol {
        return Err(Error::NotSkewSymmetric { defect, tol });
    }
    Ok(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// Killing form k(X, Y) = tr(X Y^T)/2; equals the Euclidean dot product of
/// the unhatted vectors.
pub fn killing_form(x: &Matrix3<f64>, y: &Matrix3<f64>, tol: f64) -> Result<f64> {
    unhat(x, tol)?;
    unhat(y, tol)?;
    Ok(0.5 * (x * y.transpose()).trace())
}

/// Rodrigues closed form for exp(hat(x)).
pub fn so3_exp(x: &Vector3<f64>) -> Rotation {
    let theta = x.norm();
    let k = hat(x);
    let k2 = k * k;
    let (a, b) = if theta < 1e-8 {
        // sin(t)/t and (1 - cos t)/t^2 by series.
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Rotation {
        m: Matrix3::identity() + k * a + k2 * b,
    }
}

/// Principal logarithm of a rotation as an axis-angle vector. Errors inside
/// the guard band around angle pi; callers sampling rotations are expected
/// to resample instead of handling the cut.
pub fn so3_log(r: &Rotation) -> Result<Vector3<f64>> {
    let theta = r.angle();
    if theta >= std::f64::consts::PI - LOG_BRANCH_GUARD {
        return Err(Error::LogBranch { angle: theta });
    }
    let w = Vector3::new(
        r.m[(2, 1)] - r.m[(1, 2)],
        r.m[(0, 2)] - r.m[(2, 0)],
        r.m[(1, 0)] - r.m[(0, 1)],
    ) * 0.5;
    // w = sin(theta) * axis; multiply by theta / sin(theta).
    let factor = if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / theta.sin()
    };
    Ok(w * factor)
}

/// The Lie algebra homomorphism rho(hat(x)) = sum_i x_i (1/i hbar) Q_{J^i};
/// the image is skew-Hermitian.
pub fn rho(rep: &SpinRep, x: &Vector3<f64>) -> DenseMatrix {
    let mut acc = DenseMatrix::zeros(rep.dim());
    for i in 0..3 {
        acc = acc
            .add(&rep.generator(i).scale(Complex64::new(x[i], 0.0)))
            .expect("same dimension");
    }
    acc
}

/// The integrated representation U(g) = exp(rho(log g)); unitary because the
/// exponent is skew-Hermitian.
pub fn group_rep(rep: &SpinRep, g: &Rotation) -> Result<DenseMatrix> {
    let x = so3_log(g)?;
    matrix_exp(&rho(rep, &x))
}

/// The Campbell-Baker-Hausdorff series log(exp X exp Y) truncated at the
/// given order (1..=4):
/// X + Y + [X,Y]/2 + ([X,[X,Y]] - [Y,[X,Y]])/12 - [Y,[X,[X,Y]]]/24.
pub fn bch_truncated(x: &DenseMatrix, y: &DenseMatrix, order: usize) -> Result<DenseMatrix> {
    if order == 0 || order > 4 {
        return Err(Error::BchOrder(order));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let re = |v: f64| Complex64::new(v, 0.0);
    let mut acc = x.add(y)?;
    if order >= 2 {
        let xy = x.commutator(y)?;
        acc = acc.add(&xy.scale(re(0.5)))?;
        if order >= 3 {
            let xxy = x.commutator(&xy)?;
            let yxy = y.commutator(&xy)?;
            acc = acc.add(&xxy.sub(&yxy)?.scale(re(1.0 / 12.0)))?;
            if order >= 4 {
                let yxxy = y.commutator(&xxy)?;
                acc = acc.sub(&yxxy.scale(re(1.0 / 24.0)))?;
            }
        }
    }
    Ok(acc)
}

/// Outcome of the seeded homomorphism sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismReport {
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub max_unitarity_defect: f64,
    pub pass: bool,
}

/// Draw a uniformly oriented axis and an angle clear of the log branch cut.
pub fn sample_rotation<R: Rng>(rng: &mut R) -> Rotation {
    loop {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let norm = v.norm();
        if norm < 1e-3 {
            continue;
        }
        let angle = rng.gen_range(0.0..2.9);
        return so3_exp(&(v * (angle / norm)));
    }
}

/// Check U(gh) = U(g) U(h) and unitarity over seeded random pairs whose
/// logs stay on the principal branch (pairs near the cut are resampled).
pub fn verify_homomorphism(
    rep: &SpinRep,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> HomomorphismReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = DenseMatrix::identity(rep.dim());
    let mut max_residual: f64 = 0.0;
    let mut max_unitarity: f64 = 0.0;
    for _ in 0..sample_count {
        let (g, h, gh) = loop {
            let g = sample_rotation(&mut rng);
            let h = sample_rotation(&mut rng);
            let gh = g.compose(&h);
            if gh.angle() < std::f64::consts::PI - 1e-3 {
                break (g, h, gh);
            }
        };
        let ug = group_rep(rep, &g).expect("angle on principal branch");
        let uh = group_rep(rep, &h).expect("angle on principal branch");
        let ugh = group_rep(rep, &gh).expect("angle on principal branch");
        let residual = ugh
            .sub(&ug.mul(&uh).expect("same dimension"))
            .expect("same dimension")
            .frobenius_norm();
        max_residual = max_residual.max(residual);
        for u in [&ug, &uh] {
            let defect = u
                .adjoint()
                .mul(u)
                .expect("same dimension")
                .sub(&id)
                .expect("same dimension")
                .frobenius_norm();
            max_unitarity = max_unitarity.max(defect);
        }
    }
    HomomorphismReport {
        samples: sample_count,
        seed,
        max_residual,
        max_unitarity_defect: max_unitarity,
        pass: max_residual <= tol && max_unitarity <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::build_spin_matrices;

    #[test]
    fn hat_matches_the_displayed_matrix() {
        let m = hat(&Vector3::new(0.0, 0.0, 1.0));
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(m, expected);
        assert_eq!(hat(&Vector3::zeros()), Matrix3::zeros());
    }

    #[test]
    fn hat_acts_as_cross_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
            let y = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
            assert!((hat(&x) * y - x.cross(&y)).norm() < 1e-14);
            // hat intertwines cross product and bracket.
            let bracket = hat(&x) * hat(&y) - hat(&y) * hat(&x);
            assert!((bracket - hat(&x.cross(&y))).norm() < 1e-13);
        }
    }

    #[test]
    fn unhat_roundtrip_and_skew_check() {
        let x = Vector3::new(0.3, -1.2, 0.8);
        assert_eq!(unhat(&hat(&x), 1e-12).unwrap(), x);
        let not_skew = Matrix3::identity();
        assert!(matches!(
            unhat(&not_skew, 1e-12),
            Err(Error::NotSkewSymmetric { .. })
        ));
    }

    #[test]
    fn killing_form_is_the_dot_product() {
        let e1 = Vector3::new(1.0, 0.0, 0.0);
        let e2 = Vector3::new(0.0, 1.0, 0.0);
        assert!((killing_form(&hat(&e1), &hat(&e1), 1e-12).unwrap() - 1.0).abs() < 1e-15);
        assert!(killing_form(&hat(&e1), &hat(&e2), 1e-12).unwrap().abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = Vector3::from_fn(|_, _| rng.gen_range(-3.0..3.0));
            let y = Vector3::from_fn(|_, _| rng.gen_range(-3.0..3.0));
            let k = killing_form(&hat(&x), &hat(&y), 1e-12).unwrap();
            assert!((k - x.dot(&y)).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_basics() {
        assert_eq!(
            so3_exp(&Vector3::zeros()).matrix(),
            Rotation::identity().matrix()
        );
        // Rotation by theta about z.
        let theta = 0.7f64;
        let r = so3_exp(&Vector3::new(0.0, 0.0, theta));
        let expected = Matrix3::new(
            theta.cos(),
            -theta.sin(),
            0.0,
            theta.sin(),
            theta.cos(),
            0.0,
            0.0,
            0.0,
            1.0,
        );
        assert!((r.matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn log_exp_roundtrip_on_the_principal_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let dir = Vector3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
            .normalize();
            let x = dir * rng.gen_range(0.0..3.0);
            let back = so3_log(&so3_exp(&x)).unwrap();
            assert!((back - x).norm() < 1e-10, "x = {x:?}");
        }
    }

    #[test]
    fn log_rejects_angles_at_the_cut() {
        let r = so3_exp(&Vector3::new(0.0, std::f64::consts::PI - 1e-9, 0.0));
        assert!(matches!(so3_log(&r), Err(Error::LogBranch { .. })));
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation::from_matrix(Matrix3::identity(), 1e-12).is_ok());
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(
            Rotation::from_matrix(reflection, 1e-12),
            Err(Error::NotARotation { .. })
        ));
    }

    #[test]
    fn ad_compatibility() {
        // exp(hat x) hat(y) exp(hat x)^T = hat(exp(hat x) y).
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let x = Vector3::from_fn(|_, _| rng.gen_range(-1.5..1.5));
            let y = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
            let r = so3_exp(&x);
            let lhs = r.matrix() * hat(&y) * r.matrix().transpose();
            let rhs = hat(&(r.matrix() * y));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn rho_is_a_lie_algebra_homomorphism() {
        let rep = build_spin_matrices(2, 1.0);
        assert_eq!(rho(&rep, &Vector3::zeros()).frobenius_norm(), 0.0);
        let e = [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ];
        // [rho(e1), rho(e2)] = rho(e3) and cyclic.
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            let lhs = rho(&rep, &e[i]).commutator(&rho(&rep, &e[j])).unwrap();
            let diff = lhs.sub(&rho(&rep, &e[k])).unwrap().frobenius_norm();
            assert!(diff < 1e-13, "bracket {i},{j} -> {k}: {diff}");
        }
        // Real-linearity on random samples.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let y = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let a: f64 = rng.gen_range(-2.0..2.0);
            let lhs = rho(&rep, &(x * a + y));
            let rhs = rho(&rep, &x)
                .scale(Complex64::new(a, 0.0))
                .add(&rho(&rep, &y))
                .unwrap();
            assert!(lhs.sub(&rhs).unwrap().frobenius_norm() < 1e-13);
        }
    }

    #[test]
    fn group_rep_at_identity_and_inverse() {
        let rep = build_spin_matrices(3, 1.0);
        let u_id = group_rep(&rep, &Rotation::identity()).unwrap();
        assert!(
            u_id.sub(&DenseMatrix::identity(rep.dim()))
                .unwrap()
                .frobenius_norm()
                < 1e-13
        );

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let g = sample_rotation(&mut rng);
            let u = group_rep(&rep, &g).unwrap();
            let uinv = group_rep(&rep, &g.inverse()).unwrap();
            assert!(uinv.sub(&u.adjoint()).unwrap().frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn full_turn_acts_trivially_for_integer_spin() {
        let rep = build_spin_matrices(2, 1.0);
        let g = so3_exp(&Vector3::new(0.0, 0.0, 2.0 * std::f64::consts::PI));
        let u = group_rep(&rep, &g).unwrap();
        assert!(
            u.sub(&DenseMatrix::identity(rep.dim()))
                .unwrap()
                .frobenius_norm()
                < 1e-8
        );
    }

    #[test]
    fn bch_commuting_and_equal_inputs() {
        let x = DenseMatrix::from_diagonal(&[
            Complex64::new(0.0, 0.3),
            Complex64::new(0.0, -0.1),
        ]);
        let y = DenseMatrix::from_diagonal(&[
            Complex64::new(0.0, -0.2),
            Complex64::new(0.0, 0.4),
        ]);
        let z = bch_truncated(&x, &y, 4).unwrap();
        assert!(z.sub(&x.add(&y).unwrap()).unwrap().frobenius_norm() < 1e-15);

        let two_x = bch_truncated(&x, &x, 4).unwrap();
        assert!(
            two_x
                .sub(&x.scale(Complex64::new(2.0, 0.0)))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );

        assert!(matches!(bch_truncated(&x, &y, 5), Err(Error::BchOrder(5))));
        let w = DenseMatrix::zeros(3);
        assert!(matches!(
            bch_truncated(&x, &w, 2),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn homomorphism_sweep_is_tight_and_deterministic() {
        let rep = build_spin_matrices(1, 1.0);
        let r1 = verify_homomorphism(&rep, 50, 42, 1e-9);
        let r2 = verify_homomorphism(&rep, 50, 42, 1e-9);
        assert_eq!(r1, r2);
        assert!(r1.pass, "residual {}", r1.max_residual);
        assert!(r1.max_unitarity_defect < 1e-12);

        let r3 = verify_homomorphism(&rep, 50, 43, 1e-9);
        assert_ne!(r1.max_residual, r3.max_residual);
    }
}
