//! Quantization of the coadjoint orbits of SO(3).
//!
//! A sphere of radius r carries the symplectic form (1/r) times the area
//! form, so its total symplectic volume is 4 pi r and prequantizability
//! forces r = (n/2) hbar. For integer s = n/2 the quantized circles sit at
//! cos(theta_m) = m/s and the ladder coefficients
//! a_m^2 = hbar^2 [s(s+1) + m(1-m)] close the so(3) commutation relations on
//! the (2s+1)-dimensional basis e_{-s}, ..., e_s.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::opalg::DenseMatrix;
use crate::quadrature::GaussLegendre;
use crate::quantize::VerificationReport;

/// Relative tolerance for recognizing 2r/hbar as an integer.
const INTEGRALITY_RTOL: f64 = 1e-9;

/// A spin representation bundle: ladder coefficients and the five matrices
/// over the basis e_{-s}, ..., e_s (ascending in m).
#[derive(Debug, Clone)]
pub struct SpinRep {
    two_s: i64,
    hbar: f64,
    /// a_m for m = -s, ..., s+1, indexed by j = m + s; a[0] and a[2s+1] vanish.
    a: Vec<f64>,
    q_jplus: DenseMatrix,
    q_jminus: DenseMatrix,
    q_j1: DenseMatrix,
    q_j2: DenseMatrix,
    q_j3: DenseMatrix,
}

impl SpinRep {
    pub fn s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn two_s(&self) -> i64 {
        self.two_s
    }

    pub fn is_integer_spin(&self) -> bool {
        self.two_s % 2 == 0
    }

    pub fn dim(&self) -> usize {
        (self.two_s + 1) as usize
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn ladder(&self) -> &[f64] {
        &self.a
    }

    pub fn q_jplus(&self) -> &DenseMatrix {
        &self.q_jplus
    }

    pub fn q_jminus(&self) -> &DenseMatrix {
        &self.q_jminus
    }

    pub fn q_j1(&self) -> &DenseMatrix {
        &self.q_j1
    }

    pub fn q_j2(&self) -> &DenseMatrix {
        &self.q_j2
    }

    pub fn q_j3(&self) -> &DenseMatrix {
        &self.q_j3
    }

    /// The rescaled generator (1/i hbar) Q_{J^i}, i in {0, 1, 2}; these are
    /// the skew-Hermitian matrices satisfying the real so(3) brackets.
    pub fn generator(&self, i: usize) -> DenseMatrix {
        let q = match i {
            0 => &self.q_j1,
            1 => &self.q_j2,
            2 => &self.q_j3,
            _ => panic!("generator index must be 0, 1 or 2"),
        };
        // 1/(i hbar) = -i/hbar
        q.scale(Complex64::new(0.0, -1.0 / self.hbar))
    }

    /// Q_J1^2 + Q_J2^2 + Q_J3^2.
    pub fn casimir(&self) -> DenseMatrix {
        let sq = |m: &DenseMatrix| m.mul(m).expect("square matrices");
        sq(&self.q_j1)
            .add(&sq(&self.q_j2))
            .and_then(|t| t.add(&sq(&self.q_j3)))
            .expect("same dimension")
    }
}

/// Check the integrality condition 4 pi r = n h, i.e. r = (n/2) hbar, and the
/// standing assumption that s = n/2 is an integer. Returns (n, s).
pub fn check_integrality(r: f64, hbar: f64) -> Result<(i64, i64)> {
    assert!(r > 0.0 && hbar > 0.0, "r and hbar must be positive");
    let n_float = 2.0 * r / hbar;
    let n = n_float.round();
    if n < 1.0 || (n_float - n).abs() > INTEGRALITY_RTOL * n_float.max(1.0) {
        return Err(Error::NotPrequantizable { r, n_float });
    }
    let n = n as i64;
    if n % 2 != 0 {
        return Err(Error::HalfIntegerSpin { s: n as f64 / 2.0 });
    }
    Ok((n, n / 2))
}

/// The quantized latitudes cos(theta_m) = m/s for m = -s..s. Degenerate for
/// s = 0 (the orbit is a point): the family is empty.
pub fn bs_angles(s: i64) -> Vec<f64> {
    assert!(s >= 0);
    if s == 0 {
        return Vec::new();
    }
    (-s..=s).map(|m| m as f64 / s as f64).collect()
}

/// Ladder coefficients a_m = hbar sqrt(s(s+1) + m(1-m)) for m = -s..s+1.
/// The boundary values a_{-s} and a_{s+1} vanish exactly because the
/// radicand is integer arithmetic.
pub fn ladder_coeffs(s: i64, hbar: f64) -> Vec<f64> {
    assert!(s >= 0);
    ladder_coeffs_two_s(2 * s, hbar)
}

/// Radicand of (a_m / hbar)^2 in quarter units: 4 [s(s+1) + m(1-m)] as exact
/// integer arithmetic over two_s = 2s and two_m = 2m.
pub(crate) fn ladder_radicand_quarters(two_s: i64, two_m: i64) -> i64 {
    two_s * (two_s + 2) + two_m * (2 - two_m)
}

fn ladder_coeffs_two_s(two_s: i64, hbar: f64) -> Vec<f64> {
    let mut a = Vec::with_capacity((two_s + 2) as usize);
    for j in 0..=two_s + 1 {
        let two_m = 2 * j - two_s;
        let quarters = ladder_radicand_quarters(two_s, two_m);
        assert!(quarters >= 0, "negative radicand at 2m = {two_m}");
        a.push(hbar * (quarters as f64 / 4.0).sqrt());
    }
    a
}

/// Build the spin-s representation: Q_J- e_m = a_m e_{m-1},
/// Q_J+ e_m = a_{m+1} e_{m+1}, Q_J3 e_m = m hbar e_m,
/// Q_J1 = (Q_J+ + Q_J-)/2 and Q_J2 = (Q_J+ - Q_J-)/2i.
pub fn build_spin_matrices(s: i64, hbar: f64) -> SpinRep {
    assert!(s >= 0, "spin must be non-negative");
    build_spin_matrices_two_s(2 * s, hbar)
}

/// Extension of `build_spin_matrices` to half-integer spin (odd `two_s`).
/// The integrality gate rejects these inputs by design; this constructor is
/// an escape hatch for exploring the same formulas outside the standard
/// construction.
pub fn build_spin_matrices_two_s(two_s: i64, hbar: f64) -> SpinRep {
    assert!(two_s >= 0, "spin must be non-negative");
    assert!(hbar > 0.0, "hbar must be positive");
    let dim = (two_s + 1) as usize;
    let a = ladder_coeffs_two_s(two_s, hbar);

    let mut q_jminus = DenseMatrix::zeros(dim);
    let mut q_jplus = DenseMatrix::zeros(dim);
    let mut q_j3 = DenseMatrix::zeros(dim);
    for j in 0..dim {
        let m = (2 * j as i64 - two_s) as f64 / 2.0;
        q_j3.set(j, j, Complex64::new(m * hbar, 0.0));
        if j > 0 {
            // e_m -> a_m e_{m-1}
            q_jminus.set(j - 1, j, Complex64::new(a[j], 0.0));
        }
        if j + 1 < dim {
            // e_m -> a_{m+1} e_{m+1}
            q_jplus.set(j + 1, j, Complex64::new(a[j + 1], 0.0));
        }
    }
    let q_j1 = q_jplus
        .add(&q_jminus)
        .expect("same dimension")
        .scale(Complex64::new(0.5, 0.0));
    let q_j2 = q_jplus
        .sub(&q_jminus)
        .expect("same dimension")
        .scale(Complex64::new(0.0, -0.5));
    SpinRep {
        two_s,
        hbar,
        a,
        q_jplus,
        q_jminus,
        q_j1,
        q_j2,
        q_j3,
    }
}

/// Verify the so(3) commutation relations, Hermiticity, skew-Hermiticity of
/// the rescaled generators, and the Casimir value hbar^2 s(s+1) I.
pub fn verify_so3(rep: &SpinRep, tol: f64) -> VerificationReport {
    let hbar = rep.hbar;
    let dim = rep.dim();
    let i_hbar = Complex64::new(0.0, hbar);
    let two_hbar = Complex64::new(2.0 * hbar, 0.0);
    let comm = |a: &DenseMatrix, b: &DenseMatrix| a.commutator(b).expect("same dimension");
    let minus = |a: &DenseMatrix, b: &DenseMatrix| a.sub(b).expect("same dimension");

    let mut residuals: Vec<f64> = Vec::new();
    residuals.push(
        minus(
            &comm(&rep.q_jplus, &rep.q_jminus),
            &rep.q_j3.scale(two_hbar),
        )
        .frobenius_norm(),
    );
    let cyclic = [
        (&rep.q_j1, &rep.q_j2, &rep.q_j3),
        (&rep.q_j2, &rep.q_j3, &rep.q_j1),
        (&rep.q_j3, &rep.q_j1, &rep.q_j2),
    ];
    for (x, y, z) in cyclic {
        residuals.push(minus(&comm(x, y), &z.scale(i_hbar)).frobenius_norm());
    }
    for q in [&rep.q_j1, &rep.q_j2, &rep.q_j3] {
        residuals.push(q.sub(&q.adjoint()).expect("same dimension").frobenius_norm());
    }
    for i in 0..3 {
        let g = rep.generator(i);
        residuals.push(g.add(&g.adjoint()).expect("same dimension").frobenius_norm());
    }
    let s = rep.s();
    let casimir_expected =
        DenseMatrix::identity(dim).scale(Complex64::new(hbar * hbar * s * (s + 1.0), 0.0));
    residuals.push(minus(&rep.casimir(), &casimir_expected).frobenius_norm());

    let max_residual = residuals.into_iter().fold(0.0, f64::max);
    VerificationReport::new(max_residual, dim, 0, tol)
}

/// Dimension of the commutant of {Q_J1, Q_J2, Q_J3}: the number of linearly
/// independent matrices X with [X, Q_Ji] = 0 for all i. Equals 1 exactly when
/// the representation is irreducible.
pub fn commutant_dimension(rep: &SpinRep) -> usize {
    let d = rep.dim();
    let id = DMatrix::<Complex64>::identity(d, d);
    let mut system = DMatrix::<Complex64>::zeros(3 * d * d, d * d);
    for (block, q) in [&rep.q_j1, &rep.q_j2, &rep.q_j3].into_iter().enumerate() {
        // vec(QX - XQ) = (I (x) Q - Q^T (x) I) vec(X), column-major vec.
        let qm = q.inner();
        let li = id.kronecker(qm) - qm.transpose().kronecker(&id);
        system
            .view_mut((block * d * d, 0), (d * d, d * d))
            .copy_from(&li);
    }
    let svd = system.svd(false, false);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = if sigma_max == 0.0 {
        0
    } else {
        svd.rank(1e-10 * sigma_max)
    };
    d * d - rank
}

/// Numerically integrate the orbit symplectic form r sin(theta) dphi dtheta
/// over [0, 2 pi] x [0, pi] with a tensor-product Gauss-Legendre rule.
/// Converges to 4 pi r as the grid grows.
pub fn symplectic_volume(r: f64, grid_size: usize) -> f64 {
    assert!(r > 0.0 && grid_size >= 2);
    let rule = GaussLegendre::new(grid_size);
    let pi = std::f64::consts::PI;
    let mut total = 0.0;
    for (&_u, &wu) in rule.nodes().iter().zip(rule.weights()) {
        // The integrand is independent of phi = pi (u + 1).
        for (&v, &wv) in rule.nodes().iter().zip(rule.weights()) {
            let theta = 0.5 * pi * (v + 1.0);
            total += wu * wv * r * theta.sin();
        }
    }
    // Jacobians of the affine maps onto [0, 2 pi] and [0, pi].
    total * pi * (pi / 2.0)
}

impl Serialize for SpinRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Matrices<'a> {
            #[serde(rename = "J1")]
            j1: &'a DenseMatrix,
            #[serde(rename = "J2")]
            j2: &'a DenseMatrix,
            #[serde(rename = "J3")]
            j3: &'a DenseMatrix,
            #[serde(rename = "Jplus")]
            jplus: &'a DenseMatrix,
            #[serde(rename = "Jminus")]
            jminus: &'a DenseMatrix,
        }
        let mut st = serializer.serialize_struct("SpinRep", 3)?;
        if self.two_s % 2 == 0 {
            st.serialize_field("s", &(self.two_s / 2))?;
        } else {
            st.serialize_field("s", &(self.two_s as f64 / 2.0))?;
        }
        st.serialize_field("hbar", &self.hbar)?;
        st.serialize_field(
            "matrices",
            &Matrices {
                j1: &self.q_j1,
                j2: &self.q_j2,
                j3: &self.q_j3,
                jplus: &self.q_jplus,
                jminus: &self.q_jminus,
            },
        )?;
        st.end()
    }
}
