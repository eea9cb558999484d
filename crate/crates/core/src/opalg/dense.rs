//! Dense complex matrices: the output and verification form of every
//! operator, with the matrix exponential and logarithm needed to integrate
//! Lie-algebra representations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A square complex matrix, row-major in serialized form.
///
/// JSON schema: `{"dim": N, "data": [[re, im], ...]}` with `data` row-major
/// of length N*N, IEEE-754 doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    mat: DMatrix<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self {
            mat: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub(crate) fn from_inner(mat: DMatrix<Complex64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "DenseMatrix must be square");
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.mat[(row, col)] = value;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_inner(&self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_inner(&self.mat - &other.mat))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_inner(&self.mat * c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_inner(&self.mat * &other.mat))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_inner(self.mat.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        (&self.mat * DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint())
            .map(|d| d.frobenius_norm() <= tol)
            .unwrap_or(false)
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.add(&self.adjoint())
            .map(|d| d.frobenius_norm() <= tol)
            .unwrap_or(false)
    }

    /// ab - ba.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub(crate) fn inner(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

/// Matrix exponential.
///
/// Skew-Hermitian input (detected to a scale-relative tolerance) goes through
/// the spectral route: write M = -iH with H Hermitian, diagonalize H, and
/// exponentiate the phases, so the result is unitary to rounding. Everything
/// else falls back to Pade(13) with scaling and squaring.
pub fn matrix_exp(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let scale = m.frobenius_norm().max(1.0);
    if m.is_skew_hermitian(1e-12 * scale) {
        return Ok(exp_skew_hermitian(m));
    }
    Ok(exp_pade(m))
}

fn exp_skew_hermitian(m: &DenseMatrix) -> DenseMatrix {
    // H = iM is Hermitian; M = -iH, so exp(M) = Q diag(e^{-i lambda}) Q^dag.
    let h = m.mat.clone() * Complex64::new(0.0, 1.0);
    let eig = h.symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l)),
    );
    let q = eig.eigenvectors;
    DenseMatrix::from_inner(&q * DMatrix::from_diagonal(&phases) * q.adjoint())
}

/// Pade(13) coefficients for the exponential (Higham 2005, Table 10.4).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn exp_pade(m: &DenseMatrix) -> DenseMatrix {
    let dim = m.dim();
    let theta13 = 5.371920351148152;
    let norm = one_norm(&m.mat);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a = &m.mat * Complex64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9))
        + &a6 * c(7)
        + &a4 * c(5)
        + &a2 * c(3)
        + &id * c(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8))
        + &a6 * c(6)
        + &a4 * c(4)
        + &a2 * c(2)
        + &id * c(0);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut x = lhs
        .lu()
        .solve(&rhs)
        .expect("Pade denominator is singular; input too large for the fallback");
    for _ in 0..s {
        x = &x * &x;
    }
    DenseMatrix::from_inner(x)
}

/// Principal matrix logarithm of a matrix near the identity, by the Mercator
/// series in M - I. The Frobenius distance to the identity must be below 0.6.
pub fn matrix_log(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let dim = m.dim();
    let n = &m.mat - DMatrix::<Complex64>::identity(dim, dim);
    let defect = n.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if defect > 0.6 {
        return Err(Error::LogOutOfDomain { defect });
    }
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    let mut power = n.clone();
    for k in 1..=200 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = &power * Complex64::new(sign / k as f64, 0.0);
        acc += &term;
        let term_norm = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if term_norm < 1e-17 * (1.0 + acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()) {
            break;
        }
        power = &power * &n;
    }
    Ok(DenseMatrix::from_inner(acc))
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = m
        .mat
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

#[derive(Serialize, Deserialize)]
struct DenseMatrixRepr {
    dim: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for DenseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let dim = self.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = self.get(i, j);
                data.push([z.re, z.im]);
            }
        }
        DenseMatrixRepr { dim, data }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DenseMatrixRepr::deserialize(deserializer)?;
        if repr.data.len() != repr.dim * repr.dim {
            return Err(D::Error::custom(format!(
                "dense matrix data length {} does not match dim {}",
                repr.data.len(),
                repr.dim
            )));
        }
        let mut m = DenseMatrix::zeros(repr.dim);
        for (k, [re, im]) in repr.data.into_iter().enumerate() {
            m.set(k / repr.dim, k % repr.dim, Complex64::new(re, im));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&DenseMatrix::zeros(4)).unwrap();
        assert!(e.sub(&DenseMatrix::identity(4)).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn exp_of_integer_phase_diagonal_is_identity() {
        // exp(-2 pi i diag(m)) = I for integer m.
        let two_pi = 2.0 * std::f64::consts::PI;
        let diag: Vec<Complex64> = (-3..=3).map(|m| c(0.0, -two_pi * m as f64)).collect();
        let e = matrix_exp(&DenseMatrix::from_diagonal(&diag)).unwrap();
        assert!(e.sub(&DenseMatrix::identity(7)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn exp_inverse_property() {
        let x = DenseMatrix::from_fn(3, |i, j| c(0.1 * (i as f64 - j as f64), 0.05 * (i + j) as f64));
        let e = matrix_exp(&x).unwrap();
        let einv = matrix_exp(&x.scale(c(-1.0, 0.0))).unwrap();
        let prod = e.mul(&einv).unwrap();
        assert!(prod.sub(&DenseMatrix::identity(3)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn exp_of_skew_hermitian_is_unitary() {
        let dim = 6;
        let mut s = DenseMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = c(
                    ((i * 7 + j * 3) as f64 * 0.37).sin(),
                    ((i + 2 * j) as f64 * 0.53).cos(),
                );
                s.set(i, j, z);
            }
        }
        let skew = s.sub(&s.adjoint()).unwrap().scale(c(0.5, 0.0));
        let u = matrix_exp(&skew).unwrap();
        let defect = u
            .adjoint()
            .mul(&u)
            .unwrap()
            .sub(&DenseMatrix::identity(dim))
            .unwrap()
            .frobenius_norm();
        assert!(defect < 1e-13, "unitarity defect {defect}");
    }

    #[test]
    fn pade_matches_series_for_nonnormal_input() {
        // Upper-triangular (non-normal) input exercises the fallback path.
        let mut x = DenseMatrix::zeros(3);
        x.set(0, 1, c(0.3, 0.1));
        x.set(1, 2, c(-0.2, 0.4));
        x.set(0, 2, c(0.05, 0.0));
        let e = matrix_exp(&x).unwrap();
        // Nilpotent cube: exp(X) = I + X + X^2/2 exactly.
        let expected = DenseMatrix::identity(3)
            .add(&x)
            .unwrap()
            .add(&x.mul(&x).unwrap().scale(c(0.5, 0.0)))
            .unwrap();
        assert!(e.sub(&expected).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn log_roundtrips_small_exponents() {
        let mut x = DenseMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                x.set(i, j, c(0.02 * ((i * 5 + j) as f64).sin(), 0.03 * ((j * 3 + i) as f64).cos()));
            }
        }
        let l = matrix_log(&matrix_exp(&x).unwrap()).unwrap();
        assert!(l.sub(&x).unwrap().frobenius_norm() < 1e-13);
    }

    #[test]
    fn log_rejects_far_from_identity() {
        let m = DenseMatrix::identity(3).scale(c(3.0, 0.0));
        assert!(matches!(matrix_log(&m), Err(Error::LogOutOfDomain { .. })));
    }

    #[test]
    fn hermiticity_checks() {
        let d = DenseMatrix::from_diagonal(&[c(1.0, 0.0), c(-2.5, 0.0)]);
        assert!(d.is_hermitian(1e-15));
        assert!(!d.is_skew_hermitian(1e-15));
        assert_eq!(DenseMatrix::zeros(5).frobenius_norm(), 0.0);
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let m = DenseMatrix::from_fn(3, |i, j| c((i as f64 + 0.1) / 3.0, (j as f64 - 0.7) / 7.0));
        let text = serde_json::to_string(&m).unwrap();
        let back: DenseMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        assert_eq!(text, serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn deserialize_rejects_bad_length() {
        let r: std::result::Result<DenseMatrix, _> =
            serde_json::from_str(r#"{"dim": 2, "data": [[0.0, 0.0]]}"#);
        assert!(r.is_err());
    }
}
