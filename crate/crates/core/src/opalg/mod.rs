//! Linear operators on the lattice basis.
//!
//! Every operator of interest here is a finite sum of lattice shifts with
//! diagonal coefficients, so the native storage is a map from shift vectors
//! to per-source-point amplitudes: the `shift` band sends `e_m` to
//! `e_{m+shift}` with amplitude `coeffs[flat(m)]`. Amplitudes whose target
//! leaves the materialized window are identically zero (hard truncation),
//! which is what makes the lattice-edge rows annihilate.

mod dense;

pub use dense::{hermitian_eigenvalues, matrix_exp, matrix_log, DenseMatrix};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{BohrSommerfeldLattice, LatticeIndex};

/// A banded operator over a shared lattice basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    lattice: Arc<BohrSommerfeldLattice>,
    bands: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

impl BandedOperator {
    pub fn zero(lattice: Arc<BohrSommerfeldLattice>) -> Self {
        Self {
            lattice,
            bands: BTreeMap::new(),
        }
    }

    pub fn identity(lattice: Arc<BohrSommerfeldLattice>) -> Self {
        Self::diagonal(lattice, |_| Complex64::new(1.0, 0.0))
    }

    /// Diagonal operator with entry `f(m)` at basis point m.
    pub fn diagonal(
        lattice: Arc<BohrSommerfeldLattice>,
        f: impl Fn(&LatticeIndex) -> Complex64,
    ) -> Self {
        let shift = vec![0i64; lattice.degrees_of_freedom()];
        Self::from_shift_rule(lattice, shift, f)
    }

    /// Single-band operator sending `e_m` to `f(m) e_{m+shift}`; sources whose
    /// target leaves the window get amplitude exactly zero.
    pub fn from_shift_rule(
        lattice: Arc<BohrSommerfeldLattice>,
        shift: Vec<i64>,
        f: impl Fn(&LatticeIndex) -> Complex64,
    ) -> Self {
        assert_eq!(shift.len(), lattice.degrees_of_freedom());
        let dim = lattice.dimension();
        let mut coeffs = vec![Complex64::default(); dim];
        for (flat, idx) in lattice.indices().enumerate() {
            if lattice.shift_by(&idx, &shift).is_some() {
                coeffs[flat] = f(&idx);
            }
        }
        let mut bands = BTreeMap::new();
        bands.insert(shift, coeffs);
        let mut op = Self { lattice, bands };
        op.prune();
        op
    }

    pub fn lattice(&self) -> &Arc<BohrSommerfeldLattice> {
        &self.lattice
    }

    pub fn bands(&self) -> impl Iterator<Item = (&[i64], &[Complex64])> {
        self.bands.iter().map(|(s, c)| (s.as_slice(), c.as_slice()))
    }

    pub fn band(&self, shift: &[i64]) -> Option<&[Complex64]> {
        self.bands.get(shift).map(|c| c.as_slice())
    }

    fn check_lattice(&self, other: &Self) -> Result<()> {
        if *self.lattice != *other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.bands
            .retain(|_, c| c.iter().any(|z| z.re != 0.0 || z.im != 0.0));
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let dim = self.lattice.dimension();
        let mut bands = self.bands.clone();
        for (shift, coeffs) in &other.bands {
            let entry = bands
                .entry(shift.clone())
                .or_insert_with(|| vec![Complex64::default(); dim]);
            for (a, b) in entry.iter_mut().zip(coeffs) {
                *a += b;
            }
        }
        let mut op = Self {
            lattice: self.lattice.clone(),
            bands,
        };
        op.prune();
        Ok(op)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let bands = self
            .bands
            .iter()
            .map(|(s, v)| (s.clone(), v.iter().map(|z| z * c).collect()))
            .collect();
        let mut op = Self {
            lattice: self.lattice.clone(),
            bands,
        };
        op.prune();
        op
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// self ∘ other: apply `other` first. Band shifts add; amplitudes pick up
    /// the `self` coefficient at the intermediate point. Intermediate states
    /// outside the window contribute zero.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let lat = &self.lattice;
        let dim = lat.dimension();
        let indices: Vec<LatticeIndex> = lat.indices().collect();
        let mut bands: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for (shift_a, coeff_a) in &self.bands {
            for (shift_b, coeff_b) in &other.bands {
                let total: Vec<i64> = shift_a.iter().zip(shift_b).map(|(a, b)| a + b).collect();
                let out = bands
                    .entry(total)
                    .or_insert_with(|| vec![Complex64::default(); dim]);
                for (flat, idx) in indices.iter().enumerate() {
                    let cb = coeff_b[flat];
                    if cb.re == 0.0 && cb.im == 0.0 {
                        continue;
                    }
                    if let Some(mid) = lat.shift_by(idx, shift_b) {
                        let mid_flat = lat.flat_index(&mid).expect("shifted index in window");
                        out[flat] += coeff_a[mid_flat] * cb;
                    }
                }
            }
        }
        let mut op = Self {
            lattice: self.lattice.clone(),
            bands,
        };
        op.prune();
        Ok(op)
    }

    /// Conjugate transpose with respect to the orthonormal lattice basis.
    pub fn adjoint(&self) -> Self {
        let lat = &self.lattice;
        let dim = lat.dimension();
        let mut bands: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for (shift, coeffs) in &self.bands {
            let neg: Vec<i64> = shift.iter().map(|s| -s).collect();
            let mut out = vec![Complex64::default(); dim];
            for (flat, idx) in lat.indices().enumerate() {
                // (A†)_{m-shift <- p} entry: conj of the A amplitude from p-shift.
                if let Some(src) = lat.shift_by(&idx, &neg) {
                    let src_flat = lat.flat_index(&src).expect("shifted index in window");
                    out[flat] = coeffs[src_flat].conj();
                }
            }
            bands.insert(neg, out);
        }
        let mut op = Self {
            lattice: self.lattice.clone(),
            bands,
        };
        op.prune();
        op
    }

    /// ab - ba.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let lat = &self.lattice;
        let dim = lat.dimension();
        assert_eq!(x.len(), dim);
        let mut y = vec![Complex64::default(); dim];
        for (shift, coeffs) in &self.bands {
            for (flat, idx) in lat.indices().enumerate() {
                let c = coeffs[flat];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                if let Some(tgt) = lat.shift_by(&idx, shift) {
                    let tgt_flat = lat.flat_index(&tgt).expect("shifted index in window");
                    y[tgt_flat] += c * x[flat];
                }
            }
        }
        y
    }

    /// Euclidean norm of the image of the basis vector at flat ordinal `flat`.
    pub fn column_norm(&self, flat: usize) -> f64 {
        self.bands
            .values()
            .map(|c| c[flat].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.bands
            .values()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Materialize the bands at flat indices.
    pub fn to_dense(&self) -> DenseMatrix {
        let lat = &self.lattice;
        let mut m = DenseMatrix::zeros(lat.dimension());
        for (shift, coeffs) in &self.bands {
            for (flat, idx) in lat.indices().enumerate() {
                if let Some(tgt) = lat.shift_by(&idx, shift) {
                    let tgt_flat = lat.flat_index(&tgt).expect("shifted index in window");
                    let prev = m.get(tgt_flat, flat);
                    m.set(tgt_flat, flat, prev + coeffs[flat]);
                }
            }
        }
        m
    }
}
