//! The Bohr-Sommerfeld set of an integrable system with global action-angle
//! variables, modeled as a finite window of the integer lattice Z^n.
//!
//! Each lattice point m = (m_1, ..., m_n) labels a quantized torus with
//! action values A_i = m_i * hbar. The basis is enumerated row-major with
//! axis 0 slowest so that matrix output is reproducible across runs.

use crate::error::{Error, Result};

/// Global scalars shared by every construction: hbar and the numerical
/// tolerances used by verification routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationConfig {
    /// Reduced Planck constant h / 2π, in action units. Must be positive for
    /// physically meaningful output; the degenerate value 0 is tolerated by
    /// the operator constructors and yields zero operators.
    pub hbar: f64,
    /// Absolute tolerance for residual checks.
    pub atol: f64,
    /// Relative tolerance, scaled by problem size where appropriate.
    pub rtol: f64,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            atol: 1e-12,
            rtol: 1e-10,
        }
    }
}

impl QuantizationConfig {
    pub fn with_hbar(hbar: f64) -> Self {
        Self {
            hbar,
            ..Self::default()
        }
    }
}

/// A point of the lattice: the integer tuple (m_1, ..., m_n).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeIndex(pub Vec<i64>);

impl LatticeIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for LatticeIndex {
    fn from(m: Vec<i64>) -> Self {
        LatticeIndex(m)
    }
}

/// Physical bounds and materialized truncation window of one lattice axis.
///
/// `lo`/`hi` are the physical bounds of the Bohr-Sommerfeld set in that
/// direction (`None` = unbounded); `window_lo`/`window_hi` delimit the finite
/// window actually materialized. When both are present the window is clamped
/// to the physical bounds, i.e. the materialized range is the intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisBounds {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    pub window_lo: i64,
    pub window_hi: i64,
}

impl AxisBounds {
    /// An axis unbounded in both directions, truncated to [lo, hi].
    pub fn window(window_lo: i64, window_hi: i64) -> Self {
        Self {
            lo: None,
            hi: None,
            window_lo,
            window_hi,
        }
    }

    /// An axis with physical bounds, truncated to the intersection of
    /// [window_lo, window_hi] with [lo, hi].
    pub fn bounded(lo: Option<i64>, hi: Option<i64>, window_lo: i64, window_hi: i64) -> Self {
        let window_lo = match lo {
            Some(l) => window_lo.max(l),
            None => window_lo,
        };
        let window_hi = match hi {
            Some(h) => window_hi.min(h),
            None => window_hi,
        };
        Self {
            lo,
            hi,
            window_lo,
            window_hi,
        }
    }

    pub fn window_len(&self) -> Result<usize> {
        if self.window_lo > self.window_hi {
            return Err(Error::InvalidBounds {
                axis: usize::MAX,
                lo: self.window_lo,
                hi: self.window_hi,
            });
        }
        Ok((self.window_hi - self.window_lo + 1) as usize)
    }

    pub fn contains(&self, m: i64) -> bool {
        m >= self.window_lo && m <= self.window_hi
    }
}

/// The materialized Bohr-Sommerfeld lattice: n axes, each truncated to a
/// finite window, together with the quantization scalars.
///
/// Immutable after construction; flat indexing is a bijection between the
/// in-window integer tuples and 0..dimension-1.
#[derive(Debug, Clone, PartialEq)]
pub struct BohrSommerfeldLattice {
    n: usize,
    axes: Vec<AxisBounds>,
    config: QuantizationConfig,
    dim: usize,
    strides: Vec<usize>,
}

/// Enumerate the lattice window as a basis. Errors if any window is empty.
pub fn build_lattice(
    n: usize,
    axes: Vec<AxisBounds>,
    config: QuantizationConfig,
) -> Result<BohrSommerfeldLattice> {
    assert!(n >= 1, "lattice needs at least one degree of freedom");
    assert_eq!(axes.len(), n, "axes must have length n");
    let mut lens = Vec::with_capacity(n);
    for (axis, b) in axes.iter().enumerate() {
        let len = b.window_len().map_err(|_| Error::InvalidBounds {
            axis,
            lo: b.window_lo,
            hi: b.window_hi,
        })?;
        lens.push(len);
    }
    // Row-major, axis 0 slowest.
    let mut strides = vec![1usize; n];
    for k in (0..n - 1).rev() {
        strides[k] = strides[k + 1] * lens[k + 1];
    }
    let dim = strides[0] * lens[0];
    Ok(BohrSommerfeldLattice {
        n,
        axes,
        config,
        dim,
        strides,
    })
}

impl BohrSommerfeldLattice {
    pub fn degrees_of_freedom(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[AxisBounds] {
        &self.axes
    }

    pub fn config(&self) -> &QuantizationConfig {
        &self.config
    }

    pub fn hbar(&self) -> f64 {
        self.config.hbar
    }

    pub fn contains(&self, idx: &LatticeIndex) -> bool {
        idx.len() == self.n && idx.0.iter().zip(&self.axes).all(|(&m, b)| b.contains(m))
    }

    /// Flat ordinal of an in-window index.
    pub fn flat_index(&self, idx: &LatticeIndex) -> Result<usize> {
        if !self.contains(idx) {
            return Err(Error::OutOfRange {
                index: idx.0.clone(),
            });
        }
        let mut flat = 0usize;
        for (k, &m) in idx.0.iter().enumerate() {
            flat += (m - self.axes[k].window_lo) as usize * self.strides[k];
        }
        Ok(flat)
    }

    /// Inverse of `flat_index`.
    pub fn index_at(&self, flat: usize) -> LatticeIndex {
        assert!(flat < self.dim, "flat ordinal out of range");
        let mut m = Vec::with_capacity(self.n);
        let mut rem = flat;
        for k in 0..self.n {
            let q = rem / self.strides[k];
            rem %= self.strides[k];
            m.push(self.axes[k].window_lo + q as i64);
        }
        LatticeIndex(m)
    }

    /// Action values (m_1 hbar, ..., m_n hbar) at an in-window point.
    pub fn action_values(&self, idx: &LatticeIndex) -> Result<Vec<f64>> {
        if !self.contains(idx) {
            return Err(Error::OutOfRange {
                index: idx.0.clone(),
            });
        }
        Ok(idx.0.iter().map(|&m| m as f64 * self.config.hbar).collect())
    }

    /// Shift one component; `None` when the result leaves the window.
    pub fn shift_index(&self, idx: &LatticeIndex, axis: usize, delta: i64) -> Option<LatticeIndex> {
        assert!(axis < self.n, "axis out of range");
        let mut m = idx.0.clone();
        m[axis] += delta;
        let shifted = LatticeIndex(m);
        self.contains(&shifted).then_some(shifted)
    }

    /// Shift by a whole vector; `None` when the result leaves the window.
    pub fn shift_by(&self, idx: &LatticeIndex, shift: &[i64]) -> Option<LatticeIndex> {
        debug_assert_eq!(shift.len(), self.n);
        let m: Vec<i64> = idx.0.iter().zip(shift).map(|(&a, &s)| a + s).collect();
        let shifted = LatticeIndex(m);
        self.contains(&shifted).then_some(shifted)
    }

    /// True when every component is at least one step away from its window edge.
    pub fn is_interior(&self, idx: &LatticeIndex) -> bool {
        idx.0
            .iter()
            .zip(&self.axes)
            .all(|(&m, b)| m > b.window_lo && m < b.window_hi)
    }

    pub fn interior_count(&self) -> usize {
        self.axes
            .iter()
            .map(|b| ((b.window_hi - b.window_lo - 1).max(0)) as usize)
            .product()
    }

    /// All in-window indices in flat (row-major) order.
    pub fn indices(&self) -> impl Iterator<Item = LatticeIndex> + '_ {
        (0..self.dim).map(|f| self.index_at(f))
    }
}
