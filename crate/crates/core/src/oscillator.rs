//! The 1-D harmonic oscillator on the Bohr-Sommerfeld basis.
//!
//! With H = (p^2 + q^2)/2 = r^2/2 an action variable, the quantized tori are
//! circles of energy m hbar and the normalized shifting operators are
//! b e_m = sqrt(2 m hbar) e_{m-1} and its adjoint. The basis may start at
//! m = 0 or m = 1: the punctured phase plane suggests excluding the origin
//! (ground index 1, which reproduces the textbook tridiagonal Q_p matrix),
//! while the identity b†b = 2 Q_H on every row needs the m = 0 state.
//! Both are supported; the default is 1.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{build_lattice, AxisBounds, BohrSommerfeldLattice, QuantizationConfig};
use crate::opalg::BandedOperator;
use crate::quantize::VerificationReport;

/// Basis e_{ground_index}, ..., e_N for the oscillator.
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    ground_index: i64,
    top: i64,
    config: QuantizationConfig,
    lattice: Arc<BohrSommerfeldLattice>,
}

pub const DEFAULT_GROUND_INDEX: i64 = 1;

impl OscillatorBasis {
    /// `ground_index` must be 0 or 1 and `top >= ground_index`.
    pub fn new(ground_index: i64, top: i64, config: QuantizationConfig) -> Result<Self> {
        assert!(
            ground_index == 0 || ground_index == 1,
            "ground index must be 0 or 1"
        );
        let lattice = Arc::new(build_lattice(
            1,
            vec![AxisBounds::bounded(
                Some(ground_index),
                None,
                ground_index,
                top,
            )],
            config,
        )?);
        Ok(Self {
            ground_index,
            top,
            config,
            lattice,
        })
    }

    pub fn ground_index(&self) -> i64 {
        self.ground_index
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn dimension(&self) -> usize {
        self.lattice.dimension()
    }

    pub fn hbar(&self) -> f64 {
        self.config.hbar
    }

    pub fn lattice(&self) -> &Arc<BohrSommerfeldLattice> {
        &self.lattice
    }
}

/// The normalized shifting pair: b e_m = sqrt(2 m hbar) e_{m-1} and
/// b† e_m = sqrt(2 (m+1) hbar) e_{m+1}, annihilating at the window edges.
pub fn build_b(basis: &OscillatorBasis) -> (BandedOperator, BandedOperator) {
    let hbar = basis.hbar();
    let b = BandedOperator::from_shift_rule(basis.lattice.clone(), vec![-1], move |m| {
        Complex64::new((2.0 * m.0[0] as f64 * hbar).sqrt(), 0.0)
    });
    let b_dagger = b.adjoint();
    (b, b_dagger)
}

/// Q_H = diag(m hbar): the oscillator energy with no zero-point offset.
pub fn build_q_h(basis: &OscillatorBasis) -> BandedOperator {
    let hbar = basis.hbar();
    BandedOperator::diagonal(basis.lattice.clone(), move |m| {
        Complex64::new(m.0[0] as f64 * hbar, 0.0)
    })
}

/// Q_p = (b + b†)/2.
pub fn build_q_p(basis: &OscillatorBasis) -> BandedOperator {
    let (b, bdag) = build_b(basis);
    b.add(&bdag)
        .expect("same lattice")
        .scale(Complex64::new(0.5, 0.0))
}

/// Q_q = (b† - b)/2i.
pub fn build_q_q(basis: &OscillatorBasis) -> BandedOperator {
    let (b, bdag) = build_b(basis);
    bdag.sub(&b)
        .expect("same lattice")
        .scale(Complex64::new(0.0, -0.5))
}

/// Check the oscillator operator identities on interior rows:
/// [b, Q_H] = hbar b, [b†, Q_H] = -hbar b†, [b†b, Q_H] = 0 and
/// ||b e_m||^2 = 2 m hbar.
pub fn verify_oscillator(basis: &OscillatorBasis, tol: f64) -> VerificationReport {
    let lat = &basis.lattice;
    let hbar = basis.hbar();
    let (b, bdag) = build_b(basis);
    let qh = build_q_h(basis);

    let r1 = b
        .commutator(&qh)
        .expect("same lattice")
        .sub(&b.scale(Complex64::new(hbar, 0.0)))
        .expect("same lattice");
    let r2 = bdag
        .commutator(&qh)
        .expect("same lattice")
        .add(&bdag.scale(Complex64::new(hbar, 0.0)))
        .expect("same lattice");
    let r3 = bdag
        .compose(&b)
        .expect("same lattice")
        .commutator(&qh)
        .expect("same lattice");

    let mut max_residual: f64 = 0.0;
    let mut checked = 0usize;
    for (flat, idx) in lat.indices().enumerate() {
        if !lat.is_interior(&idx) {
            continue;
        }
        checked += 1;
        for r in [&r1, &r2, &r3] {
            max_residual = max_residual.max(r.column_norm(flat));
        }
        let norm_sq = b.column_norm(flat).powi(2);
        max_residual = max_residual.max((norm_sq - 2.0 * idx.0[0] as f64 * hbar).abs());
    }
    VerificationReport::new(max_residual, checked, lat.dimension() - checked, tol)
}
