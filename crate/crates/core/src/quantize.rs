//! The quantization dictionary on a global lattice.
//!
//! Actions quantize to diagonal operators, angle exponentials to unit
//! shifting operators (e^{+i phi_i} lowers m_i by one, matching the
//! convention that identifies the lowering operator a_i with Q_{e^{i phi_i}}),
//! and real linear-in-action mixed terms to symmetrized products. Everything
//! else in the quantizable class is a linear combination of those pieces.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::BohrSommerfeldLattice;
use crate::opalg::BandedOperator;

/// Evaluable analytic function of the action tuple (m_1 hbar, ..., m_n hbar).
pub type ActionFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// The action-dependent factor of a term.
#[derive(Clone)]
pub enum ActionFactor {
    /// The single action A_i (axis index).
    Linear(usize),
    /// An analytic function of all actions; only valid with no angle factor.
    Function(ActionFn),
}

impl fmt::Debug for ActionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionFactor::Linear(i) => write!(f, "Linear({i})"),
            ActionFactor::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// One term of a quantizable observable: coeff * action_part * e^{i k.phi}.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Complex64,
    pub action: Option<ActionFactor>,
    /// The integer vector k of the angle exponential e^{i k.phi}; all zeros
    /// means no angle factor.
    pub angle: Vec<i64>,
}

impl Term {
    pub fn constant(n: usize, coeff: Complex64) -> Self {
        Self {
            coeff,
            action: None,
            angle: vec![0; n],
        }
    }

    pub fn linear_action(n: usize, axis: usize) -> Self {
        Self {
            coeff: Complex64::new(1.0, 0.0),
            action: Some(ActionFactor::Linear(axis)),
            angle: vec![0; n],
        }
    }

    pub fn angle_exponential(coeff: Complex64, k: Vec<i64>) -> Self {
        Self {
            coeff,
            action: None,
            angle: k,
        }
    }

    pub fn action_function(n: usize, coeff: Complex64, f: ActionFn) -> Self {
        Self {
            coeff,
            action: Some(ActionFactor::Function(f)),
            angle: vec![0; n],
        }
    }

    fn has_angle(&self) -> bool {
        self.angle.iter().any(|&k| k != 0)
    }
}

/// A quantizable classical observable: a sum of terms.
#[derive(Clone, Debug, Default)]
pub struct ObservableExpr {
    pub terms: Vec<Term>,
}

impl ObservableExpr {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }
}

/// Outcome of a residual verification sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_residual: f64,
    pub checked_rows: usize,
    pub boundary_rows_excluded: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(
        max_residual: f64,
        checked_rows: usize,
        boundary_rows_excluded: usize,
        tolerance: f64,
    ) -> Self {
        Self {
            max_residual,
            checked_rows,
            boundary_rows_excluded,
            tolerance,
            pass: max_residual <= tolerance,
        }
    }
}

/// Q_{A_i}: diagonal with entry m_i hbar.
pub fn q_action(lat: &Arc<BohrSommerfeldLattice>, axis: usize) -> Result<BandedOperator> {
    check_axis(lat, axis)?;
    let hbar = lat.hbar();
    Ok(BandedOperator::diagonal(lat.clone(), move |m| {
        Complex64::new(m.0[axis] as f64 * hbar, 0.0)
    }))
}

/// Q_{F(A_1, ..., A_n)}: diagonal with entry F(m hbar).
pub fn q_action_function(lat: &Arc<BohrSommerfeldLattice>, f: &ActionFn) -> Result<BandedOperator> {
    // Validate finiteness up front so the error can name the offending point.
    for idx in lat.indices() {
        let actions = lat.action_values(&idx)?;
        let v = f(&actions);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteActionValue {
                index: idx.0.clone(),
            });
        }
    }
    let lat_for_eval = lat.clone();
    let f = f.clone();
    Ok(BandedOperator::diagonal(lat.clone(), move |m| {
        let actions = lat_for_eval.action_values(m).expect("index in window");
        f(&actions)
    }))
}

/// The shifting operator a_i: e_m -> e_{m - delta_i}, annihilating at the
/// window edge.
pub fn q_shift(lat: &Arc<BohrSommerfeldLattice>, axis: usize) -> Result<BandedOperator> {
    check_axis(lat, axis)?;
    let mut shift = vec![0i64; lat.degrees_of_freedom()];
    shift[axis] = -1;
    Ok(BandedOperator::from_shift_rule(lat.clone(), shift, |_| {
        Complex64::new(1.0, 0.0)
    }))
}

/// Q_{e^{i k.phi}}: the composite shift by -k with unit amplitude.
pub fn q_angle_exponential(lat: &Arc<BohrSommerfeldLattice>, k: &[i64]) -> Result<BandedOperator> {
    assert_eq!(
        k.len(),
        lat.degrees_of_freedom(),
        "angle exponent k must have one entry per degree of freedom"
    );
    let shift: Vec<i64> = k.iter().map(|&x| -x).collect();
    Ok(BandedOperator::from_shift_rule(lat.clone(), shift, |_| {
        Complex64::new(1.0, 0.0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// Q_{cos phi_i} = (a_i + a_i†)/2, Q_{sin phi_i} = (a_i - a_i†)/2i.
pub fn q_trig(
    lat: &Arc<BohrSommerfeldLattice>,
    axis: usize,
    kind: TrigKind,
) -> Result<BandedOperator> {
    let a = q_shift(lat, axis)?;
    let adag = a.adjoint();
    Ok(match kind {
        TrigKind::Cos => a.add(&adag)?.scale(Complex64::new(0.5, 0.0)),
        TrigKind::Sin => a.sub(&adag)?.scale(Complex64::new(0.0, -0.5)),
    })
}

/// Q_{A_i cos phi_i} (or sin): the symmetrized product
/// (Q_{A_i} Q_trig + Q_trig Q_{A_i}) / 2.
pub fn q_mixed_linear(
    lat: &Arc<BohrSommerfeldLattice>,
    axis: usize,
    kind: TrigKind,
) -> Result<BandedOperator> {
    let qa = q_action(lat, axis)?;
    let qt = q_trig(lat, axis, kind)?;
    symmetrized(&qa, &qt)
}

fn symmetrized(a: &BandedOperator, b: &BandedOperator) -> Result<BandedOperator> {
    Ok(a.compose(b)?
        .add(&b.compose(a)?)?
        .scale(Complex64::new(0.5, 0.0)))
}

/// Quantize a sum of terms by linear extension of the dictionary.
pub fn quantize_expr(
    lat: &Arc<BohrSommerfeldLattice>,
    expr: &ObservableExpr,
) -> Result<BandedOperator> {
    let n = lat.degrees_of_freedom();
    let mut acc = BandedOperator::zero(lat.clone());
    for (ti, term) in expr.terms.iter().enumerate() {
        if term.angle.len() != n {
            return Err(Error::Unquantizable {
                term: format!("term {ti}"),
                reason: format!(
                    "angle vector has length {}, lattice has {n} degrees of freedom",
                    term.angle.len()
                ),
            });
        }
        let op = match (&term.action, term.has_angle()) {
            (None, _) => q_angle_exponential(lat, &term.angle)?,
            (Some(ActionFactor::Linear(axis)), false) => q_action(lat, *axis)?,
            (Some(ActionFactor::Linear(axis)), true) => {
                let qa = q_action(lat, *axis)?;
                let qk = q_angle_exponential(lat, &term.angle)?;
                symmetrized(&qa, &qk)?
            }
            (Some(ActionFactor::Function(f)), false) => q_action_function(lat, f)?,
            (Some(ActionFactor::Function(_)), true) => {
                return Err(Error::Unquantizable {
                    term: format!("term {ti}"),
                    reason: "a general action function may not carry an angle factor; \
                             only terms linear in the actions may"
                        .to_string(),
                });
            }
        };
        acc = acc.add(&op.scale(term.coeff))?;
    }
    Ok(acc)
}

/// Check [a_i, Q_{A_j}] = delta_ij hbar a_i over the interior of the window.
///
/// The residual for each pair (i, j) and each interior basis point m is the
/// Euclidean norm of ([a_i, Q_{A_j}] - delta_ij hbar a_i) e_m. Window-edge
/// points are excluded and counted.
pub fn verify_shift_commutation(lat: &Arc<BohrSommerfeldLattice>, tol: f64) -> VerificationReport {
    let n = lat.degrees_of_freedom();
    let hbar = lat.hbar();
    let mut max_residual: f64 = 0.0;
    let interior: Vec<usize> = lat
        .indices()
        .enumerate()
        .filter(|(_, idx)| lat.is_interior(idx))
        .map(|(flat, _)| flat)
        .collect();
    for i in 0..n {
        let a_i = q_shift(lat, i).expect("axis in range");
        for j in 0..n {
            let q_aj = q_action(lat, j).expect("axis in range");
            let mut residual = a_i.commutator(&q_aj).expect("same lattice");
            if i == j {
                residual = residual
                    .sub(&a_i.scale(Complex64::new(hbar, 0.0)))
                    .expect("same lattice");
            }
            for &flat in &interior {
                max_residual = max_residual.max(residual.column_norm(flat));
            }
        }
    }
    VerificationReport::new(
        max_residual,
        interior.len(),
        lat.dimension() - interior.len(),
        tol,
    )
}

fn check_axis(lat: &BohrSommerfeldLattice, axis: usize) -> Result<()> {
    let n = lat.degrees_of_freedom();
    if axis >= n {
        return Err(Error::AxisOutOfRange { axis, n });
    }
    Ok(())
}
