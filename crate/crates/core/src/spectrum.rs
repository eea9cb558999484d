//! Semiclassical spectra of 1-DOF (or radially reduced) Hamiltonians.
//!
//! The radial action A(E) = (1/2 pi) closed-integral p dq
//! = (1/pi) integral of sqrt(p^2) between the turning points is computed by
//! Gauss-Legendre quadrature after the substitution q = mid + half sin(u),
//! which absorbs the inverse-square-root endpoint behavior analytically.
//! Energy levels solve A(E) = (m + mu/2) hbar; the Maslov offset mu defaults
//! to 0.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Supported orbit topology. Only single-well librations are handled;
/// rotations and multi-well problems are rejected by `turning_points`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Libration,
}

/// A 1-DOF phase-space problem given by the squared momentum p^2(q, E),
/// negative outside the classically allowed region.
#[derive(Clone)]
pub struct PhaseProblem {
    p_squared: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    search_interval: (f64, f64),
    kind: ProblemKind,
}

/// Grid used to bracket the turning points before bisection.
const SCAN_POINTS: usize = 2048;

impl PhaseProblem {
    pub fn libration(
        p_squared: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        search_interval: (f64, f64),
    ) -> Self {
        assert!(search_interval.0 < search_interval.1);
        Self {
            p_squared: Arc::new(p_squared),
            search_interval,
            kind: ProblemKind::Libration,
        }
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn search_interval(&self) -> (f64, f64) {
        self.search_interval
    }

    pub fn p_squared(&self, q: f64, e: f64) -> f64 {
        (self.p_squared)(q, e)
    }

    /// Locate the two turning points of an admissible energy by scanning the
    /// search interval and refining each sign change by bisection to
    /// 1e-12 relative accuracy. A well narrower than the scan step can be
    /// missed at the base resolution, so a finding of no allowed region is
    /// re-checked once on a 16x finer grid.
    pub fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        match self.turning_points_scan(e, SCAN_POINTS) {
            Err(Error::EnergyNotAdmissible { .. }) => {
                self.turning_points_scan(e, 16 * SCAN_POINTS)
            }
            other => other,
        }
    }

    fn turning_points_scan(&self, e: f64, n: usize) -> Result<(f64, f64)> {
        let (a, b) = self.search_interval;
        let mut crossings: Vec<(f64, f64, bool)> = Vec::new(); // (lo, hi, upward)
        let mut prev_q = a;
        let mut prev_v = self.p_squared(a, e);
        for i in 1..=n {
            let q = a + (b - a) * i as f64 / n as f64;
            let v = self.p_squared(q, e);
            if prev_v <= 0.0 && v > 0.0 {
                crossings.push((prev_q, q, true));
            } else if prev_v > 0.0 && v <= 0.0 {
                crossings.push((prev_q, q, false));
            }
            prev_q = q;
            prev_v = v;
        }
        match crossings.len() {
            0 => Err(Error::EnergyNotAdmissible {
                energy: e,
                reason: "p^2 has no sign change on the search interval".to_string(),
            }),
            1 => Err(Error::EnergyNotAdmissible {
                energy: e,
                reason: "the classically allowed region is clipped by the search interval"
                    .to_string(),
            }),
            2 => {
                let (lo0, hi0, up0) = crossings[0];
                let (lo1, hi1, up1) = crossings[1];
                if !up0 || up1 {
                    return Err(Error::EnergyNotAdmissible {
                        energy: e,
                        reason: "the allowed region touches the search interval ends \
                                 (rotation-like orbit?)"
                            .to_string(),
                    });
                }
                let q_minus = self.bisect_root(lo0, hi0, e);
                let q_plus = self.bisect_root(lo1, hi1, e);
                Ok((q_minus, q_plus))
            }
            k => Err(Error::MultiWellUnsupported {
                energy: e,
                crossings: k,
            }),
        }
    }

    fn bisect_root(&self, mut lo: f64, mut hi: f64, e: f64) -> f64 {
        let mut v_lo = self.p_squared(lo, e);
        for _ in 0..200 {
            if (hi - lo).abs() <= 1e-12 * lo.abs().max(hi.abs()).max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v_mid = self.p_squared(mid, e);
            if (v_lo <= 0.0) == (v_mid <= 0.0) {
                lo = mid;
                v_lo = v_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// A(E) = (1/pi) integral of sqrt(p^2) dq between the turning points.
    pub fn action_integral(&self, e: f64, nodes: usize) -> Result<f64> {
        let rule = GaussLegendre::new(nodes);
        self.action_with_rule(e, &rule)
    }

    pub(crate) fn action_with_rule(&self, e: f64, rule: &GaussLegendre) -> Result<f64> {
        let (q_minus, q_plus) = self.turning_points(e)?;
        let mid = 0.5 * (q_minus + q_plus);
        let half = 0.5 * (q_plus - q_minus);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let integral = rule.integrate(-half_pi, half_pi, |u| {
            let q = mid + half * u.sin();
            let p2 = self.p_squared(q, e).max(0.0);
            p2.sqrt() * half * u.cos()
        });
        Ok(integral / std::f64::consts::PI)
    }
}

/// Scalars governing the level solver.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumConfig {
    pub hbar: f64,
    /// Maslov offset mu: levels solve A(E) = (m + mu/2) hbar. Default 0.
    pub maslov_mu: i64,
    /// Gauss-Legendre node count for each action evaluation.
    pub nodes: usize,
    /// Target on |A(E) - (m + mu/2) hbar|.
    pub residual_tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            maslov_mu: 0,
            nodes: 128,
            residual_tol: 1e-10,
        }
    }
}

/// One solved level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub m: i64,
    pub energy: f64,
    pub residual: f64,
}

/// A level whose bracket or admissibility check failed; other rows are still
/// produced.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFailure {
    pub m: i64,
    pub reason: String,
}

/// The solved spectrum, in ascending m order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelTable {
    pub rows: Vec<LevelRow>,
    pub failures: Vec<LevelFailure>,
}

impl LevelTable {
    /// CSV with header `m,energy,residual`, '.' decimal separator, '\n' line
    /// endings, shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,energy,residual\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{}\n", row.m, row.energy, row.residual));
        }
        out
    }
}

/// Solve A(E) = (m + mu/2) hbar for each m in [m_from, m_to] inside the given
/// energy bracket. A(E) is strictly increasing in E for librations, so each
/// level is found by safeguarded secant/bisection.
pub fn bs_levels(
    prob: &PhaseProblem,
    m_from: i64,
    m_to: i64,
    bracket: (f64, f64),
    config: &SpectrumConfig,
) -> LevelTable {
    assert!(m_from <= m_to);
    assert!(bracket.0 < bracket.1);
    let rule = GaussLegendre::new(config.nodes);
    let mut table = LevelTable::default();
    for m in m_from..=m_to {
        let target = (m as f64 + config.maslov_mu as f64 / 2.0) * config.hbar;
        match solve_level(prob, target, bracket, &rule, config.residual_tol) {
            Ok((energy, residual)) => table.rows.push(LevelRow {
                m,
                energy,
                residual,
            }),
            Err(err) => table.failures.push(LevelFailure {
                m,
                reason: err.to_string(),
            }),
        }
    }
    table
}

fn solve_level(
    prob: &PhaseProblem,
    target: f64,
    bracket: (f64, f64),
    rule: &GaussLegendre,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = bracket;
    let mut g_lo = prob.action_with_rule(lo, rule)? - target;
    let mut g_hi = prob.action_with_rule(hi, rule)? - target;
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(Error::BracketFailure {
            target,
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let mut best = (lo, g_lo.abs());
    for _ in 0..200 {
        // Secant candidate, safeguarded to the interior of the bracket.
        let denom = g_hi - g_lo;
        let mut cand = if denom.abs() > 0.0 {
            lo - g_lo * (hi - lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        let width = hi - lo;
        if !(cand > lo + 1e-3 * width && cand < hi - 1e-3 * width) {
            cand = 0.5 * (lo + hi);
        }
        let g = prob.action_with_rule(cand, rule)? - target;
        if g.abs() < best.1 {
            best = (cand, g.abs());
        }
        if g.abs() <= tol {
            return Ok((cand, g.abs()));
        }
        if g < 0.0 {
            lo = cand;
            g_lo = g;
        } else {
            hi = cand;
            g_hi = g;
        }
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
    }
    Ok(best)
}

/// Ready-made phase problems.
pub mod problems {
    use super::PhaseProblem;

    /// Harmonic oscillator H = (p^2 + q^2)/2: p^2 = 2E - q^2 and A(E) = E.
    pub fn oscillator(q_max: f64) -> PhaseProblem {
        PhaseProblem::libration(|q, e| 2.0 * e - q * q, (-q_max, q_max))
    }

    /// Radial Coulomb problem at unit mass with attractive potential -k/q:
    /// p^2 = 2E + 2k/q - ell^2/q^2, bound for E < 0.
    pub fn coulomb(k: f64, ell: f64, search: (f64, f64)) -> PhaseProblem {
        assert!(k > 0.0 && ell > 0.0 && search.0 > 0.0);
        PhaseProblem::libration(
            move |q, e| 2.0 * e + 2.0 * k / q - ell * ell / (q * q),
            search,
        )
    }

    /// Radial reduction of H = sqrt(p^2 + mass^2) + k/r (k < 0 attractive):
    /// p_r^2 = (E - k/r)^2 - mass^2 - ell^2/r^2.
    pub fn relativistic_kepler(k: f64, ell: f64, mass: f64, search: (f64, f64)) -> PhaseProblem {
        assert!(k < 0.0, "bound states need an attractive potential (k < 0)");
        assert!(ell * ell > k * k, "centrifugal term must dominate at r -> 0");
        assert!(search.0 > 0.0);
        PhaseProblem::libration(
            move |q, e| {
                let w = e - k / q;
                w * w - mass * mass - ell * ell / (q * q)
            },
            search,
        )
    }
}
