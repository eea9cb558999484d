//! Gauss-Legendre quadrature rules.
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from the Chebyshev initial guess; weights follow from the
//! derivative. Exact for polynomials of degree 2n-1.

/// A Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Initial guess: Chebyshev abscissa.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        // Newton from the Chebyshev guess walks the roots from +1 down; store ascending.
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate f over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Simpson quadrature. Kept as an independent cross-check route for
/// the Gauss-Legendre integrals; subdivides until the local Richardson error
/// estimate is below tol.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fb, fm, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    simpson_rec(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_polynomials() {
        let rule = GaussLegendre::new(3);
        // Degree 5 is integrated exactly by a 3-point rule.
        let got = rule.integrate(0.0, 2.0, |x| x.powi(5));
        assert!((got - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sin_integral_converges() {
        let exact = 2.0;
        let mut prev_err = f64::INFINITY;
        for n in [2, 4, 8, 16, 32] {
            let rule = GaussLegendre::new(n);
            let err = (rule.integrate(0.0, std::f64::consts::PI, f64::sin) - exact).abs();
            assert!(err < prev_err || err < 1e-14);
            prev_err = err;
        }
        assert!(prev_err < 1e-14);
    }

    #[test]
    fn nodes_are_symmetric_and_ascending() {
        let rule = GaussLegendre::new(7);
        for w in rule.nodes().windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..rule.len() {
            let j = rule.len() - 1 - i;
            assert!((rule.nodes()[i] + rule.nodes()[j]).abs() < 1e-14);
            assert!((rule.weights()[i] - rule.weights()[j]).abs() < 1e-14);
        }
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_simpson_handles_sqrt_endpoints() {
        // Quarter circle: integral of sqrt(1 - x^2) over [-1, 1] is pi/2.
        let got = adaptive_simpson(&|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-11);
        assert!((got - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }
}
