//! Globally adaptive Gauss-Kronrod (7/15) quadrature and the two integrals
//! it is used for: the kink-array period and the implicit `xi(g)` relation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

/// Default absolute tolerance for the quadrature oracles.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Evaluation budget before giving up.
pub const MAX_EVALUATIONS: usize = 1_000_000;

// Kronrod abscissae on [0, 1], odd indices are the Gauss points.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 15-point Kronrod estimate on `[a, b]` with `|K15 - G7|` as error.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, always
/// bisecting the panel with the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return domain(format!("quadrature tolerance must be > 0, got {tol}"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return domain("quadrature bounds must be finite");
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let first = gauss_kronrod(&f, lo, hi);
    let mut evaluations = 15;
    let mut error = first.error;
    let mut heap = BinaryHeap::from([first]);
    let mut bisections = 0;

    while error > tol {
        if evaluations + 30 > MAX_EVALUATIONS {
            return Err(Error::NoConvergence {
                what: format!("adaptive quadrature stalled at error estimate {error:e} (tolerance {tol:e})"),
                iterations: bisections,
            });
        }
        let worst = heap.pop().expect("panel heap is never empty");
        if worst.b - worst.a < f64::EPSILON * (hi - lo) {
            return Err(Error::NoConvergence {
                what: format!(
                    "adaptive quadrature needs a panel narrower than the resolution of [{lo}, {hi}] near {}",
                    worst.a
                ),
                iterations: bisections,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        evaluations += 30;
        bisections += 1;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // re-sum periodically so cancellation in the running total cannot drift
        if bisections % 64 == 0 {
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    Ok(QuadResult {
        value: sign * value,
        error,
        evaluations,
    })
}

/// `alpha * int_0^{2 pi} ds / (gamma - sin s)` for `gamma > 1`.
pub fn quad_period(params: &ModelParams, tol: f64) -> Result<f64> {
    let gamma = params.gamma();
    if gamma <= 1.0 {
        return domain(format!("the period integral needs gamma > 1, got gamma = {gamma}"));
    }
    let alpha = params.alpha();
    Ok(integrate(|s| alpha / (gamma - s.sin()), 0.0, 2.0 * PI, tol)?.value)
}

/// Range `(min, max)` of `sin` on `[a, b]`.
fn sin_range(a: f64, b: f64) -> (f64, f64) {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let mut lo = a.sin().min(b.sin());
    let mut hi = a.sin().max(b.sin());
    // maxima at pi/2 + 2k pi, minima at -pi/2 + 2k pi
    let two_pi = 2.0 * PI;
    if ((a - PI / 2.0) / two_pi).ceil() <= ((b - PI / 2.0) / two_pi).floor() {
        hi = 1.0;
    }
    if ((a + PI / 2.0) / two_pi).ceil() <= ((b + PI / 2.0) / two_pi).floor() {
        lo = -1.0;
    }
    (lo, hi)
}

/// Displacement `alpha * int_{g_from}^{g_to} ds / (gamma - sin s)` between two
/// values of `g` along a monotone travelling-wave profile.
///
/// Fails when `gamma - sin s` vanishes anywhere on the closed path; zeros
/// within `1e-12` of an endpoint count.
pub fn implicit_xi_of_g(params: &ModelParams, g_from: f64, g_to: f64, tol: f64) -> Result<f64> {
    let gamma = params.gamma();
    let (lo, hi) = sin_range(g_from, g_to);
    if lo - 1e-12 <= gamma && gamma <= hi + 1e-12 {
        return domain(format!(
            "gamma - sin(s) vanishes on the path [{g_from}, {g_to}] (sin ranges over [{lo}, {hi}], gamma = {gamma})"
        ));
    }
    let alpha = params.alpha();
    Ok(integrate(|s| alpha / (gamma - s.sin()), g_from, g_to, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(alpha: f64, gamma: f64) -> ModelParams {
        ModelParams::new(alpha, gamma).unwrap()
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 64.0 / 6.0 - 1.0 / 6.0 - 9.0, epsilon = 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let f = |x: f64| x.exp();
        let a = integrate(f, 0.0, 1.0, 1e-12).unwrap().value;
        let b = integrate(f, 1.0, 0.0, 1e-12).unwrap().value;
        assert_abs_diff_eq!(a, -b, epsilon = 1e-15);
        assert_abs_diff_eq!(a, 1f64.exp() - 1.0, epsilon = 1e-13);
    }

    #[test]
    fn sharp_peak() {
        // int_{-1}^{1} 1/(x^2 + 1e-6) dx = 2 atan(1000)/1e-3
        let r = integrate(|x| 1.0 / (x * x + 1e-6), -1.0, 1.0, 1e-9).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 * 1000f64.atan() / 1e-3, epsilon = 1e-8);
    }

    #[test]
    fn unreachable_tolerance_reports_no_convergence() {
        // divergent: every panel touching 0 keeps the same error estimate
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-6);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn period_examples() {
        let v = quad_period(&p(1.0, 2f64.sqrt()), 1e-10).unwrap();
        assert_abs_diff_eq!(v, 2.0 * PI, epsilon = 1e-10);
        let v = quad_period(&p(2.0, 1.25), 1e-10).unwrap();
        assert_abs_diff_eq!(v, 16.0 * PI / 3.0, epsilon = 1e-10);
        // 2 pi / sqrt(1.0001^2 - 1), mpmath
        let v = quad_period(&p(1.0, 1.0001), DEFAULT_QUAD_TOL).unwrap();
        assert!((v / 444.27718702499415 - 1.0).abs() < 1e-6);
        assert!(quad_period(&p(1.0, 1.0), 1e-10).is_err());
    }

    #[test]
    fn sin_range_cases() {
        assert_eq!(sin_range(0.0, PI), (0.0f64.min(PI.sin()), 1.0));
        let (lo, hi) = sin_range(PI, 2.0 * PI);
        assert_eq!(lo, -1.0);
        assert!(hi < 1e-15);
        let (lo, hi) = sin_range(0.1, 0.2);
        assert_eq!((lo, hi), (0.1f64.sin(), 0.2f64.sin()));
    }

    #[test]
    fn implicit_xi_domain() {
        let params = p(1.0, 2.0);
        let full = implicit_xi_of_g(&params, 0.0, 2.0 * PI, 1e-10).unwrap();
        assert_abs_diff_eq!(full, quad_period(&params, 1e-10).unwrap(), epsilon = 1e-10);
        assert!(implicit_xi_of_g(&p(1.0, 0.5), 0.0, PI / 6.0, 1e-10).is_err());
        assert!(implicit_xi_of_g(&p(1.0, 0.5), PI / 2.0, 5.0 * PI / 6.0, 1e-10).is_err());
        assert!(implicit_xi_of_g(&p(1.0, 0.5), PI / 2.0, 2.0, 1e-10).is_ok());
    }
}
