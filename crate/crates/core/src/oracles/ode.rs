//! Fixed-step classical Runge-Kutta integration of the reduced equations,
//! refined by step halving until two successive grids agree.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

/// Default sup-norm tolerance between successive refinements.
pub const DEFAULT_ODE_TOL: f64 = 1e-9;

/// Refinements attempted before reporting [`Error::NoConvergence`].
pub const MAX_HALVINGS: usize = 20;

/// `|y|` above which a sample is treated as a blow-up and not recorded.
pub const BLOW_UP: f64 = 1e12;

/// A sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Step of the accepted grid.
    pub step_used: f64,
    /// Abscissae where `y` passed through infinity.
    pub pole_events: Vec<f64>,
}

impl OdeSolution {
    /// Linear interpolation between recorded samples.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let i = self.xs.partition_point(|&v| v < x);
        if i < self.xs.len() && self.xs[i] == x {
            return Some(self.ys[i]);
        }
        if i == 0 || i == self.xs.len() {
            return None;
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let w = (x - x0) / (x1 - x0);
        Some(self.ys[i - 1] * (1.0 - w) + self.ys[i] * w)
    }
}

fn rk4_step<F: Fn(f64) -> f64>(f: &F, y: f64, h: f64) -> f64 {
    let k1 = f(y);
    let k2 = f(y + 0.5 * h * k1);
    let k3 = f(y + 0.5 * h * k2);
    let k4 = f(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn check_span(span: (f64, f64), tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return domain(format!("ODE tolerance must be > 0, got {tol}"));
    }
    if !(span.0.is_finite() && span.1.is_finite() && span.0 < span.1) {
        return domain(format!("ODE span must be finite and increasing, got {span:?}"));
    }
    Ok(())
}

/// Initial number of steps: resolves the fastest rate `(1 + gamma)/alpha`.
fn initial_steps(params: &ModelParams, span: (f64, f64)) -> usize {
    let rate = (1.0 + params.gamma()) / params.alpha();
    let n = ((span.1 - span.0) * rate * 4.0).ceil() as usize;
    n.clamp(32, 1 << 20)
}

/// Runs `solve(n)` on doubling grids until the values on the shared nodes
/// agree to `tol`; `solve` returns the per-node comparison values.
fn refine<T, S>(mut n: usize, tol: f64, max_halvings: usize, what: &str, solve: S) -> Result<(T, Vec<f64>, usize)>
where
    S: Fn(usize) -> (T, Vec<f64>),
{
    let (_, mut coarse_cmp) = solve(n);
    for _ in 0..max_halvings {
        n *= 2;
        let (fine, fine_cmp) = solve(n);
        let diff = coarse_cmp
            .iter()
            .enumerate()
            .map(|(i, c)| (fine_cmp[2 * i] - c).abs())
            .fold(0.0, f64::max);
        log::debug!("{what}: n={n} refinement difference {diff:e}");
        if diff < tol {
            return Ok((fine, fine_cmp, n));
        }
        coarse_cmp = fine_cmp;
    }
    Err(Error::NoConvergence {
        what: format!("{what} did not settle to {tol:e} in sup-norm"),
        iterations: max_halvings,
    })
}

/// Integrates `alpha*g' = gamma - sin(g)` from `g(span.0) = g0`.
pub fn ode_solve_g(params: &ModelParams, g0: f64, span: (f64, f64), tol: f64) -> Result<OdeSolution> {
    solve_g_with(params, g0, span, tol, MAX_HALVINGS)
}

fn solve_g_with(
    params: &ModelParams,
    g0: f64,
    span: (f64, f64),
    tol: f64,
    max_halvings: usize,
) -> Result<OdeSolution> {
    check_span(span, tol)?;
    if !g0.is_finite() {
        return domain("initial g must be finite");
    }
    let (alpha, gamma) = (params.alpha(), params.gamma());
    let rhs = move |g: f64| (gamma - g.sin()) / alpha;
    let length = span.1 - span.0;
    let solve = |n: usize| {
        let h = length / n as f64;
        let mut ys = Vec::with_capacity(n + 1);
        let mut g = g0;
        ys.push(g);
        for _ in 0..n {
            g = rk4_step(&rhs, g, h);
            ys.push(g);
        }
        ((), ys)
    };
    let ((), ys, n) = refine(initial_steps(params, span), tol, max_halvings, "ode_solve_g", solve)?;
    let h = length / n as f64;
    Ok(OdeSolution {
        xs: (0..=n).map(|i| span.0 + h * i as f64).collect(),
        ys,
        step_used: h,
        pole_events: Vec::new(),
    })
}

/// Projective chart for the Riccati variable: `y` itself, or `z = -1/y`
/// near `|y| = inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    Y(f64),
    Z(f64),
}

impl Chart {
    fn y(self) -> f64 {
        match self {
            Chart::Y(y) => y,
            Chart::Z(z) => -1.0 / z,
        }
    }

    fn normalized(self) -> Self {
        match self {
            Chart::Y(y) if y.abs() > 1.0 => Chart::Z(-1.0 / y),
            Chart::Z(z) if z.abs() > 1.0 => Chart::Y(-1.0 / z),
            c => c,
        }
    }
}

struct RiccatiRun {
    xs: Vec<f64>,
    ys: Vec<f64>,
    poles: Vec<f64>,
}

/// Integrates `2*alpha*y' = 2*y + gamma*(1 + y^2)` from `y(span.0) = y0`.
///
/// Where `|y| > 1` the solver works with `z = -1/y`, which obeys
/// `2*alpha*z' = gamma*(1 + z^2) - 2*z` and passes through zero at a pole of
/// `y`. Each zero crossing is recorded in `pole_events`; samples with
/// `|y| > 1e12` are omitted so every recorded `y` is finite. Refinement is
/// measured on the unwrapped angle `atan(y) + k*pi`, which is continuous
/// through the poles.
pub fn ode_solve_y(params: &ModelParams, y0: f64, span: (f64, f64), tol: f64) -> Result<OdeSolution> {
    check_span(span, tol)?;
    if !y0.is_finite() {
        return domain("initial y must be finite");
    }
    let (alpha, gamma) = (params.alpha(), params.gamma());
    let y_rhs = move |y: f64| (2.0 * y + gamma * (1.0 + y * y)) / (2.0 * alpha);
    let z_rhs = move |z: f64| (gamma * (1.0 + z * z) - 2.0 * z) / (2.0 * alpha);
    let advance = move |c: Chart, h: f64| match c {
        Chart::Y(y) => Chart::Y(rk4_step(&y_rhs, y, h)),
        Chart::Z(z) => Chart::Z(rk4_step(&z_rhs, z, h)),
    };
    let length = span.1 - span.0;

    let solve = |n: usize| {
        let h = length / n as f64;
        let mut state = Chart::Y(y0).normalized();
        let mut run = RiccatiRun {
            xs: vec![span.0],
            ys: vec![y0],
            poles: Vec::new(),
        };
        let mut angles = Vec::with_capacity(n + 1);
        let mut turns = 0.0;
        let mut last_angle = y0.atan();
        angles.push(last_angle);
        for i in 0..n {
            let x = span.0 + h * i as f64;
            let next = advance(state, h);
            if let (Chart::Z(z0), Chart::Z(z1)) = (state, next) {
                if z0 < 0.0 && z1 >= 0.0 {
                    // bisect on the sub-step length for the zero of z
                    let (mut lo, mut hi) = (0.0, h);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        match advance(state, mid) {
                            Chart::Z(z) if z < 0.0 => lo = mid,
                            _ => hi = mid,
                        }
                    }
                    run.poles.push(x + 0.5 * (lo + hi));
                }
            }
            state = next.normalized();
            let y = state.y();
            let angle = y.atan();
            if angle - last_angle < -0.5 * PI {
                turns += 1.0;
            } else if angle - last_angle > 0.5 * PI {
                turns -= 1.0;
            }
            last_angle = angle;
            angles.push(angle + PI * turns);
            if y.is_finite() && y.abs() <= BLOW_UP {
                run.xs.push(span.0 + h * (i + 1) as f64);
                run.ys.push(y);
            }
        }
        (run, angles)
    };

    let (run, _, n) = refine(initial_steps(params, span), tol, MAX_HALVINGS, "ode_solve_y", solve)?;
    Ok(OdeSolution {
        xs: run.xs,
        ys: run.ys,
        step_used: length / n as f64,
        pole_events: run.poles,
    })
}
