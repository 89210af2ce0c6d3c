//! Leapfrog finite-difference evolution of the field equation on a segment
//! pinned to a reference wave, or on a circle with twisted periodic
//! boundaries `phi(x + L) = phi(x) + chirality*2*pi*m`.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::closed_form::{xi_period, TravellingWave};
use crate::error::{domain, Error, Result};
use crate::format::num;
use crate::model::{energy_density, wrap_to, ModelParams};

const TWO_PI: f64 = 2.0 * PI;

/// `|phi|` beyond which a run is declared divergent.
pub const BLOW_UP_THRESHOLD: f64 = 1e6;

pub const DEFAULT_CFL_GUARD: f64 = 0.9;

pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimDomain {
    /// Circle of length `winding * period`.
    Circle { winding: u32 },
    Segment { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Ghost values `phi[-1] = phi[n-1] - twist`, `phi[n] = phi[0] + twist`.
    TwistedPeriodic { twist: f64 },
    /// End samples follow the reference wave in time.
    DirichletFromWave(TravellingWave),
}

/// Two time levels of the field on a uniform grid `x_i = x0 + i*dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub x0: f64,
    pub dx: f64,
    pub phi: Vec<f64>,
    /// Field at `t - dt`.
    pub phi_prev: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub winding: u32,
    pub boundary: Boundary,
}

impl FieldState {
    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    /// Domain length: `n*dx` on a circle, `(n-1)*dx` on a segment.
    pub fn length(&self) -> f64 {
        match self.boundary {
            Boundary::TwistedPeriodic { .. } => self.dx * self.n() as f64,
            Boundary::DirichletFromWave(_) => self.dx * (self.n() - 1) as f64,
        }
    }

    /// `(phi[i-1], phi[i+1])` with the boundary mode applied; on a segment
    /// the end points reuse their single neighbour.
    fn neighbours(&self, phi: &[f64], i: usize) -> (f64, f64) {
        let n = phi.len();
        match self.boundary {
            Boundary::TwistedPeriodic { twist } => {
                let left = if i == 0 { phi[n - 1] - twist } else { phi[i - 1] };
                let right = if i == n - 1 { phi[0] + twist } else { phi[i + 1] };
                (left, right)
            }
            Boundary::DirichletFromWave(_) => {
                let left = if i == 0 { phi[1] } else { phi[i - 1] };
                let right = if i == n - 1 { phi[n - 2] } else { phi[i + 1] };
                (left, right)
            }
        }
    }

    /// Winding number of the field.
    ///
    /// On a circle this is `(1/2pi)` times the sum of nearest-neighbour
    /// increments around the loop, with the closing link reduced to
    /// `(-pi, pi]`; it is an integer unless the field has slipped. On a
    /// segment it is `(phi[n-1] - phi[0])/2pi`.
    pub fn winding_observable(&self) -> f64 {
        let n = self.n();
        let open = self.phi[n - 1] - self.phi[0];
        match self.boundary {
            Boundary::TwistedPeriodic { .. } => (open + wrap_to(self.phi[0] - self.phi[n - 1], 0.0)) / TWO_PI,
            Boundary::DirichletFromWave(_) => open / TWO_PI,
        }
    }

    /// `phi_t` by the backward difference of the two stored levels.
    pub fn phi_t(&self) -> Vec<f64> {
        self.phi
            .iter()
            .zip(&self.phi_prev)
            .map(|(a, b)| (a - b) / self.dt)
            .collect()
    }

    /// Writes `x,phi,phi_t`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,phi,phi_t")?;
        for (i, (phi, phi_t)) in self.phi.iter().zip(self.phi_t()).enumerate() {
            writeln!(out, "{},{},{}", num(self.x(i)), num(*phi), num(phi_t))?;
        }
        Ok(())
    }
}

/// Samples `wave` at `t = 0` on `n` grid points of `domain`; the previous
/// level at `t = -dt` comes from the second-order Taylor expansion with the
/// exact `phi_t = -g'` and `phi_tt = g''`.
pub fn init_from_wave(wave: &TravellingWave, n: usize, domain_spec: SimDomain, dt: f64) -> Result<FieldState> {
    if n < MIN_GRID_POINTS {
        return domain(format!("grid needs at least {MIN_GRID_POINTS} points, got {n}"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("dt must be finite and > 0, got {dt}"));
    }
    let (x0, dx, winding, boundary) = match domain_spec {
        SimDomain::Circle { winding } => {
            let period = xi_period(wave.params()).map_err(|_| {
                Error::Domain(format!(
                    "a circle domain needs gamma > 1 for its length m*period, got gamma = {}",
                    wave.params().gamma()
                ))
            })?;
            if winding == 0 {
                return domain("circle winding m must be >= 1");
            }
            let length = winding as f64 * period;
            let twist = wave.chirality().sign() * TWO_PI * winding as f64;
            (0.0, length / n as f64, winding, Boundary::TwistedPeriodic { twist })
        }
        SimDomain::Segment { lo, hi } => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return domain(format!("segment needs finite lo < hi, got [{lo}, {hi}]"));
            }
            (lo, (hi - lo) / (n - 1) as f64, 0, Boundary::DirichletFromWave(*wave))
        }
    };
    let alpha = wave.params().alpha();
    let mut phi = Vec::with_capacity(n);
    let mut phi_prev = Vec::with_capacity(n);
    for i in 0..n {
        let x = x0 + dx * i as f64;
        let xi = wave.xi(x, 0.0);
        let value = wave.phi(x, 0.0);
        let dg = wave.g_prime(xi);
        let d2g = -(wave.g(xi)).cos() * dg / alpha;
        // phi_t = -g', phi_tt = g''
        phi.push(value);
        phi_prev.push(value + dt * dg + 0.5 * dt * dt * d2g);
    }
    Ok(FieldState {
        x0,
        dx,
        phi,
        phi_prev,
        t: 0.0,
        dt,
        winding,
        boundary,
    })
}

/// One leapfrog step with the damping term centred in time:
///
/// ```text
/// (p+ - 2p + p-)/dt^2 = D2 p - sin p - gamma - alpha (p+ - p-)/(2 dt)
/// ```
///
/// solved pointwise for `p+`. `dt` has to be the spacing between the two
/// stored levels.
pub fn step(state: &FieldState, params: &ModelParams, dt: f64) -> Result<FieldState> {
    let mut next = state.clone();
    next.dt = dt;
    advance(&mut next, params)?;
    Ok(next)
}

/// In-place form of [`step`] using `state.dt`.
pub fn advance(state: &mut FieldState, params: &ModelParams) -> Result<()> {
    let dt = state.dt;
    if !(dt > 0.0 && dt <= state.dx) {
        return domain(format!(
            "leapfrog needs 0 < dt <= dx for stability, got dt = {dt}, dx = {}",
            state.dx
        ));
    }
    let n = state.n();
    let damp = 0.5 * params.alpha() * dt;
    let gamma = params.gamma();
    let inv_dx2 = 1.0 / (state.dx * state.dx);
    let dt2 = dt * dt;
    let t_next = state.t + dt;

    let mut next = vec![0.0; n];
    let mut worst = 0.0f64;
    for (i, slot) in next.iter_mut().enumerate() {
        let p = state.phi[i];
        let (left, right) = state.neighbours(&state.phi, i);
        let lap = (left - 2.0 * p + right) * inv_dx2;
        // increment form of the update, exact on equilibria
        let v = p + ((1.0 - damp) * (p - state.phi_prev[i]) + dt2 * (lap - p.sin() - gamma)) / (1.0 + damp);
        worst = worst.max(v.abs());
        if !v.is_finite() {
            worst = f64::INFINITY;
        }
        *slot = v;
    }
    if let Boundary::DirichletFromWave(wave) = state.boundary {
        next[0] = wave.phi(state.x(0), t_next);
        next[n - 1] = wave.phi(state.x(n - 1), t_next);
    }
    if worst > BLOW_UP_THRESHOLD {
        return Err(Error::BlowUp {
            t: t_next,
            magnitude: worst,
        });
    }
    state.phi_prev = std::mem::replace(&mut state.phi, next);
    state.t = t_next;
    Ok(())
}

/// Sinusoidal perturbation of the field, applied to `phi` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub mode: u32,
}

impl Perturbation {
    /// `eps*sin(2 pi k x/L)` on a circle, `eps*sin(pi k (x - lo)/L)` on a
    /// segment so that it vanishes at the pinned ends.
    pub fn profile(&self, state: &FieldState, i: usize) -> f64 {
        let u = (state.x(i) - state.x0) / state.length();
        let k = self.mode as f64;
        let arg = match state.boundary {
            Boundary::TwistedPeriodic { .. } => TWO_PI * k * u,
            Boundary::DirichletFromWave(_) => PI * k * u,
        };
        self.amplitude * arg.sin()
    }

    /// Adds the profile to both time levels, leaving `phi_t` unchanged.
    pub fn apply(&self, state: &mut FieldState) {
        for i in 0..state.n() {
            let d = self.profile(state, i);
            state.phi[i] += d;
            state.phi_prev[i] += d;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_guard: f64,
    pub record_every: usize,
    pub perturbation: Option<Perturbation>,
    /// Report a blow-up in the returned report instead of failing.
    pub probe: bool,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            cfl_guard: DEFAULT_CFL_GUARD,
            record_every: 1,
            perturbation: None,
            probe: false,
        }
    }

    pub fn validate(&self, dx: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= self.cfl_guard * dx * (1.0 + 1e-12)) {
            return domain(format!(
                "dt = {} violates dt <= cfl_guard*dx = {}",
                self.dt,
                self.cfl_guard * dx
            ));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return domain(format!("t_end must be finite and > 0, got {}", self.t_end));
        }
        if self.record_every == 0 {
            return domain("record_every must be >= 1");
        }
        if let Some(p) = self.perturbation {
            if !(p.amplitude >= 0.0 && p.amplitude.is_finite()) {
                return domain(format!("perturbation amplitude must be >= 0, got {}", p.amplitude));
            }
        }
        Ok(())
    }
}

/// Recorded observables of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeviationReport {
    pub times: Vec<f64>,
    /// Co-moving RMS distance to the reference; empty without a reference.
    pub deviation: Vec<f64>,
    pub best_shift: Vec<f64>,
    pub winding: Vec<f64>,
    /// Time of blow-up when running in probe mode.
    pub diverged_at: Option<f64>,
}

impl DeviationReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviation.iter().copied().fold(0.0, f64::max)
    }

    /// First recorded time at which the deviation exceeds `threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.deviation)
            .find(|(_, d)| **d > threshold)
            .map(|(t, _)| *t)
    }

    /// Writes `t,deviation,shift`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,deviation,shift")?;
        for ((t, d), s) in self.times.iter().zip(&self.deviation).zip(&self.best_shift) {
            writeln!(out, "{},{},{}", num(*t), num(*d), num(*s))?;
        }
        Ok(())
    }

    fn record(&mut self, state: &FieldState, reference: Option<&TravellingWave>) {
        self.times.push(state.t);
        self.winding.push(state.winding_observable());
        if let Some(wave) = reference {
            let (d, s) = comoving_deviation(state, wave);
            self.deviation.push(d);
            self.best_shift.push(s);
        }
    }
}

/// Advances `state` to `config.t_end`, recording every `record_every` steps
/// and at the end. A perturbation, if configured, is applied first.
pub fn evolve(
    state: &mut FieldState,
    params: &ModelParams,
    config: &SimConfig,
    reference: Option<&TravellingWave>,
) -> Result<DeviationReport> {
    config.validate(state.dx)?;
    if config.dt != state.dt {
        return domain(format!(
            "config dt = {} differs from the state's level spacing {}",
            config.dt, state.dt
        ));
    }
    if let Some(p) = config.perturbation {
        p.apply(state);
    }
    let steps = (config.t_end / config.dt - 1e-9).ceil().max(1.0) as usize;
    let mut report = DeviationReport::default();
    report.record(state, reference);
    for k in 1..=steps {
        if let Err(e) = advance(state, params) {
            match e {
                Error::BlowUp { t, .. } if config.probe => {
                    log::info!("field diverged at t = {t}");
                    report.diverged_at = Some(t);
                    return Ok(report);
                }
                other => return Err(other),
            }
        }
        if k % config.record_every == 0 || k == steps {
            report.record(state, reference);
        }
    }
    Ok(report)
}

/// Minimum over shifts `s` of `RMS(phi_i - reference.phi(x_i - s, t))`.
///
/// A scan over `n` shifts spaced by `dx` (centred on zero) is followed by
/// repeated three-point parabolic refinement of the mean square.
pub fn comoving_deviation(state: &FieldState, reference: &TravellingWave) -> (f64, f64) {
    let n = state.n();
    let t = state.t;
    let mse = |s: f64| {
        state
            .phi
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = p - reference.phi(state.x(i) - s, t);
                d * d
            })
            .sum::<f64>()
            / n as f64
    };
    let half = (n / 2) as i64;
    let (mut best_s, mut best) = (0.0, mse(0.0));
    for j in -half..(n as i64 - half) {
        let s = j as f64 * state.dx;
        let v = mse(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    let mut h = state.dx;
    for _ in 0..12 {
        let (fm, f0, fp) = (mse(best_s - h), mse(best_s), mse(best_s + h));
        let curvature = fm - 2.0 * f0 + fp;
        if curvature > 0.0 {
            let offset = (0.5 * h * (fm - fp) / curvature).clamp(-h, h);
            let candidate = best_s + offset;
            let v = mse(candidate);
            if v <= f0 {
                best_s = candidate;
            }
        } else if fm < f0 || fp < f0 {
            best_s += if fm < fp { -h } else { h };
        }
        h *= 0.25;
    }
    (mse(best_s).max(0.0).sqrt(), best_s)
}

/// Trapezoidal integral of the energy density with `phi_t` from the stored
/// levels and `phi_x` from centred differences (second-order one-sided at
/// segment ends).
pub fn total_energy(state: &FieldState, params: &ModelParams) -> f64 {
    let n = state.n();
    let phi = &state.phi;
    let phi_t = state.phi_t();
    let mut total = 0.0;
    for i in 0..n {
        let phi_x = match state.boundary {
            Boundary::DirichletFromWave(_) if i == 0 => {
                (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * state.dx)
            }
            Boundary::DirichletFromWave(_) if i == n - 1 => {
                (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * state.dx)
            }
            _ => {
                let (left, right) = state.neighbours(phi, i);
                (right - left) / (2.0 * state.dx)
            }
        };
        let weight = match state.boundary {
            Boundary::DirichletFromWave(_) if i == 0 || i == n - 1 => 0.5,
            _ => 1.0,
        };
        total += weight * energy_density(phi[i], phi_t[i], phi_x, params.gamma());
    }
    total * state.dx
}
