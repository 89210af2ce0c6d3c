//! Closed-form unit-velocity travelling waves.
//!
//! With `xi = chirality*x - t` and `phi = g(xi) - pi`, the field equation
//! reduces to `alpha*g' = gamma - sin(g)`. Writing `g = 4*atan(F)` and
//! `F = y + sqrt(1 + y^2)` turns that into the Riccati equation
//! `2*alpha*y' = 2*y + gamma*(1 + y^2)`, which is solved explicitly for each
//! regime. `y` has poles where `g` crosses a multiple of `2*pi`; `g` itself is
//! smooth there and is reconstructed continuously by counting the poles
//! crossed, whose locations are known analytically.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::model::{classify, constant_solutions, ModelParams, Regime};

const TWO_PI: f64 = 2.0 * PI;

/// Relative half-width of the neighbourhood around a pole of `y` where `g`
/// is replaced by its limit value.
const POLE_WINDOW: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveBranch {
    ConstantS,
    ConstantU,
    /// `y1` family, `0 < gamma < 1`; `g` strictly decreasing.
    Decreasing1,
    /// `y2` family, `0 < gamma < 1`; `g` strictly increasing, one pole at `xi0`.
    Increasing2,
    /// `gamma == 1`; one pole at `xi0`.
    CriticalKink,
    /// `gamma > 1`; poles at `xi0 + period*(k + 1/2)`.
    KinkArray,
    /// `gamma == 0`: `g = 2*atan(exp((xi0 - xi)/alpha))`.
    PureSgDecreasing,
    /// `gamma == 0`: `g = 2*pi - 2*atan(exp((xi0 - xi)/alpha))`.
    PureSgIncreasing,
}

impl WaveBranch {
    pub const ALL: [WaveBranch; 8] = [
        WaveBranch::ConstantS,
        WaveBranch::ConstantU,
        WaveBranch::Decreasing1,
        WaveBranch::Increasing2,
        WaveBranch::CriticalKink,
        WaveBranch::KinkArray,
        WaveBranch::PureSgDecreasing,
        WaveBranch::PureSgIncreasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaveBranch::ConstantS => "constant_s",
            WaveBranch::ConstantU => "constant_u",
            WaveBranch::Decreasing1 => "decreasing1",
            WaveBranch::Increasing2 => "increasing2",
            WaveBranch::CriticalKink => "critical_kink",
            WaveBranch::KinkArray => "kink_array",
            WaveBranch::PureSgDecreasing => "pure_sg_decreasing",
            WaveBranch::PureSgIncreasing => "pure_sg_increasing",
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(self, WaveBranch::ConstantS | WaveBranch::ConstantU)
    }

    /// Human-readable statement of the forcing range the branch requires.
    pub fn requirement(self) -> &'static str {
        match self {
            WaveBranch::ConstantS | WaveBranch::ConstantU => "gamma <= 1",
            WaveBranch::Decreasing1 | WaveBranch::Increasing2 => "0 < gamma < 1",
            WaveBranch::CriticalKink => "gamma == 1",
            WaveBranch::KinkArray => "gamma > 1",
            WaveBranch::PureSgDecreasing | WaveBranch::PureSgIncreasing => "gamma == 0",
        }
    }

    pub fn is_compatible(self, gamma: f64) -> bool {
        match self {
            WaveBranch::ConstantS | WaveBranch::ConstantU => gamma <= 1.0,
            WaveBranch::Decreasing1 | WaveBranch::Increasing2 => gamma > 0.0 && gamma < 1.0,
            WaveBranch::CriticalKink => gamma == 1.0,
            WaveBranch::KinkArray => gamma > 1.0,
            WaveBranch::PureSgDecreasing | WaveBranch::PureSgIncreasing => gamma == 0.0,
        }
    }

    /// Branches that exist for the given forcing.
    pub fn available(gamma: f64) -> Vec<WaveBranch> {
        Self::ALL
            .into_iter()
            .filter(|b| b.is_compatible(gamma))
            .collect()
    }
}

impl fmt::Display for WaveBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WaveBranch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|b| b.name()).collect();
                Error::Domain(format!("unknown branch '{s}', expected one of {}", names.join(", ")))
            })
    }
}

/// Sign in `xi = chirality*x - t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    /// `xi = x - t`, right-moving.
    Plus,
    /// `xi = -x - t`, left-moving.
    Minus,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Chirality::Plus),
            -1 => Ok(Chirality::Minus),
            other => domain(format!("chirality must be +1 or -1, got {other}")),
        }
    }
}

/// One travelling-wave solution `phi(x, t) = g(chirality*x - t) - pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravellingWave {
    params: ModelParams,
    branch: WaveBranch,
    xi0: f64,
    chirality: Chirality,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoints {
    pub y_plus: f64,
    pub y_minus: f64,
    pub real_valued: bool,
}

/// Real roots `y_+- = -1/gamma +- sqrt(1/gamma^2 - 1)` of `gamma*(1 + y^2) + 2*y = 0`.
///
/// For `gamma > 1` the roots are complex; `real_valued` is false and both
/// fields are NaN.
pub fn y_fixed_points(params: &ModelParams) -> Result<FixedPoints> {
    let gamma = params.gamma();
    if gamma == 0.0 {
        return domain("fixed points of the Riccati equation need gamma > 0 (y_- diverges at gamma = 0)");
    }
    if gamma > 1.0 {
        return Ok(FixedPoints {
            y_plus: f64::NAN,
            y_minus: f64::NAN,
            real_valued: false,
        });
    }
    let (y_plus, y_minus) = fixed_points_unchecked(gamma);
    Ok(FixedPoints {
        y_plus,
        y_minus,
        real_valued: true,
    })
}

/// `(y_+, y_-)` for `0 <= gamma <= 1`, with `y_+` taken from the root
/// product `y_+ * y_- = 1` to avoid cancellation at small `gamma`.
pub(crate) fn fixed_points_unchecked(gamma: f64) -> (f64, f64) {
    let root = (1.0 - gamma * gamma).sqrt();
    (-gamma / (1.0 + root), -(1.0 + root) / gamma)
}

/// `F(y) = y + sqrt(1 + y^2)`, evaluated as `1/(sqrt(1 + y^2) - y)` for
/// negative `y`. Accepts infinities: `F(-inf) = 0`, `F(inf) = inf`.
pub fn f_map(y: f64) -> f64 {
    if y >= 0.0 {
        y + 1f64.hypot(y)
    } else {
        1.0 / (1f64.hypot(y) - y)
    }
}

/// `2*y/(1 + y^2)`, finite for every extended-real `y`.
fn two_y_over_one_plus_y2(y: f64) -> f64 {
    if y.is_infinite() {
        0.0
    } else if y.abs() > 1.0 {
        2.0 / (y + 1.0 / y)
    } else {
        2.0 * y / (1.0 + y * y)
    }
}

/// Period `2*pi*alpha/sqrt(gamma^2 - 1)` of `y` for `gamma > 1`.
pub fn xi_period(params: &ModelParams) -> Result<f64> {
    let gamma = params.gamma();
    if gamma <= 1.0 {
        return domain(format!("the kink-array period needs gamma > 1, got gamma = {gamma}"));
    }
    Ok(TWO_PI * params.alpha() / (gamma * gamma - 1.0).sqrt())
}

/// `theta = asin(gamma)/4`, in `[0, pi/8]`.
pub fn theta(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return domain(format!("theta needs 0 <= gamma <= 1, got {gamma}"));
    }
    Ok(0.25 * gamma.asin())
}

impl TravellingWave {
    pub fn new(
        params: ModelParams,
        branch: WaveBranch,
        xi0: f64,
        chirality: Chirality,
    ) -> Result<Self> {
        if !branch.is_compatible(params.gamma()) {
            return domain(format!(
                "branch {branch} requires {}, got gamma = {}",
                branch.requirement(),
                params.gamma()
            ));
        }
        if !xi0.is_finite() {
            return domain(format!("xi0 must be finite, got {xi0}"));
        }
        Ok(Self {
            params,
            branch,
            xi0,
            chirality,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn branch(&self) -> WaveBranch {
        self.branch
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    /// Same wave with a different phase.
    pub fn with_xi0(&self, xi0: f64) -> Self {
        Self { xi0, ..*self }
    }

    pub fn with_chirality(&self, chirality: Chirality) -> Self {
        Self { chirality, ..*self }
    }

    pub fn xi(&self, x: f64, t: f64) -> f64 {
        self.chirality.sign() * x - t
    }

    /// Decay rate `sqrt(1 - gamma^2)/alpha` of the subcritical families.
    fn rate(&self) -> f64 {
        let gamma = self.params.gamma();
        (1.0 - gamma * gamma).sqrt() / self.params.alpha()
    }

    /// Spatial scale used to size the pole neighbourhood.
    fn pole_scale(&self) -> f64 {
        match self.branch {
            WaveBranch::Increasing2 => (1.0 / self.rate()).max(1.0),
            WaveBranch::KinkArray => self.period().max(1.0),
            _ => 1.0,
        }
    }

    fn period(&self) -> f64 {
        let gamma = self.params.gamma();
        TWO_PI * self.params.alpha() / (gamma * gamma - 1.0).sqrt()
    }

    /// Splits `xi - xi0` into a cell index `k` and a fractional phase
    /// `r` in `[-1/2, 1/2)`, poles sitting at `r = -1/2`.
    fn kink_cell(&self, xi: f64) -> (f64, f64) {
        let u = (xi - self.xi0) / self.period();
        let k = (u + 0.5).floor();
        (k, u - k)
    }

    /// Poles of `y` in the closed interval `[lo, hi]`.
    pub fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self.branch {
            WaveBranch::Increasing2 | WaveBranch::CriticalKink => {
                if (lo..=hi).contains(&self.xi0) {
                    vec![self.xi0]
                } else {
                    Vec::new()
                }
            }
            WaveBranch::KinkArray => {
                let p = self.period();
                let first = ((lo - self.xi0) / p - 0.5).ceil() as i64;
                let last = ((hi - self.xi0) / p - 0.5).floor() as i64;
                (first..=last)
                    .map(|k| self.xi0 + p * (k as f64 + 0.5))
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Distance from `xi` to the nearest pole of `y`, `None` for pole-free branches.
    pub fn pole_distance(&self, xi: f64) -> Option<f64> {
        match self.branch {
            WaveBranch::Increasing2 | WaveBranch::CriticalKink => Some((xi - self.xi0).abs()),
            WaveBranch::KinkArray => {
                let (_, r) = self.kink_cell(xi);
                Some((0.5 - r.abs()) * self.period())
            }
            _ => None,
        }
    }

    /// Riccati variable `y(xi)`; signed infinity at a pole.
    ///
    /// Constant branches return the matching fixed point (`y_+` for
    /// `ConstantS`, `y_-` for `ConstantU`).
    pub fn y(&self, xi: f64) -> f64 {
        let gamma = self.params.gamma();
        let alpha = self.params.alpha();
        let s = xi - self.xi0;
        match self.branch {
            WaveBranch::ConstantS | WaveBranch::ConstantU => {
                let (y_plus, y_minus) = fixed_points_unchecked(gamma);
                if self.branch == WaveBranch::ConstantS {
                    y_plus
                } else {
                    y_minus
                }
            }
            WaveBranch::Decreasing1 => {
                let (y_plus, y_minus) = fixed_points_unchecked(gamma);
                let z = self.rate() * s;
                if z <= 0.0 {
                    let e = z.exp();
                    (y_plus + y_minus * e) / (1.0 + e)
                } else {
                    let e = (-z).exp();
                    (y_plus * e + y_minus) / (e + 1.0)
                }
            }
            WaveBranch::Increasing2 => {
                let (y_plus, y_minus) = fixed_points_unchecked(gamma);
                let z = self.rate() * s;
                if z == 0.0 {
                    f64::INFINITY
                } else if z < 0.0 {
                    (y_plus - y_minus * z.exp()) / -z.exp_m1()
                } else {
                    let e = (-z).exp();
                    (y_plus * e - y_minus) / (-z).exp_m1()
                }
            }
            WaveBranch::CriticalKink => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    -(1.0 + 2.0 * alpha / s)
                }
            }
            WaveBranch::KinkArray => {
                let (_, r) = self.kink_cell(xi);
                if r == -0.5 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / gamma + (1.0 - 1.0 / (gamma * gamma)).sqrt() * (PI * r).tan()
                }
            }
            WaveBranch::PureSgDecreasing => -(s / alpha).exp(),
            WaveBranch::PureSgIncreasing => (s / alpha).exp(),
        }
    }

    /// Continuous, unwrapped `g(xi)`.
    pub fn g(&self, xi: f64) -> f64 {
        let alpha = self.params.alpha();
        let s = xi - self.xi0;
        match self.branch {
            WaveBranch::ConstantS | WaveBranch::ConstantU => self.constant_phi() + PI,
            WaveBranch::PureSgDecreasing => 2.0 * (-s / alpha).exp().atan(),
            WaveBranch::PureSgIncreasing => TWO_PI - 2.0 * (-s / alpha).exp().atan(),
            WaveBranch::Decreasing1 => 4.0 * f_map(self.y(xi)).atan(),
            WaveBranch::Increasing2 | WaveBranch::CriticalKink => {
                if s.abs() < POLE_WINDOW * self.pole_scale() {
                    return TWO_PI;
                }
                let base = 4.0 * f_map(self.y(xi)).atan();
                if s > 0.0 {
                    base + TWO_PI
                } else {
                    base
                }
            }
            WaveBranch::KinkArray => {
                let (k, r) = self.kink_cell(xi);
                let offset = TWO_PI * k;
                let window = POLE_WINDOW * self.pole_scale() / self.period();
                if r + 0.5 < window {
                    offset
                } else if 0.5 - r < window {
                    offset + TWO_PI
                } else {
                    offset + 4.0 * f_map(self.y(xi)).atan()
                }
            }
        }
    }

    /// `g'(xi)` by the chain rule through `y`: `dg/dy = 2/(1 + y^2)`
    /// combined with the Riccati right-hand side.
    pub fn g_prime(&self, xi: f64) -> f64 {
        if self.branch.is_constant() {
            return 0.0;
        }
        let y = self.y(xi);
        (self.params.gamma() + two_y_over_one_plus_y2(y)) / self.params.alpha()
    }

    fn constant_phi(&self) -> f64 {
        let c = constant_solutions(&self.params);
        if self.branch == WaveBranch::ConstantS {
            c.phi_s
        } else {
            c.phi_u
        }
    }

    /// `phi(x, t) = g(chirality*x - t) - pi`.
    pub fn phi(&self, x: f64, t: f64) -> f64 {
        if self.branch.is_constant() {
            return self.constant_phi();
        }
        self.g(self.xi(x, t)) - PI
    }

    /// Limits of `g` as `xi -> -inf` and `xi -> +inf`.
    pub fn g_limits(&self) -> Result<(f64, f64)> {
        let gamma = self.params.gamma();
        let s = gamma.min(1.0).asin();
        match self.branch {
            WaveBranch::Decreasing1 => Ok((PI - s, s)),
            WaveBranch::Increasing2 => Ok((PI - s, TWO_PI + s)),
            WaveBranch::CriticalKink => Ok((PI / 2.0, 5.0 * PI / 2.0)),
            WaveBranch::PureSgDecreasing => Ok((PI, 0.0)),
            WaveBranch::PureSgIncreasing => Ok((PI, TWO_PI)),
            WaveBranch::KinkArray => domain("kink arrays are unbounded in g, no limits exist for gamma > 1"),
            WaveBranch::ConstantS | WaveBranch::ConstantU => {
                domain("limits are defined for non-constant branches only")
            }
        }
    }

    /// Limits of `phi` as `x -> -inf` and `x -> +inf` at fixed `t`.
    pub fn phi_limits(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self.g_limits()?;
        Ok(match self.chirality {
            Chirality::Plus => (lo - PI, hi - PI),
            Chirality::Minus => (hi - PI, lo - PI),
        })
    }
}

/// Free-function form of [`TravellingWave::y`].
pub fn y_eval(wave: &TravellingWave, xi: f64) -> f64 {
    wave.y(xi)
}

pub fn g_eval(wave: &TravellingWave, xi: f64) -> f64 {
    wave.g(xi)
}

pub fn phi_eval(wave: &TravellingWave, x: f64, t: f64) -> f64 {
    wave.phi(x, t)
}

pub fn g_limits(wave: &TravellingWave) -> Result<(f64, f64)> {
    wave.g_limits()
}

/// Every non-constant branch admissible for `params`.
pub fn nonconstant_branches(params: &ModelParams) -> Vec<WaveBranch> {
    let gamma = params.gamma();
    let mut out = WaveBranch::available(gamma);
    out.retain(|b| !b.is_constant());
    debug_assert!(match classify(params).regime {
        Regime::Subcritical => gamma == 0.0 || out.len() == 2,
        Regime::Critical | Regime::Supercritical => out.len() == 1,
    });
    out
}
