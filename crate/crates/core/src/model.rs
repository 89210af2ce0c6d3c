//! Parameters of the damped, driven sine-Gordon equation
//! `phi_tt - phi_xx + sin(phi) + alpha*phi_t + gamma = 0`, its regime
//! classification, constant solutions and energy density.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Damping `alpha > 0` and forcing `gamma >= 0`.
///
/// A negative forcing is normalized away by the symmetry `phi -> -phi`;
/// `flipped` records that the caller has to negate every field value
/// obtained from these parameters to recover the original problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    gamma: f64,
    flipped: bool,
}

impl ModelParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return domain(format!("alpha must be finite and > 0, got {alpha}"));
        }
        if !gamma.is_finite() {
            return domain(format!("gamma must be finite, got {gamma}"));
        }
        Ok(Self {
            alpha,
            gamma: gamma.abs(),
            flipped: gamma < 0.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn flipped(&self) -> bool {
        self.flipped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `gamma < 1`: two real fixed points of the Riccati equation.
    Subcritical,
    /// `gamma == 1` exactly: one double fixed point.
    Critical,
    /// `gamma > 1`: complex fixed points, kink arrays.
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub regime: Regime,
    /// `4/gamma^2 - 4`; `None` for `gamma == 0`.
    pub discriminant: Option<f64>,
}

/// Classifies by exact comparison of the normalized forcing with 1.
pub fn classify(params: &ModelParams) -> Classification {
    let gamma = params.gamma();
    let regime = if gamma < 1.0 {
        Regime::Subcritical
    } else if gamma == 1.0 {
        Regime::Critical
    } else {
        Regime::Supercritical
    };
    let discriminant = (gamma > 0.0).then(|| 4.0 / (gamma * gamma) - 4.0);
    Classification { regime, discriminant }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSolutions {
    /// `-asin(gamma)`, the hanging-down configuration.
    pub phi_s: f64,
    /// `asin(gamma) + pi`, the standing-up configuration.
    pub phi_u: f64,
    pub exists: bool,
}

/// Constant solutions; for `gamma > 1` none exist and both angles are NaN.
pub fn constant_solutions(params: &ModelParams) -> ConstantSolutions {
    let gamma = params.gamma();
    if gamma > 1.0 {
        return ConstantSolutions {
            phi_s: f64::NAN,
            phi_u: f64::NAN,
            exists: false,
        };
    }
    let s = gamma.asin();
    ConstantSolutions {
        phi_s: -s,
        phi_u: s + PI,
        exists: true,
    }
}

/// `h = phi_t^2/2 + phi_x^2/2 + gamma*phi - cos(phi)`.
pub fn energy_density(phi: f64, phi_t: f64, phi_x: f64, gamma: f64) -> f64 {
    0.5 * phi_t * phi_t + 0.5 * phi_x * phi_x + gamma * phi - phi.cos()
}

/// Reduces `phi` into `(center - pi, center + pi]`.
pub fn wrap_to(phi: f64, center: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = (phi - center).rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    center + r
}
