//! Numerical residuals of the trigonometric identities behind the limits of
//! the subcritical families.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};

use crate::closed_form::{f_map, fixed_points_unchecked, theta};
use crate::error::Result;

/// Names of the checked identities, in report order.
pub const IDENTITY_NAMES: [&str; 6] = ["zaza", "zaza2", "F_plus", "F_minus", "pi8", "rationalize_sin4"];

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub gamma: f64,
    /// Absolute residual per identity name.
    pub residuals: BTreeMap<&'static str, f64>,
}

impl IdentityReport {
    /// Largest residual and its identity.
    pub fn worst(&self) -> (&'static str, f64) {
        self.residuals
            .iter()
            .map(|(k, v)| (*k, *v))
            .fold(("", 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc })
    }
}

/// Evaluates, for `theta = asin(gamma)/4`:
///
/// * `zaza`: `sqrt(1 + sqrt(1 - gamma^2)) = sqrt(2) cos(2 theta)`
/// * `zaza2`: `sqrt(1 - sqrt(1 - gamma^2)) = sqrt(2) sin(2 theta)`
/// * `F_plus`: `F(y_+) = tan(pi/4 - theta)`
/// * `F_minus`: `F(y_-) = tan(theta)`, recorded as 0 at `gamma = 0` where `y_-` diverges
/// * `pi8`: `sqrt(2) - 1 = tan(pi/8)`
/// * `rationalize_sin4`: `sin(4 theta) = 4 tan(theta)(1 - tan^2 theta)/(1 + tan^2 theta)^2`
pub fn identities_check(gamma: f64) -> Result<IdentityReport> {
    let th = theta(gamma)?;
    let root = (1.0 - gamma * gamma).sqrt();
    let (y_plus, y_minus) = fixed_points_unchecked(gamma);
    let t = th.tan();

    let mut residuals = BTreeMap::new();
    residuals.insert("zaza", ((1.0 + root).sqrt() - SQRT_2 * (2.0 * th).cos()).abs());
    residuals.insert("zaza2", ((1.0 - root).sqrt() - SQRT_2 * (2.0 * th).sin()).abs());
    residuals.insert("F_plus", (f_map(y_plus) - (FRAC_PI_4 - th).tan()).abs());
    let f_minus = if gamma == 0.0 { 0.0 } else { (f_map(y_minus) - t).abs() };
    residuals.insert("F_minus", f_minus);
    residuals.insert("pi8", ((SQRT_2 - 1.0) - FRAC_PI_8.tan()).abs());
    let rational = 4.0 * t * (1.0 - t * t) / (1.0 + t * t).powi(2);
    residuals.insert("rationalize_sin4", ((4.0 * th).sin() - rational).abs());
    Ok(IdentityReport { gamma, residuals })
}
