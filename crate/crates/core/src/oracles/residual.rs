//! Finite-difference residuals of the reduced ODE and of the field equation.

use crate::closed_form::TravellingWave;
use crate::error::{domain, Error, Result};

/// Fourth-order central first derivative.
pub fn central_first<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
}

/// Fourth-order central second derivative.
pub fn central_second<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    // written in differences from f(x) so constants cancel exactly
    let f0 = f(x);
    let near = (f(x + h) - f0) + (f(x - h) - f0);
    let far = (f(x + 2.0 * h) - f0) + (f(x - 2.0 * h) - f0);
    (16.0 * near - far) / (12.0 * h * h)
}

fn check_pole_distance(wave: &TravellingWave, xi: f64, required: f64) -> Result<()> {
    match wave.pole_distance(xi) {
        Some(distance) if distance <= required => Err(Error::PoleProximity { xi, distance, required }),
        _ => Ok(()),
    }
}

/// `alpha*g'(xi) - gamma + sin(g(xi))` with `g'` from a 5-point stencil.
pub fn reduced_ode_residual(wave: &TravellingWave, xi: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return domain(format!("stencil step must be > 0, got {h}"));
    }
    check_pole_distance(wave, xi, 2.0 * h)?;
    let params = wave.params();
    let dg = central_first(|s| wave.g(s), xi, h);
    Ok(params.alpha() * dg - params.gamma() + wave.g(xi).sin())
}

/// `phi_tt - phi_xx + sin(phi) + alpha*phi_t + gamma` at `(x, t)`, all
/// derivatives by 5-point central differences of step `h`.
///
/// The stencil must stay more than `10 h` away from any pole of `y`.
pub fn pde_residual(wave: &TravellingWave, x: f64, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return domain(format!("stencil step must be > 0, got {h}"));
    }
    check_pole_distance(wave, wave.xi(x, t), 10.0 * h)?;
    let params = wave.params();
    let phi_tt = central_second(|s| wave.phi(x, s), t, h);
    let phi_xx = central_second(|s| wave.phi(s, t), x, h);
    let phi_t = central_first(|s| wave.phi(x, s), t, h);
    let phi = wave.phi(x, t);
    Ok(phi_tt - phi_xx + phi.sin() + params.alpha() * phi_t + params.gamma())
}
