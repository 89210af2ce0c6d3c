//! Independent numerical cross-checks of the closed-form waves.

mod identities;
mod ode;
mod quadrature;
mod residual;

pub use identities::{identities_check, IdentityReport, IDENTITY_NAMES};
pub use ode::{ode_solve_g, ode_solve_y, OdeSolution, BLOW_UP, DEFAULT_ODE_TOL, MAX_HALVINGS};
pub use quadrature::{implicit_xi_of_g, integrate, quad_period, QuadResult, DEFAULT_QUAD_TOL, MAX_EVALUATIONS};
pub use residual::{central_first, central_second, pde_residual, reduced_ode_residual};
