//! Unit-velocity travelling waves of the damped, driven sine-Gordon equation
//!
//! ```text
//! phi_tt - phi_xx + sin(phi) + alpha*phi_t + gamma = 0
//! ```
//!
//! evaluated in closed form ([`closed_form`]), cross-checked by independent
//! numerics ([`oracles`]) and propagated with a finite-difference solver
//! ([`pde_sim`]).

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod format;
pub mod model;
pub mod oracles;
pub mod pde_sim;

pub use closed_form::{f_map, theta, xi_period, y_fixed_points, Chirality, FixedPoints, TravellingWave, WaveBranch};
pub use error::{Error, Result};
pub use model::{classify, constant_solutions, energy_density, wrap_to, Classification, ConstantSolutions, ModelParams, Regime};
pub use pde_sim::{
    comoving_deviation, evolve, init_from_wave, step, total_energy, Boundary, DeviationReport, FieldState, Perturbation,
    SimConfig, SimDomain,
};
