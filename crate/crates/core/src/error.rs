use thiserror::Error;

/// Errors raised by the evaluation, oracle and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or branch lies outside the domain where the requested
    /// quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} refinements: {what}")]
    NoConvergence { what: String, iterations: usize },

    #[error("evaluation point xi={xi} lies within {distance:e} of a pole of y (need > {required:e})")]
    PoleProximity { xi: f64, distance: f64, required: f64 },

    #[error("field blew up at t={t} (|phi| = {magnitude:e})")]
    BlowUp { t: f64, magnitude: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
