use thiserror::Error;

/// Errors produced by the analytic, simulation and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two inputs that must agree in length do not.
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    /// Adaptive quadrature hit its panel budget before reaching tolerance.
    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error:e} after {panels} panels"
    )]
    Quadrature {
        value: f64,
        error: f64,
        panels: usize,
    },

    /// The placement optimizer stopped without meeting its stopping rule;
    /// `best` is the last iterate.
    #[error("placement optimizer did not converge after {iterations} iterations (best objective {objective})")]
    NotConverged {
        iterations: usize,
        objective: f64,
        best: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
