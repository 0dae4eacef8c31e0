use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {re}{im:+}i lies within 1e-12 of a pole of the gamma function")]
    Pole { re: f64, im: f64 },

    #[error("argument outside the domain of {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("invalid contour geometry: {0}")]
    Geometry(String),

    #[error("log-scale exponent {exponent:.1} exceeds the representable range")]
    Overflow { exponent: f64 },

    #[error("operator I - A is numerically singular (pivot {pivot:e} at column {column})")]
    Singular { pivot: f64, column: usize },

    #[error("power iteration did not converge after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
