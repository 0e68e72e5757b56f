//! Error type shared by all solver components.

use std::fmt;

/// Errors surfaced by operators, solvers and model construction.
#[derive(Debug, Clone)]
pub enum Error {
    /// Vector/operator dimensions do not match.
    DimensionMismatch { expected: usize, got: usize, context: &'static str },
    /// A NaN or infinity was found where finite data is required.
    NonFinite { context: &'static str },
    /// A grid or wavespeed model violates its construction rules.
    InvalidModel(String),
    /// Bad configuration (grid dims, contour parameters, scheme parameters).
    InvalidConfig(String),
    /// The residual polynomial is degenerate (normalization value is zero).
    DegenerateScheme,
    /// No convergent polynomial scheme exists for the requested box/shift.
    NoConvergentScheme { best_nu: f64 },
    /// A fixed-point solve grew its residual over several consecutive sweeps.
    Divergence { context: String, factor: f64 },
    /// An outer iteration stopped making progress.
    Stagnation { its: usize, residual: f64, report: String },
    /// ILU(0) factorization hit an irrecoverable zero pivot.
    ZeroPivot { row: usize },
    /// File or stream problems while reading models or writing reports.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got, context } => {
                write!(f, "dimension mismatch in {context}: expected {expected}, got {got}")
            }
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::DegenerateScheme => write!(f, "degenerate scheme: residual polynomial vanishes at the shift"),
            Error::NoConvergentScheme { best_nu } => {
                write!(f, "no convergent scheme: best contraction factor {best_nu} >= 1")
            }
            Error::Divergence { context, factor } => {
                write!(f, "divergence in {context}: residual grew by factor {factor:.3e} over consecutive sweeps")
            }
            Error::Stagnation { its, residual, .. } => {
                write!(f, "stagnation after {its} iterations at relative residual {residual:.3e}")
            }
            Error::ZeroPivot { row } => write!(f, "zero pivot at row {row} during ILU(0) factorization"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
