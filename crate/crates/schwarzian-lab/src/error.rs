//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("input error: {0}")]
    Input(String),

    /// The input is degenerate for the requested operation (e.g. a locally
    /// constant map fed to the Schwarzian derivative).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Reciprocal of the zero series.
    #[error("division by the zero series")]
    ZeroDivision,

    /// Binary series operation on series with different centers.
    #[error("series centers differ: {left} vs {right}")]
    CenterMismatch { left: Complex64, right: Complex64 },

    /// A coefficient sits on an exponent that no cyclic-cover datum can
    /// produce; carries the first offending exponent.
    #[error("exponent {exponent} is not admissible for a {k}-fold cover")]
    ExponentLattice { exponent: i64, k: u32 },

    /// A numerical procedure broke down; `location` is where it happened.
    #[error("numerical failure at z = {location}: {message}")]
    Numerical { location: Complex64, message: String },

    /// Trace lands in the parabolic tolerance band but the matrix is far
    /// from parabolic normal form.
    #[error("ambiguous classification: {0}")]
    AmbiguousClass(String),

    /// The supplied translation constant does not match the observed jump
    /// of the developing map, so the logarithm subtraction would not be
    /// single-valued.
    #[error("translation constant inconsistent with the loop jump: residual {residual:.3e}")]
    InconsistentTranslation { residual: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error("invalid problem spec: {0}")]
    Spec(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn numerical(location: Complex64, msg: impl Into<String>) -> Self {
        Error::Numerical {
            location,
            message: msg.into(),
        }
    }

    pub fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }
}
