//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum CoreError {
    /// Incompatible dimensions for the requested operation.
    DimMismatch { expected: usize, got: usize, what: &'static str },
    /// A dimension product would overflow the configured budget.
    SizeOverflow { what: &'static str },
    /// An argument claimed to be an orthogonal projection is not one.
    NotAProjection { residual: f64 },
    /// Two independent algorithms for the same quantity disagree.
    AlgorithmMismatch { what: &'static str, residual: f64 },
    /// The braid relation fails for T, so T_sigma is not well-defined.
    YbeViolated { residual: f64 },
    /// A user-facing specification violates a structural invariant.
    InvalidSpec(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DimMismatch { expected, got, what } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, got {got}")
            }
            CoreError::SizeOverflow { what } => write!(f, "dimension budget exceeded in {what}"),
            CoreError::NotAProjection { residual } => {
                write!(f, "input is not an orthogonal projection (residual {residual:.3e})")
            }
            CoreError::AlgorithmMismatch { what, residual } => {
                write!(f, "independent algorithms disagree for {what} (residual {residual:.3e})")
            }
            CoreError::YbeViolated { residual } => {
                write!(f, "braid relation violated (residual {residual:.3e}); refusing T_sigma")
            }
            CoreError::InvalidSpec(msg) => write!(f, "invalid spec: {msg}"),
        }
    }
}
