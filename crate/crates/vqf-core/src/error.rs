use thiserror::Error;

/// Errors produced by the analysis kernel.
///
/// Absence of a certificate or of a preimage is a normal outcome and is
/// never reported through this type; these variants cover malformed input
/// and genuine numerical breakdown only.
#[derive(Debug, Clone, Error)]
pub enum VqfError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix entry ({row},{col}) = {upper} differs from ({col},{row}) = {lower}; input must be exactly symmetric")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The coefficient matrices are linearly dependent; the reported
    /// combination annihilates the form.
    #[error("gram matrix is singular; dependent combination {null_combination:?}")]
    SingularGram { null_combination: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, VqfError>;
