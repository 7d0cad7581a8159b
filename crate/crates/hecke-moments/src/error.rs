use thiserror::Error;

/// Unified error type.
///
/// Variants are grouped by how the command-line driver maps them to exit
/// codes: configuration problems (invalid arguments, malformed input files,
/// failed validation gates) exit with code 2; infeasible-parameter errors
/// (precision policy, evaluation regime, unattainable tolerance, certified
/// arithmetic breakdown) exit with code 3; plain I/O problems with code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on arguments was violated (empty range, zero modulus,
    /// non-increasing tuple, odd weight, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested computation is outside the certified evaluation regime
    /// (e.g. a Bessel argument no available method can certify).
    #[error("evaluation regime violation: {0}")]
    Regime(String),

    /// The requested tolerance cannot be met within the configured budget
    /// (e.g. the Kloosterman tail bound stays above tolerance for every
    /// affordable cutoff).
    #[error("tolerance unattainable: {0}")]
    Tolerance(String),

    /// The q-expansion precision policy would be violated.
    #[error("insufficient q-expansion precision: {0}")]
    Precision(String),

    /// A validation gate failed (held-out residual too large, imported data
    /// disagreeing with internal recomputation, cache integrity mismatch).
    #[error("validation failed: {0}")]
    Validation(String),

    /// Division by an interval containing zero, sqrt of a possibly negative
    /// ball, or a similar certified-arithmetic failure.
    #[error("certified arithmetic: {0}")]
    Ball(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Process exit code for the CLI driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Validation(_) | Error::Format(_) => 2,
            Error::Regime(_) | Error::Tolerance(_) | Error::Precision(_) | Error::Ball(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
