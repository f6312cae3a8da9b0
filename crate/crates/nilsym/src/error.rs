//! Error type shared by the whole crate.

/// Crate-wide error type.
///
/// The variants map onto the analysis exit codes: invalid input (2),
/// numerical ambiguity or decomposition failure (3), and internal
/// consistency / theorem-verification failures (4).
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Malformed or mathematically invalid input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// A rank decision fell inside the ambiguity band around the threshold.
    #[error("numerically ambiguous: {0}")]
    Ambiguous(String),

    /// The randomized irreducible decomposition exhausted its retry budget.
    #[error("irreducible decomposition failed: {0}")]
    Decomposition(String),

    /// An internal structural cross-check failed (isotropy dimension,
    /// derivative-convention check, central-action proportionality).
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    /// The symmetry-theorem verification failed.
    #[error("theorem verification failed: {0}")]
    Theorem(String),
}

impl Error {
    /// Process exit code associated with this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Ambiguous(_) | Error::Decomposition(_) => 3,
            Error::Inconsistency(_) | Error::Theorem(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
