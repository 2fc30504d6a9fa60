use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside an operation's domain (e.g. `s > t`).
    #[error("domain error: {0}")]
    Domain(String),

    /// An integral or series does not converge for the given parameters.
    #[error("divergence: {0}")]
    Divergence(String),

    /// A Floquet shift makes a harmonic prefactor (numerically) singular.
    #[error("degenerate Floquet shift: {0}")]
    DegenerateShift(String),

    /// The operation supports only a restricted kernel class.
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A complexity guard rejected the problem size.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    /// A numerical procedure failed to converge or produced non-finite data.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
