use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative procedure failed to converge.
    #[error("did not converge: {0}")]
    NoConvergence(String),
    /// The M/G/1 system is unstable (ρ ≥ 1).
    #[error("unstable system: rho = {rho} >= 1")]
    Unstable { rho: f64 },
    /// Root location for ξ failed.
    #[error("xi not located: {0}")]
    XiNotLocated(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
