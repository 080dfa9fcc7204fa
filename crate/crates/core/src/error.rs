use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// An iterative or adaptive procedure ran out of budget before reaching
    /// the requested accuracy.
    #[error("{op} did not converge: {detail}")]
    Convergence { op: &'static str, detail: String },

    /// The outage probability does not depend on the searched quantity.
    #[error("unbounded: {0}")]
    Unbounded(String),

    /// The target cannot be met anywhere in the search bracket.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn convergence(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            op,
            detail: detail.into(),
        }
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}
