use thiserror::Error;

use crate::solver::InfeasibilityDiagnosis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input lies outside the domain where a formula or operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The regression design matrix does not have full column rank.
    #[error("singular fit: column `{column}` is linearly dependent on the other columns")]
    SingularFit { column: &'static str },

    #[error("infeasible model: {0}")]
    Infeasible(InfeasibilityDiagnosis),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
