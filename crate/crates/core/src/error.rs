use num_complex::Complex64;

use crate::dsl::DslError;
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain violation: point fails '{0}'")]
    Domain(String),
    #[error("L is not real-positive at the base point: {0}")]
    NonReal(Complex64),
    #[error("degenerate metric: {0}")]
    Degenerate(String),
    #[error("metric tensor is not positive definite: {0}")]
    Indefinite(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error("unknown built-in metric '{0}'")]
    UnknownMetric(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("sampling: {0}")]
    Sampling(String),
}

/// Broad failure classes; the CLI maps them to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Domain,
    Parse,
    Budget,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Dsl(_) | Error::UnknownMetric(_) | Error::BadParam(_) => ErrorClass::Parse,
            Error::Jet(JetError::OrderBudget { .. }) | Error::Jet(JetError::InvalidOrder(_)) => {
                ErrorClass::Budget
            }
            _ => ErrorClass::Domain,
        }
    }

    /// Attaches a quantity name to an order-budget failure.
    pub fn named(self, quantity: &str) -> Error {
        match self {
            Error::Jet(e) => Error::Jet(e.named(quantity)),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
