use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A configuration value violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A function sample was not finite.
    #[error("evaluation error in {op}: {detail}")]
    Evaluation { op: &'static str, detail: String },

    /// The ODE integrator could not make progress.
    #[error("integration failed at eta = {eta}: {detail}")]
    Integration { eta: f64, detail: String },

    /// A root finder or fixed-point solver failed.
    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn evaluation(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Evaluation { op, detail: detail.into() }
    }

    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Config(_))
    }
}
