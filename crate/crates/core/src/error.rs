use thiserror::Error;

/// Errors surfaced by the analytic and Monte Carlo routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: `{param}` = {value}: {reason}")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The requested quantity is infinite (e.g. the Cauchy resolvent on the diagonal).
    #[error("divergence: {0}")]
    Divergence(&'static str),

    /// The peak matrix of the perturbed resolvent is singular; the energy sits on a pole.
    #[error("singular peak matrix (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    /// Permutation sums are capped to keep the n! cost tractable.
    #[error("correlation of {0} points exceeds the permutation limit of {limit}", limit = crate::localtime::MAX_CORRELATION_POINTS)]
    TooManyPoints(usize),

    /// A quadrature ran out of its evaluation budget before meeting its tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    NoConvergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    /// The caller-supplied evaluation budget was used up.
    #[error("evaluation budget of {limit} integrand calls exhausted")]
    BudgetExhausted { limit: usize },

    /// Inconsistent Monte Carlo or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(param: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        param,
        value,
        reason,
    }
}
