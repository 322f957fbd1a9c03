use thiserror::Error;

/// Which iterative phase ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Agm,
    RootFinding,
    Series,
    Quadrature,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Agm => "agm iteration",
            Phase::RootFinding => "root finding",
            Phase::Series => "series summation",
            Phase::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operand `{name}` must be positive and finite, got {value}")]
    NonPositiveInput { name: &'static str, value: f64 },

    #[error("{phase} did not converge within {limit} steps")]
    MaxIterationsExceeded { phase: Phase, limit: usize },

    #[error("outside the supported numerical range: {0}")]
    DomainOverflow(String),

    #[error("root bracket [{lo}, {hi}] does not enclose a sign change")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("adaptive quadrature did not reach tolerance after {subdivisions} subdivisions")]
    QuadratureNotConverged { subdivisions: usize },

    #[error("hypergeometric backend requires 0 < y <= x < 1, got x = {x}, y = {y}")]
    HypergeomDomain { x: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

impl Error {
    /// True for errors caused by the operands rather than by the numerics.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveInput { .. } | Error::DomainOverflow(_) | Error::HypergeomDomain { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
