use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("decay rate lambda = {lambda:e} is too close to zero for a gauge expansion")]
    GaugeDegenerate { lambda: f64 },

    #[error("coefficient of order {order} is zero (nearest nonzero order: {nearest_nonzero:?})")]
    ZeroCoefficient {
        order: usize,
        nearest_nonzero: Option<usize>,
    },

    #[error("series has {len} coefficients, order {order} requested")]
    OrderOutOfRange { order: usize, len: usize },

    #[error("numerical overflow in {0}")]
    Overflow(&'static str),

    #[error("series coefficients overflow at order {order}")]
    SeriesOverflow { order: usize },

    #[error("polynomial is degenerate (all coefficients vanish)")]
    DegeneratePolynomial,

    #[error("root finder `{method}` did not converge")]
    RootFinderFailed { method: &'static str },

    #[error("no real root of the truncated boundary polynomial meets tolerance {tol:e}")]
    NoRealRoot { tol: f64 },

    #[error("ambiguous root selection: real roots {roots:?} lie within 20% of each other")]
    AmbiguousRoot { roots: Vec<f64> },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    /// Validation problems the caller can fix by changing inputs, as opposed
    /// to a numerical procedure that failed on valid inputs.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Domain { .. }
                | Error::OrderOutOfRange { .. }
                | Error::UnknownStrategy { .. }
                | Error::GaugeDegenerate { .. }
        )
    }
}
