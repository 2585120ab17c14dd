use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("parameter outside the model domain: {0}")]
    Domain(String),

    #[error("shape beta = {beta} is in the regular regime (beta >= 2); use Fisher information instead")]
    RegularRegime { beta: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("direction is not identifiable: squared Hellinger distance vanishes along the whole ladder")]
    NonIdentifiable,

    #[error("gradient vanishes; reparametrization requires a non-zero gradient")]
    ZeroGradient,

    #[error("direction must be a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded{}", context.as_deref().map(|c| format!(": {c}")).unwrap_or_default())]
    Unbounded { context: Option<String> },

    #[error("simplex exceeded {iterations} iterations without terminating")]
    IterationLimit { iterations: usize },

    #[error("all directions have negligible interest-parameter weight")]
    DegenerateInterest,

    #[error("{failed} of {total} replicates failed (limit 1%); first failure: {first}")]
    SimulationFailures {
        failed: usize,
        total: usize,
        first: String,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
