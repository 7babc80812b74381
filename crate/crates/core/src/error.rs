use thiserror::Error;

/// Failure modes of the numerical pipeline. Numbers are reported as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: estimate ({re}, {im}) with error bound {error_bound:e}")]
    NonConvergence { re: f64, im: f64, error_bound: f64 },

    #[error("ODE step size underflow at t = {t}, x = {x} (step {step:e}); likely a node of rho near the path")]
    StiffnessFailure { t: f64, x: f64, step: f64 },

    #[error("wavefunction reached the grid edge: |psi| = {amplitude:e} at step {step}")]
    BoundaryContamination { step: usize, amplitude: f64 },

    #[error("density {rho:e} at x = {x}, t = {t} is below the velocity floor")]
    NodeProximity { x: f64, t: f64, rho: f64 },

    #[error("arrival horizon t_max = {t_max} too small: truncated mass bound {tail_bound:e}")]
    TruncationTooTight { t_max: f64, tail_bound: f64 },

    #[error("trajectory at quantile {quantile}: {source}")]
    Trajectory {
        quantile: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
