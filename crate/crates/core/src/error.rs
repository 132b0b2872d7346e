use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    Convergence {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("integral diverges on the semi-infinite tail (last estimate {estimate:e})")]
    Divergence { estimate: f64 },

    #[error("integrand is not finite at x = {at:e}")]
    NonFinite { at: f64 },

    #[error("non-integrable singularity at x = {at:e}: principal value does not exist")]
    NonIntegrableSingularity { at: f64 },

    #[error("pole at q = {at:e} did not cancel in the combined integrand (residual {residual:e})")]
    SingularityCancellation { at: f64, residual: f64 },

    #[error("dissipation xi must be positive at resonant frequency nu = {nu:e}")]
    RegularizationRequired { nu: f64 },

    #[error("spectrum is a distribution ({0}); use a rate-level API instead of a pointwise value")]
    DistributionalSpectrum(&'static str),

    #[error("small-amplitude expansion is not valid: {0}")]
    ExpansionInvalid(String),

    #[error("value out of floating-point range: {0}")]
    Range(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Quadrature failures (as opposed to bad input).
    pub fn is_quadrature_failure(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Divergence { .. }
                | Error::NonFinite { .. }
                | Error::NonIntegrableSingularity { .. }
                | Error::SingularityCancellation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
