use thiserror::Error;

/// Errors raised by the plate, scattering, Green's function and quadrature layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kappa must be positive, got {0}")]
    NonPositiveKappa(f64),

    #[error("invalid spectral point: {0}")]
    InvalidSpectralPoint(String),

    #[error("invalid plate: {0}")]
    InvalidPlate(String),

    #[error("invalid stack: {0}")]
    InvalidStack(String),

    #[error("plate index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("plates {i} and {k} are not separated by at least one plate")]
    NotNonAdjacent { i: usize, k: usize },

    #[error("need at least {min} plates, got {got}")]
    TooSmall { min: usize, got: usize },

    #[error("energy needs at least two plates, got {0}")]
    TooFewPlates(usize),

    #[error("cavity factor {0} is not positive")]
    DegenerateCavity(f64),

    #[error("region matrices are only available for 1 to 3 plates, got {0}")]
    UnsupportedN(usize),

    #[error("evaluation point {0} lies on a plate plane")]
    OnPlatePlane(f64),

    #[error("finite-difference stencil around z = {0} crosses a plate or the source")]
    StraddlesPlateOrSource(f64),

    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("stress-tensor formula needs plates whose coefficients depend on kappa only")]
    RequiresKappaOnly,

    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),

    #[error("invalid quadrature settings: {0}")]
    InvalidQuadratureSpec(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
