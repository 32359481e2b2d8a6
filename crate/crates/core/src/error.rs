use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("truncation order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("insufficient truncation order: need {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("inner series of a composition must have zero constant term")]
    NonzeroConstantTerm,
    #[error("series with zero constant term has no reciprocal")]
    SingularSeries,
    #[error("series is not of the form z + O(z^2)")]
    NotNormalized,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("contour integrand is ill-conditioned (min |f(w)-f(z)| = {min_distance:e}); reduce the evaluation radius")]
    IllConditionedContour { min_distance: f64 },
    #[error("driver leaves the Carathéodory class at t = {t} (min Re p = {min_re:e})")]
    DriverDomain { t: f64, min_re: f64 },
    #[error("non-finite values at t = {t}")]
    Blowup { t: f64 },
    #[error("limit not converged: tail drift {drift:e} exceeds tolerance {tolerance:e}")]
    NotConverged { drift: f64, tolerance: f64 },
    #[error("step too large: {0}")]
    StepTooLarge(&'static str),
    #[error("{swallowed} of {total} tracked points swallowed; estimate unreliable")]
    UnreliableEstimate { swallowed: usize, total: usize },
    #[error("unsupported functional: {0}")]
    UnsupportedFunctional(&'static str),
    #[error("point is at the singularity z = 0")]
    Singularity,
}
