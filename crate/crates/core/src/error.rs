use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the function or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Result would overflow the documented range.
    #[error("range error: {0}")]
    Range(String),

    /// Argument sits on (or within tolerance of) a pole.
    #[error("pole at {location}")]
    Pole { location: Complex64 },

    /// The integrand returned a non-finite value away from an endpoint limit.
    #[error("integrand evaluation failed at x = {x}")]
    Evaluation { x: f64 },

    /// A quadrature run exhausted its refinement levels.
    #[error("quadrature did not converge: value {value:e}, error estimate {err_est:e}")]
    NotConverged { value: f64, err_est: f64 },

    /// A sub-integral of a partitioned transform failed.
    #[error("interval {index} of the partition failed: {source}")]
    Interval {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Invalid combination of inputs (e.g. closed form requested for α ≠ 1).
    #[error("usage error: {0}")]
    Usage(String),

    /// The integral diverges for the requested parameters.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// Ring calibration with a vanishing denominator.
    #[error("degenerate calibration: ring integral {0:e} is too small")]
    DegenerateCalibration(f64),

    /// Residue series stopped decreasing before the requested number of terms.
    #[error(
        "residue series diverges after {terms} terms (partial sum {partial:e}); \
         the expansion is only valid for larger arguments"
    )]
    ResidueDivergence { partial: f64, terms: usize },

    /// Contour quadrature could not reach the truncation threshold.
    #[error("contour integral did not decay: |integrand| = {magnitude:e} at Im s = {t_max}")]
    ContourDecay { t_max: f64, magnitude: f64 },

    /// A profile sample failed; carries the radius and method for diagnostics.
    #[error("{method} failed at r = {r}: {source}")]
    Sample {
        r: f64,
        method: String,
        #[source]
        source: Box<Error>,
    },
}
