use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An off-diagonal entry is zero or negative where a cooperative
    /// (Metzler) matrix is required.
    #[error("matrix is not Metzler: both off-diagonal entries must be strictly positive")]
    NotMetzler,
    #[error("({x1}, {x2}) is not an admissible unit direction")]
    NotUnit { x1: f64, x2: f64 },
    #[error("matrix is singular (det = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("integration step {step:e} exceeds the maximum {max:e}")]
    StepTooLarge { step: f64, max: f64 },
    #[error("degenerate trajectory: sampled norm underflowed to zero at t = {t}")]
    DegenerateTrajectory { t: f64 },
    #[error("series order {requested} exceeds the supported maximum {max}")]
    DegreeOverflow { requested: usize, max: usize },
    #[error("no sign change across the bracket [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("{what} = {value:e} violates the guaranteed bound {bound:e}")]
    BoundViolated {
        what: &'static str,
        value: f64,
        bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, field: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: reason.into(),
        })
    }
}

pub(crate) fn require_positive(value: f64, field: &'static str) -> Result<()> {
    require(
        value.is_finite() && value > 0.0,
        field,
        format!("must be a positive finite number, got {value}"),
    )
}
