use thiserror::Error;

/// Failures surfaced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate geometry: length ratio {ratio} lies within {tol:e} of an integer")]
    DegenerateGeometry { ratio: f64, tol: f64 },

    #[error(
        "ambiguous mode class at eta = {eta:.4}: left pole {left_pole} and right pole {right_pole} overlap"
    )]
    AmbiguousClass {
        eta: f64,
        left_pole: f64,
        right_pole: f64,
    },

    #[error("no sign change of the eigenvalue function in ({lo}, {hi})")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("{what} hits a pole (argument {arg})")]
    Pole { what: &'static str, arg: f64 },

    #[error("matrix 1-norm {norm:.3e} exceeds the exponential overflow bound")]
    Overflow { norm: f64 },

    #[error("cutoff {cutoff} too small: weight {tail:.3e} beyond it")]
    CutoffTooSmall { cutoff: usize, tail: f64 },

    #[error("truncation budget exceeded: population {population:.3e} in the top two levels")]
    Truncation { population: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("no exponential growth at zero detuning (xi = {xi}, chi = {chi})")]
    NoGrowth { xi: f64, chi: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason(),
        })
    }
}
