use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Parameters outside the admissible domain (q ∉ (0,1), a ≤ 0, bad caps).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("truncation failure: {0}")]
    Truncation(String),

    #[error("series and recurrence disagree for n={n}, x={x}: |diff|={diff:e} > {tol:e}·{scale:e}")]
    MethodDisagreement {
        n: usize,
        x: f64,
        diff: f64,
        scale: f64,
        tol: f64,
    },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("operator construction failed: {0}")]
    Construction(String),

    #[error("eigensolver failure: {0}")]
    Solver(String),

    #[error("spectrum violation: computed eigenvalue {computed} exceeds analytic radius {radius}")]
    SpectrumViolation { computed: f64, radius: f64 },

    #[error("frame materialization failed: {0}")]
    Frame(String),
}

impl Error {
    /// True for errors caused by caller-supplied inputs rather than by a
    /// failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parameter(_) | Error::Domain(_))
    }
}
