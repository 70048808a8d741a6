use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the stage that raises them; the CLI maps each
/// group onto a fixed exit code (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("polynomial is zero to within tolerance")]
    ZeroPolynomial,
    #[error("root iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial is not divisible by the linear factor: {0}")]
    NotDivisible(String),
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("t_{k} has degree {degree}, exceeding the bound {bound}")]
    DegreeViolation { k: usize, degree: usize, bound: usize },
    #[error("gauge matrix s is singular")]
    SingularGauge,
    #[error("bracket monomial outside the coefficient shape: {0}")]
    ShapeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("leading coefficient of det Z vanishes (degree {found}, expected {expected})")]
    DegenerateLeading { expected: usize, found: usize },
    #[error("det Z has a multiple root (min separation {separation:e})")]
    MultipleRoot { separation: f64 },
    #[error("no admissible xi after {attempts} attempts")]
    GenericityFailure { attempts: usize },
    #[error("genericity resampling exhausted after {retries} retries: {last}")]
    GenericityExhausted { retries: usize, last: String },
    #[error("divisor lies on or near the theta divisor (rcond {rcond:e})")]
    ThetaDivisorSingularity { rcond: f64 },
    #[error("reconstruction sweep inconsistent at grade {grade}: {detail}")]
    SweepInconsistency { grade: usize, detail: String },
    #[error("first column does not reproduce the curve (residual {residual:e})")]
    InconsistentCurve { residual: f64 },
    #[error("character is unbalanced: {num} numerator vs {den} denominator factors")]
    UnbalancedCharacter { num: usize, den: usize },
    #[error("Euler characteristic is zero; ratio undefined")]
    DivisionByZeroChi,
    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// Whether resampling the instance could make the failure go away.
    pub fn is_genericity(&self) -> bool {
        matches!(
            self,
            Error::SingularGauge
                | Error::DegenerateLeading { .. }
                | Error::MultipleRoot { .. }
                | Error::GenericityFailure { .. }
                | Error::GenericityExhausted { .. }
                | Error::ThetaDivisorSingularity { .. }
        )
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::IndexOutOfRange(_) | Error::Serialization(_) => 64,
            Error::UnbalancedCharacter { .. } | Error::DivisionByZeroChi => 4,
            e if e.is_genericity() => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
