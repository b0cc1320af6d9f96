use thiserror::Error;

use crate::symbolic::SymbolicError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("`{0}` is not a variable of the system")]
    ForeignVariable(String),
    #[error("derivative order {order} exceeds the cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("sampling gave up after {0} consecutive domain errors")]
    SamplingExhausted(usize),
    #[error("`{expr}` is not affine in `{pivot}`")]
    NotAffineInPivot { expr: String, pivot: String },
    #[error("coefficient of `{pivot}` in `{expr}` vanishes")]
    ZeroPivotCoefficient { expr: String, pivot: String },
    #[error("input transformation is not invertible: {0}")]
    InvertibilityFailure(String),
    #[error("prolongation subset is empty")]
    EmptySubset,
    #[error("prolongation order of `{0}` must be at least 1")]
    NonpositiveOrder(String),
    #[error("`{0}` is not an input of the system")]
    NotAnInput(String),
    #[error("unsupported number of inputs: {0}")]
    UnsupportedInputCount(usize),
    #[error("case ii construction failed: {0}")]
    CaseIIConstructionFailed(String),
    #[error("arrangement violation: {0}")]
    ArrangementViolation(String),
    #[error("inconsistent R: {0}")]
    InconsistentR(String),
    #[error("extended system is not SFL: {0}")]
    NotSfl(String),
    #[error("candidate `{name}` has {found} components, expected {expected}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("duplicate declaration of `{0}`")]
    DuplicateState(String),
    #[error("line {line}, column {column}: {message}")]
    FileSyntax { line: usize, column: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable kebab-case tag for reports and the C interface.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Symbolic(SymbolicError::Syntax { .. }) => "expression-syntax",
            Error::Symbolic(SymbolicError::UnknownSymbol(_)) => "unknown-symbol",
            Error::Symbolic(_) => "symbolic",
            Error::ForeignVariable(_) => "foreign-variable",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::SamplingExhausted(_) => "sampling-exhausted",
            Error::NotAffineInPivot { .. } => "not-affine-in-pivot",
            Error::ZeroPivotCoefficient { .. } => "zero-pivot-coefficient",
            Error::InvertibilityFailure(_) => "invertibility-failure",
            Error::EmptySubset => "empty-subset",
            Error::NonpositiveOrder(_) => "nonpositive-order",
            Error::NotAnInput(_) => "not-an-input",
            Error::UnsupportedInputCount(_) => "unsupported-input-count",
            Error::CaseIIConstructionFailed(_) => "case-ii-construction-failed",
            Error::ArrangementViolation(_) => "arrangement-violation",
            Error::InconsistentR(_) => "inconsistent-r",
            Error::NotSfl(_) => "not-sfl",
            Error::ArityMismatch { .. } => "arity-mismatch",
            Error::DuplicateState(_) => "duplicate-state",
            Error::FileSyntax { .. } => "syntax",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }

    /// Numerical or structural conditions that leave the question open.
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. }
                | Error::SamplingExhausted(_)
                | Error::NotAffineInPivot { .. }
                | Error::ZeroPivotCoefficient { .. }
                | Error::InvertibilityFailure(_)
        )
    }

    /// Failed analysis checks, as opposed to malformed input.
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::CaseIIConstructionFailed(_) | Error::ArrangementViolation(_) | Error::InconsistentR(_) | Error::NotSfl(_)
        )
    }
}
