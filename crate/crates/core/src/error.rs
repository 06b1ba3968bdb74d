use thiserror::Error;

/// Errors raised by the belief calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("frame has {n} elements, cap is {cap}")]
    FrameTooLarge { n: usize, cap: usize },

    #[error("frame mismatch: operands live on different frames")]
    FrameMismatch,

    #[error("subset index {bits:#b} out of range for a frame of {n} elements")]
    SubsetOutOfRange { bits: u32, n: usize },

    #[error("vector length {got} does not match 2^n = {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("expected a {expected} function, got {got}")]
    WrongKind { expected: String, got: String },

    #[error("not a belief function: {0}")]
    NotABeliefFunction(String),

    #[error("normalization undefined: total conflict m(∅) = {conflict}")]
    NormalizationUndefined { conflict: f64 },

    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not Dempsterian: {0}")]
    NotDempsterian(String),

    #[error("singular: q({subset})={value}")]
    SingularSpecialization { subset: String, value: f64 },

    #[error("not retractable: result mass at {subset} is {value}")]
    NotRetractable { subset: String, value: f64 },

    #[error("non-invertible evidence: q({subset})={value}")]
    NonInvertibleEvidence { subset: String, value: f64 },

    #[error("evidence not contained: retraction yields mass {value} at {subset}")]
    EvidenceNotContained { subset: String, value: f64 },
}

pub type Result<T> = std::result::Result<T, BeliefError>;
