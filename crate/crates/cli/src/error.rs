use tbm_core::BeliefError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, or values that are not a belief function.
    #[error("input error: {0}")]
    Input(String),
    /// Well-formed input that violates an operation's precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A theorem check found violations.
    #[error("verification failed")]
    Verification,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl From<BeliefError> for CliError {
    fn from(e: BeliefError) -> Self {
        use BeliefError::*;
        match e {
            FrameTooLarge { .. }
            | NormalizationUndefined { .. }
            | SingularSpecialization { .. }
            | NotRetractable { .. }
            | NonInvertibleEvidence { .. }
            | EvidenceNotContained { .. }
            | NotDempsterian(_) => CliError::Precondition(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
