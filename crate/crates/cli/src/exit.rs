//! Process exit codes and the mapping from library errors onto them.

use triurn::error::{AnalysisError, CorpusError, VerifyError};

pub const OK: u8 = 0;
pub const IO_PARSE: u8 = 1;
pub const VALIDATION: u8 = 2;
pub const NON_TRIANGULAR: u8 = 3;
pub const INAPPLICABLE: u8 = 4;
pub const CHECK_FAILED: u8 = 5;

/// Result of a command that ran to completion. Ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Passed,
    Inapplicable,
    CheckFailed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Passed => OK,
            Outcome::Inapplicable => INAPPLICABLE,
            Outcome::CheckFailed => CHECK_FAILED,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Passed => "pass",
            Outcome::Inapplicable => "inapplicable",
            Outcome::CheckFailed => "fail",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: anyhow::Error) -> Self {
        Failure { code, error }
    }

    pub fn io(error: anyhow::Error) -> Self {
        Failure::new(IO_PARSE, error)
    }

    pub fn usage(error: anyhow::Error) -> Self {
        Failure::new(IO_PARSE, error)
    }

    pub fn validation(error: anyhow::Error) -> Self {
        Failure::new(VALIDATION, error)
    }

    pub fn from_analysis(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::NonTriangular(_) => NON_TRIANGULAR,
            _ => VALIDATION,
        };
        Failure::new(code, e.into())
    }

    pub fn from_verify(e: VerifyError) -> Self {
        match e {
            VerifyError::Analysis(a) => Failure::from_analysis(a),
            VerifyError::Inapplicable(_) => Failure::new(INAPPLICABLE, e.into()),
            VerifyError::Sim(_) => Failure::new(IO_PARSE, e.into()),
            other => Failure::new(CHECK_FAILED, other.into()),
        }
    }

    pub fn from_corpus(e: CorpusError) -> Self {
        let code = match e {
            CorpusError::Constraint { .. } => VALIDATION,
            _ => IO_PARSE,
        };
        Failure::new(code, e.into())
    }
}
