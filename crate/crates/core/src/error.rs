use thiserror::Error;

/// Errors raised by the library. CLI exit codes are derived from
/// [`PremError::exit_code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PremError {
    /// `line` is 0 when the problem concerns the file as a whole.
    #[error("parse error{}: {msg}", at_line(*line))]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown simplex {0:?}")]
    UnknownSimplex(Vec<usize>),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("image of source simplex {0:?} is not a simplex of the target")]
    NotSimplicial(Vec<String>),

    #[error("degenerate map: simplex {0:?} is collapsed")]
    Degenerate(Vec<String>),

    #[error("image point of vertex `{0}` is not inside any target simplex")]
    PointOutsideTarget(String),

    #[error("mismatched complexes: {0}")]
    Mismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("involution is not free: {0}")]
    NonFreeAction(String),

    #[error("combinatorial double-point model invalid: {0}")]
    ModelInvalid(String),

    #[error("triple points present: {0}")]
    TriplePointsPresent(String),

    #[error("map is not a simple fold map: {0}")]
    NotSimpleFold(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("input lift is not injective: {0}")]
    InputNotInjective(String),

    #[error("internal contract violation: {0}")]
    Internal(String),
}

fn at_line(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line}")
    }
}

impl PremError {
    /// Process exit code for the CLI (sysexits style).
    pub fn exit_code(&self) -> i32 {
        match self {
            PremError::Parse { .. } | PremError::Io(_) | PremError::UnknownVertex(_) => 64,
            PremError::Internal(_) => 70,
            _ => 65,
        }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        PremError::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, PremError>;
