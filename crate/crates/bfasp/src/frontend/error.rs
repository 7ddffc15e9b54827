use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnknownIdentifier,
    ArityMismatch,
    UnboundIndexVariable,
    KindMismatch,
    MissingParameter,
    ShapeMismatch,
    DomainViolation,
}

impl ErrorKind {
    /// Errors caused by the data file rather than the model.
    pub fn is_data(self) -> bool {
        matches!(self, ErrorKind::MissingParameter | ErrorKind::ShapeMismatch | ErrorKind::DomainViolation)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{pos}: {kind:?}: {msg}")]
pub struct FrontendError {
    pub kind: ErrorKind,
    pub pos: Pos,
    pub msg: String,
}

impl FrontendError {
    pub fn new(kind: ErrorKind, pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError { kind, pos, msg: msg.into() }
    }

    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError::new(ErrorKind::Syntax, pos, msg)
    }

    pub fn data(kind: ErrorKind, msg: impl Into<String>) -> Self {
        FrontendError::new(kind, Pos::default(), msg)
    }
}
