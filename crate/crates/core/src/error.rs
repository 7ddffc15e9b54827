use alloc::string::String;
use thiserror::Error;

/// Failure while evaluating an expression.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undefined value: +inf + -inf")]
    InfinityMinusInfinity,
    #[error("undefined value: 0 * inf")]
    ZeroTimesInfinity,
    #[error("undefined value: division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("type error: {0}")]
    Type(&'static str),
    #[error("unbound variable {0}")]
    Unbound(String),
}

/// Errors raised while checking, flattening or grounding a program.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ProgramError {
    #[error("invalid program: non-monotonic edge {head} -> {body} inside a recursive component (rule {rule})")]
    InvalidProgram { rule: String, head: String, body: String },
    #[error("unsupported rule form in rule {rule}: {reason}")]
    UnsupportedRuleForm { rule: String, reason: String },
    #[error("rule {rule} matches no grounding-condition row: {reason}")]
    UnmatchedRuleForm { rule: String, reason: String },
    #[error("index {index} out of range for array {array}")]
    IndexOutOfRange { array: String, index: String },
    #[error("evaluation error in {context}: {source}")]
    Eval { context: String, source: EvalError },
}
