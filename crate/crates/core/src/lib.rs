//! Bound founded answer set programs: flattening, bottom-up grounding with
//! grounding conditions, magic-set relevance, and a reference stable-model
//! oracle for small ground programs.

#![no_std]
#![allow(clippy::should_implement_trait)]

extern crate alloc;

pub mod analysis;
pub mod condition;
pub mod error;
pub mod flatten;
pub mod ground;
pub mod grounder;
pub mod magic;
pub mod oracle;
pub mod expr;
pub mod monotonicity;
pub mod program;
pub mod simplify;
pub mod ujb;
pub mod value;

pub use error::{EvalError, ProgramError};
pub use expr::{CmpOp, Expr};
pub use monotonicity::{interval, monotonicity, Interval, Monotonicity};
pub use program::*;
pub use value::{Value, ValueType};
