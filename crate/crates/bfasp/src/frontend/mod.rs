//! Model language and parameter data.

pub mod ast;
pub mod bind;
pub mod check;
pub mod data;
pub mod error;
pub mod lexer;
pub mod parser;

use bfasp_core::Program;

pub use data::Data;
pub use error::{ErrorKind, FrontendError, Pos};

/// Parse a model and check names, arities and kinds.
pub fn parse_model(src: &str) -> Result<ast::Model, FrontendError> {
    let m = parser::parse(src)?;
    check::check_model(&m)?;
    Ok(m)
}

/// Bind parameter data to a parsed model.
pub fn bind_data(m: &ast::Model, data: &str) -> Result<Program, FrontendError> {
    bind::bind(m, &Data::parse(data)?)
}

/// Parse and bind in one step.
pub fn load(model: &str, data: &str) -> Result<Program, FrontendError> {
    bind_data(&parse_model(model)?, data)
}
