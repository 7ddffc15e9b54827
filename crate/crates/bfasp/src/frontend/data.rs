//! Parameter data: a JSON object mapping names to scalars or nested lists.

use std::collections::BTreeMap;

use bfasp_core::{Value, ValueType};
use serde_json::Value as Json;

use super::error::{ErrorKind, FrontendError, Pos};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Data {
    pub entries: BTreeMap<String, Json>,
}

impl Data {
    pub fn parse(text: &str) -> Result<Data, FrontendError> {
        if text.trim().is_empty() {
            return Ok(Data::default());
        }
        let v: Json = serde_json::from_str(text).map_err(|e| {
            FrontendError::new(ErrorKind::Syntax, Pos { line: e.line() as u32, col: e.column() as u32 }, e.to_string())
        })?;
        match v {
            Json::Object(m) => Ok(Data { entries: m.into_iter().collect() }),
            _ => Err(FrontendError::data(ErrorKind::ShapeMismatch, "data must be a JSON object")),
        }
    }

    /// Row-major values of `name` with the given shape; a flat list of the
    /// right length is accepted for any shape.
    pub fn values(&self, name: &str, ty: ValueType, shape: &[u64]) -> Result<Vec<Value>, FrontendError> {
        let j = self
            .entries
            .get(name)
            .ok_or_else(|| FrontendError::data(ErrorKind::MissingParameter, format!("no data for parameter {name}")))?;
        let total: u64 = shape.iter().product();
        let mut flat = Vec::new();
        let nested_ok = flatten(j, shape, &mut flat);
        if !nested_ok {
            flat.clear();
            let is_flat = match j {
                Json::Array(v) => v.iter().all(|x| !x.is_array()) && v.len() as u64 == total && !shape.is_empty(),
                _ => false,
            };
            if !is_flat {
                return Err(FrontendError::data(
                    ErrorKind::ShapeMismatch,
                    format!("data for {name} does not have shape {shape:?}"),
                ));
            }
            if let Json::Array(v) = j {
                flat.extend(v.iter());
            }
        }
        flat.into_iter().map(|x| convert(name, x, ty)).collect()
    }
}

fn flatten<'a>(j: &'a Json, shape: &[u64], out: &mut Vec<&'a Json>) -> bool {
    match shape.split_first() {
        None => {
            if j.is_array() {
                return false;
            }
            out.push(j);
            true
        }
        Some((&n, rest)) => match j {
            Json::Array(v) if v.len() as u64 == n => v.iter().all(|x| flatten(x, rest, out)),
            _ => false,
        },
    }
}

fn convert(name: &str, j: &Json, ty: ValueType) -> Result<Value, FrontendError> {
    let bad = || FrontendError::data(ErrorKind::DomainViolation, format!("value {j} of {name} is not a {ty}"));
    match ty {
        ValueType::Bool => match j {
            Json::Bool(b) => Ok(Value::Bool(*b)),
            Json::Number(n) if n.as_i64() == Some(0) => Ok(Value::FALSE),
            Json::Number(n) if n.as_i64() == Some(1) => Ok(Value::TRUE),
            _ => Err(bad()),
        },
        ValueType::Int => j.as_i64().map(Value::Int).ok_or_else(bad),
        ValueType::Real => j.as_f64().map(Value::Real).ok_or_else(bad),
    }
}
