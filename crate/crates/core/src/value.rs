//! Extended values: Booleans, integers, binary64 reals and the two infinities.

use core::cmp::Ordering;
use core::fmt;

use crate::error::EvalError;

/// A scalar value.
///
/// Booleans take part in arithmetic as 0/1. The total order places `NegInf`
/// first and `PosInf` last; numerically equal values of different variants
/// are ordered `Bool < Int < Real` so that sorting is deterministic.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Real(f64),
    NegInf,
    PosInf,
}

/// The type of a variable or array element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueType {
    Bool,
    Int,
    Real,
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueType::Bool => "bool",
            ValueType::Int => "int",
            ValueType::Real => "real",
        })
    }
}

impl ValueType {
    /// Smallest value of the type, used as the "no support" value of a guard.
    pub fn bottom(self) -> Value {
        match self {
            ValueType::Bool => Value::Bool(false),
            _ => Value::NegInf,
        }
    }
}

impl Value {
    pub const FALSE: Value = Value::Bool(false);
    pub const TRUE: Value = Value::Bool(true);

    fn rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) => 1,
            Value::Real(_) => 2,
            Value::NegInf | Value::PosInf => 3,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Value::NegInf | Value::PosInf)
    }

    /// Numeric view; infinities map to the f64 infinities.
    pub fn to_f64(&self) -> f64 {
        match *self {
            Value::Bool(b) => b as i64 as f64,
            Value::Int(i) => i as f64,
            Value::Real(r) => r,
            Value::NegInf => f64::NEG_INFINITY,
            Value::PosInf => f64::INFINITY,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            Value::Int(i) => Some(i),
            Value::Bool(b) => Some(b as i64),
            _ => None,
        }
    }

    /// Numeric comparison ignoring the variant tie-break.
    pub fn num_cmp(&self, other: &Value) -> Ordering {
        use Value::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
            (Real(_), _) | (_, Real(_)) => self.to_f64().total_cmp(&other.to_f64()),
            _ => self.as_int().unwrap().cmp(&other.as_int().unwrap()),
        }
    }

    pub fn num_eq(&self, other: &Value) -> bool {
        self.num_cmp(other) == Ordering::Equal
    }

    pub fn max_num(self, other: Value) -> Value {
        if other.num_cmp(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn min_num(self, other: Value) -> Value {
        if other.num_cmp(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }

    fn numeric(self) -> Value {
        match self {
            Value::Bool(b) => Value::Int(b as i64),
            v => v,
        }
    }

    pub fn add(self, other: Value) -> Result<Value, EvalError> {
        use Value::*;
        Ok(match (self.numeric(), other.numeric()) {
            (NegInf, PosInf) | (PosInf, NegInf) => return Err(EvalError::InfinityMinusInfinity),
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Int(a), Int(b)) => Int(a.checked_add(b).ok_or(EvalError::Overflow)?),
            (a, b) => Real(a.to_f64() + b.to_f64()),
        })
    }

    pub fn neg(self) -> Result<Value, EvalError> {
        use Value::*;
        Ok(match self.numeric() {
            NegInf => PosInf,
            PosInf => NegInf,
            Int(a) => Int(a.checked_neg().ok_or(EvalError::Overflow)?),
            Real(r) => Real(-r),
            Bool(_) => unreachable!(),
        })
    }

    pub fn mul(self, other: Value) -> Result<Value, EvalError> {
        use Value::*;
        let (a, b) = (self.numeric(), other.numeric());
        if !a.is_finite() || !b.is_finite() {
            let (x, y) = (a.to_f64(), b.to_f64());
            if x == 0.0 || y == 0.0 {
                return Err(EvalError::ZeroTimesInfinity);
            }
            return Ok(if (x > 0.0) == (y > 0.0) { PosInf } else { NegInf });
        }
        Ok(match (a, b) {
            (Int(x), Int(y)) => Int(x.checked_mul(y).ok_or(EvalError::Overflow)?),
            (x, y) => Real(x.to_f64() * y.to_f64()),
        })
    }

    pub fn recip(self) -> Result<Value, EvalError> {
        use Value::*;
        Ok(match self.numeric() {
            NegInf | PosInf => Real(0.0),
            v if v.to_f64() == 0.0 => return Err(EvalError::DivisionByZero),
            Int(1) => Int(1),
            Int(-1) => Int(-1),
            v => Real(1.0 / v.to_f64()),
        })
    }

    /// Smallest value of `ty` that is `>= self` (`PosInf` if none exists).
    ///
    /// Used to turn a required lower bound into a value of an integer or
    /// Boolean variable.
    pub fn ceil_to(self, ty: ValueType) -> Value {
        match ty {
            ValueType::Bool => match self {
                Value::NegInf => Value::FALSE,
                v if v.num_cmp(&Value::Int(0)) != Ordering::Greater => Value::FALSE,
                v if v.num_cmp(&Value::Int(1)) != Ordering::Greater => Value::TRUE,
                _ => Value::PosInf,
            },
            ValueType::Int => match self {
                Value::Real(r) => Value::Int(ceil_f64(r)),
                Value::Bool(b) => Value::Int(b as i64),
                v => v,
            },
            ValueType::Real => match self {
                Value::Int(i) => Value::Real(i as f64),
                Value::Bool(b) => Value::Real(b as i64 as f64),
                v => v,
            },
        }
    }

    /// Largest value of `ty` that is `<= self`.
    pub fn floor_to(self, ty: ValueType) -> Value {
        match ty {
            ValueType::Bool => match self {
                Value::PosInf => Value::TRUE,
                v if v.num_cmp(&Value::Int(1)) != Ordering::Less => Value::TRUE,
                v if v.num_cmp(&Value::Int(0)) != Ordering::Less => Value::FALSE,
                _ => Value::NegInf,
            },
            ValueType::Int => match self {
                Value::Real(r) => Value::Int(floor_f64(r)),
                Value::Bool(b) => Value::Int(b as i64),
                v => v,
            },
            ValueType::Real => self.ceil_to(ValueType::Real),
        }
    }

    /// Build a value of type `ty` from an f64 bound, rounding outward
    /// (`up = true` rounds towards +inf).
    pub fn from_f64(x: f64, ty: ValueType, up: bool) -> Value {
        let v = if x == f64::INFINITY {
            Value::PosInf
        } else if x == f64::NEG_INFINITY {
            Value::NegInf
        } else {
            Value::Real(x)
        };
        if up {
            v.ceil_to(ty)
        } else {
            v.floor_to(ty)
        }
    }
}

pub(crate) fn floor_f64(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) > x {
        t - 1
    } else {
        t
    }
}

pub(crate) fn ceil_f64(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl core::hash::Hash for Value {
    fn hash<H: core::hash::Hasher>(&self, h: &mut H) {
        self.rank().hash(h);
        match *self {
            Value::Bool(b) => (b as i64).hash(h),
            Value::Int(i) => i.hash(h),
            Value::Real(r) => r.to_bits().hash(h),
            Value::NegInf => 0u8.hash(h),
            Value::PosInf => 1u8.hash(h),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        self.num_cmp(other).then_with(|| self.rank().cmp(&other.rank()))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r:?}"),
            Value::NegInf => f.write_str("-inf"),
            Value::PosInf => f.write_str("inf"),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn order_places_infinities_at_the_ends() {
        let mut vs: Vec<Value> = vec![
            Value::PosInf,
            Value::Int(3),
            Value::TRUE,
            Value::NegInf,
            Value::FALSE,
            Value::Real(-2.5),
        ];
        vs.sort();
        assert_eq!(
            vs,
            vec![
                Value::NegInf,
                Value::Real(-2.5),
                Value::FALSE,
                Value::TRUE,
                Value::Int(3),
                Value::PosInf
            ]
        );
    }

    #[test]
    fn infinity_arithmetic() {
        assert_eq!(Value::NegInf.add(Value::Int(4)).unwrap(), Value::NegInf);
        assert_eq!(
            Value::NegInf.add(Value::PosInf),
            Err(EvalError::InfinityMinusInfinity)
        );
        assert_eq!(Value::Int(0).recip(), Err(EvalError::DivisionByZero));
        assert_eq!(Value::Int(2).mul(Value::TRUE).unwrap(), Value::Int(2));
    }

    #[test]
    fn rounding_to_types() {
        assert_eq!(Value::Real(2.5).ceil_to(ValueType::Int), Value::Int(3));
        assert_eq!(Value::Real(-2.5).ceil_to(ValueType::Int), Value::Int(-2));
        assert_eq!(Value::Real(-2.5).floor_to(ValueType::Int), Value::Int(-3));
        assert_eq!(Value::NegInf.ceil_to(ValueType::Bool), Value::FALSE);
    }

    #[test]
    fn mixed_numeric_comparison() {
        assert!(Value::Int(1).num_eq(&Value::TRUE));
        assert!(Value::Real(1.0).num_eq(&Value::Int(1)));
        assert_ne!(Value::Real(1.0), Value::Int(1));
    }
}
