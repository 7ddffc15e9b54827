//! Expression trees, generic over the leaf type.
//!
//! Non-ground rules use [`crate::program::Leaf`] leaves (array accesses and
//! index values); ground programs use [`crate::ground::VarId`].

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::error::EvalError;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

impl CmpOp {
    /// The operator `op'` with `!(a op b) == (a op' b)`, if expressible.
    pub fn complement(self) -> Option<CmpOp> {
        Some(match self {
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Eq => return None,
        })
    }

    pub fn holds(self, a: &Value, b: &Value) -> bool {
        use core::cmp::Ordering::*;
        let o = a.num_cmp(b);
        match self {
            CmpOp::Ge => o != Less,
            CmpOp::Gt => o == Greater,
            CmpOp::Le => o != Greater,
            CmpOp::Lt => o == Less,
            CmpOp::Eq => o == Equal,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Ge => "ge",
            CmpOp::Gt => "gt",
            CmpOp::Le => "le",
            CmpOp::Lt => "lt",
            CmpOp::Eq => "eq",
        }
    }
}

/// An expression tree.
///
/// `Guard(v, b)` denotes "v if b": the value of `v` when `b` holds and the
/// bottom of `v`'s type otherwise, which is what a rule `y >= v <- b` means.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr<L> {
    Const(Value),
    Leaf(L),
    Sum(Vec<Expr<L>>),
    Product(Vec<Expr<L>>),
    Max(Vec<Expr<L>>),
    Min(Vec<Expr<L>>),
    Neg(Box<Expr<L>>),
    Recip(Box<Expr<L>>),
    And(Vec<Expr<L>>),
    Or(Vec<Expr<L>>),
    Not(Box<Expr<L>>),
    Cmp(CmpOp, Box<Expr<L>>, Box<Expr<L>>),
    Guard(Box<Expr<L>>, Box<Expr<L>>),
}

impl<L> Expr<L> {
    pub fn leaf(l: L) -> Self {
        Expr::Leaf(l)
    }

    pub fn int(i: i64) -> Self {
        Expr::Const(Value::Int(i))
    }

    pub fn neg(e: Expr<L>) -> Self {
        Expr::Neg(Box::new(e))
    }

    pub fn not(e: Expr<L>) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn cmp(op: CmpOp, a: Expr<L>, b: Expr<L>) -> Self {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn guard(v: Expr<L>, b: Expr<L>) -> Self {
        Expr::Guard(Box::new(v), Box::new(b))
    }

    /// Direct children, in order.
    pub fn children(&self) -> Vec<&Expr<L>> {
        match self {
            Expr::Const(_) | Expr::Leaf(_) => Vec::new(),
            Expr::Sum(v) | Expr::Product(v) | Expr::Max(v) | Expr::Min(v) | Expr::And(v) | Expr::Or(v) => {
                v.iter().collect()
            }
            Expr::Neg(c) | Expr::Recip(c) | Expr::Not(c) => alloc::vec![&**c],
            Expr::Cmp(_, a, b) | Expr::Guard(a, b) => alloc::vec![&**a, &**b],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr<L>> {
        match self {
            Expr::Const(_) | Expr::Leaf(_) => Vec::new(),
            Expr::Sum(v) | Expr::Product(v) | Expr::Max(v) | Expr::Min(v) | Expr::And(v) | Expr::Or(v) => {
                v.iter_mut().collect()
            }
            Expr::Neg(c) | Expr::Recip(c) | Expr::Not(c) => alloc::vec![&mut **c],
            Expr::Cmp(_, a, b) | Expr::Guard(a, b) => alloc::vec![&mut **a, &mut **b],
        }
    }

    /// Visit every leaf, left to right.
    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&'a L)) {
        match self {
            Expr::Leaf(l) => f(l),
            _ => {
                for c in self.children() {
                    c.for_each_leaf(f);
                }
            }
        }
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.for_each_leaf(&mut |l| out.push(l));
        out
    }

    pub fn any_leaf(&self, pred: &mut impl FnMut(&L) -> bool) -> bool {
        match self {
            Expr::Leaf(l) => pred(l),
            _ => self.children().into_iter().any(|c| c.any_leaf(pred)),
        }
    }

    /// Rebuild the tree with each leaf replaced by `f(leaf)`.
    pub fn map_leaves<M, E>(&self, f: &mut impl FnMut(&L) -> Result<Expr<M>, E>) -> Result<Expr<M>, E> {
        self.map_dyn(f)
    }

    fn map_dyn<M, E>(&self, f: &mut dyn FnMut(&L) -> Result<Expr<M>, E>) -> Result<Expr<M>, E> {
        let mut map_vec = |v: &Vec<Expr<L>>| -> Result<Vec<Expr<M>>, E> { v.iter().map(|c| c.map_dyn(&mut *f)).collect() };
        Ok(match self {
            Expr::Const(v) => Expr::Const(*v),
            Expr::Leaf(l) => f(l)?,
            Expr::Sum(v) => Expr::Sum(map_vec(v)?),
            Expr::Product(v) => Expr::Product(map_vec(v)?),
            Expr::Max(v) => Expr::Max(map_vec(v)?),
            Expr::Min(v) => Expr::Min(map_vec(v)?),
            Expr::And(v) => Expr::And(map_vec(v)?),
            Expr::Or(v) => Expr::Or(map_vec(v)?),
            Expr::Neg(c) => Expr::Neg(Box::new(c.map_dyn(f)?)),
            Expr::Recip(c) => Expr::Recip(Box::new(c.map_dyn(f)?)),
            Expr::Not(c) => Expr::Not(Box::new(c.map_dyn(f)?)),
            Expr::Cmp(op, a, b) => Expr::Cmp(*op, Box::new(a.map_dyn(&mut *f)?), Box::new(b.map_dyn(f)?)),
            Expr::Guard(a, b) => Expr::Guard(Box::new(a.map_dyn(&mut *f)?), Box::new(b.map_dyn(f)?)),
        })
    }

    /// Height of the tree; constants and leaves have height 0.
    pub fn height(&self) -> usize {
        self.children().iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Whether the expression denotes a Boolean.
    pub fn is_boolean(&self, leaf_is_bool: &impl Fn(&L) -> bool) -> bool {
        match self {
            Expr::Const(v) => matches!(v, Value::Bool(_)),
            Expr::Leaf(l) => leaf_is_bool(l),
            Expr::And(_) | Expr::Or(_) | Expr::Not(_) | Expr::Cmp(..) => true,
            Expr::Guard(v, _) => v.is_boolean(leaf_is_bool),
            Expr::Max(v) | Expr::Min(v) => v.first().is_some_and(|c| c.is_boolean(leaf_is_bool)),
            _ => false,
        }
    }

    /// Evaluate with `leaf` giving each leaf's value.
    ///
    /// `bool_leaf` tells whether a leaf is Boolean; it only matters for the
    /// value of a failed guard (`false` rather than `-inf`).
    pub fn eval(
        &self,
        leaf: &impl Fn(&L) -> Result<Value, EvalError>,
        bool_leaf: &impl Fn(&L) -> bool,
    ) -> Result<Value, EvalError> {
        let bool_of = |e: &Expr<L>| -> Result<bool, EvalError> {
            match e.eval(leaf, bool_leaf)? {
                Value::Bool(b) => Ok(b),
                _ => Err(EvalError::Type("expected a Boolean")),
            }
        };
        Ok(match self {
            Expr::Const(v) => *v,
            Expr::Leaf(l) => leaf(l)?,
            Expr::Sum(v) => {
                let mut acc = Value::Int(0);
                for c in v {
                    acc = acc.add(c.eval(leaf, bool_leaf)?)?;
                }
                acc
            }
            Expr::Product(v) => {
                let mut acc = Value::Int(1);
                for c in v {
                    acc = acc.mul(c.eval(leaf, bool_leaf)?)?;
                }
                acc
            }
            Expr::Max(v) => {
                let mut acc: Option<Value> = None;
                for c in v {
                    let x = c.eval(leaf, bool_leaf)?;
                    acc = Some(acc.map_or(x, |a| a.max_num(x)));
                }
                acc.unwrap_or(Value::NegInf)
            }
            Expr::Min(v) => {
                let mut acc: Option<Value> = None;
                for c in v {
                    let x = c.eval(leaf, bool_leaf)?;
                    acc = Some(acc.map_or(x, |a| a.min_num(x)));
                }
                acc.unwrap_or(Value::PosInf)
            }
            Expr::Neg(c) => c.eval(leaf, bool_leaf)?.neg()?,
            Expr::Recip(c) => c.eval(leaf, bool_leaf)?.recip()?,
            Expr::And(v) => {
                let mut acc = true;
                for c in v {
                    acc &= bool_of(c)?;
                }
                Value::Bool(acc)
            }
            Expr::Or(v) => {
                let mut acc = false;
                for c in v {
                    acc |= bool_of(c)?;
                }
                Value::Bool(acc)
            }
            Expr::Not(c) => Value::Bool(!bool_of(c)?),
            Expr::Cmp(op, a, b) => {
                let (x, y) = (a.eval(leaf, bool_leaf)?, b.eval(leaf, bool_leaf)?);
                Value::Bool(op.holds(&x, &y))
            }
            Expr::Guard(v, b) => {
                if bool_of(b)? {
                    v.eval(leaf, bool_leaf)?
                } else if v.is_boolean(bool_leaf) {
                    Value::FALSE
                } else {
                    Value::NegInf
                }
            }
        })
    }
}

impl<L: fmt::Display> fmt::Display for Expr<L> {
    /// Prefix notation, e.g. `sum(a, neg(b), 3)`; guards print as `v <- b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<L: fmt::Display>(f: &mut fmt::Formatter<'_>, name: &str, v: &[&Expr<L>]) -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, c) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        }
        let kids = self.children();
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Leaf(l) => write!(f, "{l}"),
            Expr::Sum(_) => list(f, "sum", &kids),
            Expr::Product(_) => list(f, "prod", &kids),
            Expr::Max(_) => list(f, "max", &kids),
            Expr::Min(_) => list(f, "min", &kids),
            Expr::Neg(_) => list(f, "neg", &kids),
            Expr::Recip(_) => list(f, "inv", &kids),
            Expr::And(_) => list(f, "and", &kids),
            Expr::Or(_) => list(f, "or", &kids),
            Expr::Not(_) => list(f, "not", &kids),
            Expr::Cmp(op, ..) => list(f, op.name(), &kids),
            Expr::Guard(v, b) => write!(f, "{v} <- {b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    type E = Expr<u32>;

    fn env(vals: &[Value]) -> impl Fn(&u32) -> Result<Value, EvalError> + '_ {
        move |l| Ok(vals[*l as usize])
    }

    #[test]
    fn sum_of_constants() {
        let e: E = Expr::Sum(vec![Expr::int(2), Expr::int(3)]);
        assert_eq!(e.eval(&env(&[]), &|_| false).unwrap(), Value::Int(5));
    }

    #[test]
    fn max_with_negative_infinity() {
        let e: E = Expr::Max(vec![Expr::Leaf(0), Expr::Const(Value::NegInf)]);
        assert_eq!(e.eval(&env(&[Value::Int(10)]), &|_| false).unwrap(), Value::Int(10));
    }

    #[test]
    fn failed_guard_contributes_nothing() {
        let e: E = Expr::guard(Expr::int(10), Expr::Leaf(0));
        assert_eq!(e.eval(&env(&[Value::FALSE]), &|_| true).unwrap(), Value::NegInf);
        let b: E = Expr::guard(Expr::Leaf(1), Expr::Leaf(0));
        let vals = [Value::FALSE, Value::TRUE];
        assert_eq!(b.eval(&env(&vals), &|_| true).unwrap(), Value::FALSE);
    }

    #[test]
    fn undefined_values_are_errors() {
        let e: E = Expr::Recip(Box::new(Expr::int(0)));
        assert_eq!(e.eval(&env(&[]), &|_| false), Err(EvalError::DivisionByZero));
        let e: E = Expr::Sum(vec![Expr::Const(Value::PosInf), Expr::Const(Value::NegInf)]);
        assert!(e.eval(&env(&[]), &|_| false).is_err());
    }

    #[test]
    fn prefix_display() {
        let e: E = Expr::Max(vec![Expr::Leaf(4), Expr::Const(Value::NegInf)]);
        assert_eq!(e.to_string(), "max(4, -inf)");
    }
}
