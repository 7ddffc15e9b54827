//! Interval bounds and compositional monotonicity analysis.
//!
//! Everything here is conservative: a direction is reported only when it
//! holds for every value of every leaf inside its bounds.

use alloc::vec::Vec;

use crate::expr::{CmpOp, Expr};

/// Closed interval over the extended reals; Booleans are 0/1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const BOOL: Interval = Interval { lo: 0.0, hi: 1.0 };
    pub const FULL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval { lo: add_bound(self.lo, o.lo, f64::NEG_INFINITY), hi: add_bound(self.hi, o.hi, f64::INFINITY) }
    }

    pub fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Interval) -> Interval {
        let c = [mul_bound(self.lo, o.lo), mul_bound(self.lo, o.hi), mul_bound(self.hi, o.lo), mul_bound(self.hi, o.hi)];
        Interval {
            lo: c.iter().copied().fold(f64::INFINITY, f64::min),
            hi: c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn recip(self) -> Interval {
        if self.lo > 0.0 || self.hi < 0.0 {
            Interval { lo: 1.0 / self.hi, hi: 1.0 / self.lo }
        } else {
            Interval::FULL
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.lo >= 0.0
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }
}

// -inf + +inf only arises for bounds of unbounded sums; widen.
fn add_bound(a: f64, b: f64, on_conflict: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        on_conflict
    } else {
        s
    }
}

fn mul_bound(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Bounds of `e` given bounds of its leaves.
pub fn interval<L>(e: &Expr<L>, leaf: &impl Fn(&L) -> Interval) -> Interval {
    let all = |v: &Vec<Expr<L>>| v.iter().map(|c| interval(c, leaf)).collect::<Vec<_>>();
    match e {
        Expr::Const(v) => Interval::point(v.to_f64()),
        Expr::Leaf(l) => leaf(l),
        Expr::Sum(v) => all(v).into_iter().fold(Interval::point(0.0), Interval::add),
        Expr::Product(v) => all(v).into_iter().fold(Interval::point(1.0), Interval::mul),
        Expr::Max(v) => {
            let is = all(v);
            Interval {
                lo: is.iter().map(|i| i.lo).fold(f64::NEG_INFINITY, f64::max),
                hi: is.iter().map(|i| i.hi).fold(f64::NEG_INFINITY, f64::max),
            }
        }
        Expr::Min(v) => {
            let is = all(v);
            Interval {
                lo: is.iter().map(|i| i.lo).fold(f64::INFINITY, f64::min),
                hi: is.iter().map(|i| i.hi).fold(f64::INFINITY, f64::min),
            }
        }
        Expr::And(v) => {
            let is = all(v);
            Interval {
                lo: is.iter().map(|i| i.lo).fold(1.0, f64::min),
                hi: is.iter().map(|i| i.hi).fold(1.0, f64::min),
            }
        }
        Expr::Or(v) => {
            let is = all(v);
            Interval {
                lo: is.iter().map(|i| i.lo).fold(0.0, f64::max),
                hi: is.iter().map(|i| i.hi).fold(0.0, f64::max),
            }
        }
        Expr::Neg(c) => interval(c, leaf).neg(),
        Expr::Recip(c) => interval(c, leaf).recip(),
        Expr::Not(c) => {
            let i = interval(c, leaf);
            Interval { lo: 1.0 - i.hi, hi: 1.0 - i.lo }
        }
        Expr::Cmp(op, a, b) => {
            let (x, y) = (interval(a, leaf), interval(b, leaf));
            let (can_true, can_false) = match op {
                CmpOp::Ge => (x.hi >= y.lo, x.lo < y.hi),
                CmpOp::Gt => (x.hi > y.lo, x.lo <= y.hi),
                CmpOp::Le => (x.lo <= y.hi, x.hi > y.lo),
                CmpOp::Lt => (x.lo < y.hi, x.hi >= y.lo),
                CmpOp::Eq => (x.lo <= y.hi && y.lo <= x.hi, !(x.lo == x.hi && y.lo == y.hi && x.lo == y.lo)),
            };
            Interval { lo: if can_false { 0.0 } else { 1.0 }, hi: if can_true { 1.0 } else { 0.0 } }
        }
        Expr::Guard(v, b) => {
            let (vi, bi) = (interval(v, leaf), interval(b, leaf));
            let bottom = if is_bool_shaped(v) { 0.0 } else { f64::NEG_INFINITY };
            if bi.hi < 1.0 {
                Interval::point(bottom)
            } else if bi.lo >= 1.0 {
                vi
            } else {
                Interval { lo: bottom, hi: vi.hi.max(bottom) }
            }
        }
    }
}

fn is_bool_shaped<L>(e: &Expr<L>) -> bool {
    matches!(e, Expr::And(_) | Expr::Or(_) | Expr::Not(_) | Expr::Cmp(..) | Expr::Const(crate::Value::Bool(_)))
}

/// Direction of a body function with respect to a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    NonMonotonic,
    Absent,
}

impl Monotonicity {
    pub fn flip(self) -> Self {
        match self {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            m => m,
        }
    }

    /// Direction of a function that depends on the variable through two
    /// paths with directions `self` and `o`.
    pub fn combine(self, o: Self) -> Self {
        match (self, o) {
            (Monotonicity::Absent, m) | (m, Monotonicity::Absent) => m,
            (a, b) if a == b => a,
            _ => Monotonicity::NonMonotonic,
        }
    }

    /// Direction of `f(g(x))` where `self` is `f`'s direction in its argument.
    pub fn compose(self, inner: Self) -> Self {
        match (self, inner) {
            (_, Monotonicity::Absent) | (Monotonicity::Absent, _) => Monotonicity::Absent,
            (Monotonicity::Increasing, m) => m,
            (Monotonicity::Decreasing, m) => m.flip(),
            _ => Monotonicity::NonMonotonic,
        }
    }
}

/// Direction of `e` in the leaves selected by `is_target`, with `bounds`
/// giving every leaf's range.
pub fn monotonicity<L>(e: &Expr<L>, is_target: &impl Fn(&L) -> bool, bounds: &impl Fn(&L) -> Interval) -> Monotonicity {
    use Monotonicity::*;
    let rec = |c: &Expr<L>| monotonicity(c, is_target, bounds);
    let fold = |v: &Vec<Expr<L>>| v.iter().map(&rec).fold(Absent, Monotonicity::combine);
    match e {
        Expr::Const(_) => Absent,
        Expr::Leaf(l) => {
            if is_target(l) {
                Increasing
            } else {
                Absent
            }
        }
        Expr::Sum(v) | Expr::Max(v) | Expr::Min(v) | Expr::And(v) | Expr::Or(v) => fold(v),
        Expr::Neg(c) | Expr::Not(c) => rec(c).flip(),
        Expr::Recip(c) => {
            let m = rec(c);
            let i = interval(c, bounds);
            if m == Absent {
                Absent
            } else if i.lo > 0.0 || i.hi < 0.0 {
                m.flip()
            } else {
                NonMonotonic
            }
        }
        Expr::Product(v) => {
            let mut acc = Absent;
            for (k, c) in v.iter().enumerate() {
                let m = rec(c);
                if m == Absent {
                    continue;
                }
                let others = v
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, o)| interval(o, bounds))
                    .fold(Interval::point(1.0), Interval::mul);
                let d = if others.lo >= 0.0 {
                    m
                } else if others.hi <= 0.0 {
                    m.flip()
                } else {
                    NonMonotonic
                };
                acc = acc.combine(d);
            }
            acc
        }
        Expr::Cmp(op, a, b) => {
            let (ma, mb) = (rec(a), rec(b));
            match op {
                CmpOp::Ge | CmpOp::Gt => ma.combine(mb.flip()),
                CmpOp::Le | CmpOp::Lt => ma.flip().combine(mb),
                CmpOp::Eq => {
                    if ma == Absent && mb == Absent {
                        Absent
                    } else {
                        NonMonotonic
                    }
                }
            }
        }
        Expr::Guard(v, b) => rec(v).combine(rec(b)),
    }
}
