//! Grounding conditions: when can an instance of a flat rule lift its head
//! above the head's ujb?

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::ProgramError;
use crate::expr::Expr;
use crate::monotonicity::{interval, monotonicity, Monotonicity};
use crate::program::{Access, Leaf, NgExpr, Program, Rule};
use crate::ujb::{leaf_interval, FoundedAt, UjbMap};

/// `created(x[l(i)])` atoms combined in one of four shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    True,
    False,
    Conj(Vec<Access>),
    Disj(Vec<Access>),
}

impl Condition {
    /// Disjunctive normal form: each clause is a conjunction of atoms.
    pub fn clauses(&self) -> Vec<Vec<Access>> {
        match self {
            Condition::True => vec![Vec::new()],
            Condition::False => Vec::new(),
            Condition::Conj(a) => vec![a.clone()],
            Condition::Disj(a) => a.iter().map(|x| vec![x.clone()]).collect(),
        }
    }

    pub fn atoms(&self) -> Vec<Access> {
        match self {
            Condition::Conj(a) | Condition::Disj(a) => a.clone(),
            _ => Vec::new(),
        }
    }

    fn conj(atoms: Vec<Access>) -> Condition {
        let atoms = dedup(atoms);
        if atoms.is_empty() {
            Condition::True
        } else {
            Condition::Conj(atoms)
        }
    }

    fn disj(atoms: Vec<Access>) -> Condition {
        let atoms = dedup(atoms);
        if atoms.is_empty() {
            Condition::False
        } else {
            Condition::Disj(atoms)
        }
    }

    pub fn show(&self, p: &Program, r: &Rule) -> String {
        let list = |v: &Vec<Access>, sep: &str| {
            let parts: Vec<String> = v.iter().map(|a| format!("created({})", p.show_access(a, &r.gen))).collect();
            parts.join(sep)
        };
        match self {
            Condition::True => "true".into(),
            Condition::False => "false".into(),
            Condition::Conj(v) => list(v, " & "),
            Condition::Disj(v) => list(v, " | "),
        }
    }
}

fn dedup(v: Vec<Access>) -> Vec<Access> {
    let mut out: Vec<Access> = Vec::new();
    for a in v {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

/// Argument summary: upper bound when nothing founded in it is created, and
/// the created-atom that can raise it.
struct Arg {
    upper: f64,
    atom: Option<Access>,
}

fn founded_access<'a>(p: &Program, e: &'a NgExpr) -> Option<&'a Access> {
    match e {
        Expr::Leaf(Leaf::Access(a)) if p.arrays[a.array].kind.is_founded() => Some(a),
        _ => None,
    }
}

fn arg(p: &Program, r: &Rule, ujbs: &UjbMap, e: &NgExpr) -> Arg {
    let upper = interval(e, &|l| leaf_interval(p, &r.gen, l, FoundedAt::Point(ujbs))).hi;
    Arg { upper, atom: founded_access(p, e).cloned() }
}

fn unmatched(p: &Program, r: &Rule, reason: &str) -> ProgramError {
    ProgramError::UnmatchedRuleForm { rule: format!("{} ({})", r.id, p.show_rule(r)), reason: reason.into() }
}

pub fn grounding_condition(p: &Program, r: &Rule, ujbs: &UjbMap) -> Result<Condition, ProgramError> {
    let head_ujb = ujbs.get(&r.head.array).map_or(f64::NEG_INFINITY, |v| v.to_f64());
    let args = |v: &Vec<NgExpr>| v.iter().map(|e| arg(p, r, ujbs, e)).collect::<Vec<_>>();
    Ok(match &r.body {
        Expr::Sum(v) => {
            let a = args(v);
            let total = if a.iter().any(|x| x.upper == f64::NEG_INFINITY) {
                f64::NEG_INFINITY
            } else {
                a.iter().map(|x| x.upper).sum()
            };
            if total > head_ujb {
                Condition::True
            } else {
                let mut required = Vec::new();
                for x in &a {
                    if x.upper == f64::NEG_INFINITY {
                        match &x.atom {
                            Some(at) => required.push(at.clone()),
                            None => return Ok(Condition::False),
                        }
                    }
                }
                if required.is_empty() {
                    Condition::disj(a.into_iter().filter_map(|x| x.atom).collect())
                } else {
                    Condition::conj(required)
                }
            }
        }
        Expr::Max(v) | Expr::Or(v) => {
            let a = args(v);
            if a.iter().any(|x| x.upper > head_ujb) {
                Condition::True
            } else {
                Condition::disj(a.into_iter().filter_map(|x| x.atom).collect())
            }
        }
        Expr::Min(v) | Expr::And(v) => {
            let mut need = Vec::new();
            for x in args(v) {
                if x.upper > head_ujb {
                    continue;
                }
                match x.atom {
                    Some(at) => need.push(at),
                    None => return Ok(Condition::False),
                }
            }
            Condition::conj(need)
        }
        Expr::Guard(val, cond) => {
            let (va, ca) = (arg(p, r, ujbs, val), arg(p, r, ujbs, cond));
            let (c_ok, v_ok) = (ca.upper >= 1.0, va.upper > head_ujb);
            let mut need = Vec::new();
            for (x, ok) in [(ca, c_ok), (va, v_ok)] {
                if !ok {
                    match x.atom {
                        Some(at) => need.push(at),
                        None => return Ok(Condition::False),
                    }
                }
            }
            Condition::conj(need)
        }
        Expr::Product(v) => {
            for e in v {
                let lo = interval(e, &|l| leaf_interval(p, &r.gen, l, FoundedAt::Justified(ujbs))).lo;
                if lo <= 0.0 {
                    return Err(unmatched(p, r, "product factors are not provably positive"));
                }
            }
            let a = args(v);
            let prod: f64 = a.iter().map(|x| x.upper).product();
            if prod > head_ujb {
                Condition::True
            } else {
                Condition::disj(a.into_iter().filter_map(|x| x.atom).collect())
            }
        }
        body => {
            // Terminals, unary operators over a terminal, comparisons.
            let upper = interval(body, &|l| leaf_interval(p, &r.gen, l, FoundedAt::Point(ujbs))).hi;
            if upper > head_ujb {
                Condition::True
            } else {
                let mut atoms = Vec::new();
                body.for_each_leaf(&mut |l| {
                    if let Leaf::Access(a) = l {
                        if p.arrays[a.array].kind.is_founded() {
                            atoms.push(a.clone());
                        }
                    }
                });
                let b = |l: &Leaf| leaf_interval(p, &r.gen, l, FoundedAt::Domain);
                let mut keep = Vec::new();
                for a in atoms {
                    let m = monotonicity(body, &|l| matches!(l, Leaf::Access(x) if *x == a), &b);
                    match m {
                        Monotonicity::Increasing => keep.push(a),
                        Monotonicity::NonMonotonic => return Err(unmatched(p, r, "non-monotonic founded argument")),
                        _ => {}
                    }
                }
                Condition::disj(keep)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{ArrayDecl, ArrayKind, Generator, IndexExpr, IndexRange};
    use crate::value::{Value, ValueType};
    use alloc::collections::BTreeMap;

    fn arr(p: &mut Program, name: &str, kind: ArrayKind, ty: ValueType) -> usize {
        let d = ArrayDecl::new(name, kind, ty, vec![IndexRange::new(1, 10)]);
        let d = if ty == ValueType::Int { d.with_bounds(Value::Int(0), Value::Int(20)) } else { d };
        p.add_array(d)
    }

    fn at(a: usize, k: i64) -> Access {
        Access::new(a, vec![IndexExpr::offset(0, k)])
    }

    fn leaf(a: Access) -> NgExpr {
        Expr::Leaf(Leaf::Access(a))
    }

    fn gen() -> Generator {
        Generator::new(vec![("i".into(), IndexRange::new(2, 10))], None)
    }

    #[test]
    fn sum_with_low_ujbs_is_disjunctive() {
        let mut p = Program::new();
        let a = arr(&mut p, "a", ArrayKind::Founded, ValueType::Int);
        let b = arr(&mut p, "b", ArrayKind::Founded, ValueType::Int);
        let y = arr(&mut p, "y", ArrayKind::Founded, ValueType::Int);
        let r = Rule::new(0, gen(), at(a, 0), Expr::Sum(vec![leaf(at(b, -1)), leaf(at(y, 0))]));
        let u: UjbMap = BTreeMap::from([(a, Value::Int(5)), (b, Value::Int(2)), (y, Value::Int(1))]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::Disj(vec![at(b, -1), at(y, 0)]));
        let u: UjbMap = BTreeMap::from([(a, Value::Int(2)), (b, Value::Int(2)), (y, Value::Int(1))]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::True);
    }

    #[test]
    fn min_needs_only_the_low_argument() {
        let mut p = Program::new();
        let x = arr(&mut p, "x", ArrayKind::Founded, ValueType::Int);
        let c = arr(&mut p, "c", ArrayKind::Founded, ValueType::Int);
        let d = arr(&mut p, "d", ArrayKind::Founded, ValueType::Int);
        let r = Rule::new(0, gen(), at(x, 0), Expr::Min(vec![leaf(at(c, 0)), leaf(at(d, 0))]));
        let u: UjbMap = BTreeMap::from([(x, Value::Int(1)), (c, Value::Int(7)), (d, Value::Int(1))]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::Conj(vec![at(d, 0)]));
    }

    #[test]
    fn negated_founded_boolean_is_unconditional() {
        let mut p = Program::new();
        let y = arr(&mut p, "y", ArrayKind::Founded, ValueType::Bool);
        let x = arr(&mut p, "x", ArrayKind::Founded, ValueType::Bool);
        let r = Rule::new(0, gen(), at(y, 0), Expr::not(leaf(at(x, 0))));
        let u: UjbMap = BTreeMap::from([(x, Value::FALSE), (y, Value::FALSE)]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::True);
    }

    #[test]
    fn negated_founded_numeric_uses_its_lower_bound() {
        // y >= -x with x in [0,20], ujb(x) = 3, ujb(y) = -3: -x <= -3 always.
        let mut p = Program::new();
        let y = p.add_array(
            ArrayDecl::new("y", ArrayKind::Founded, ValueType::Int, vec![IndexRange::new(1, 10)])
                .with_bounds(Value::Int(-20), Value::Int(0)),
        );
        let x = arr(&mut p, "x", ArrayKind::Founded, ValueType::Int);
        let r = Rule::new(0, gen(), at(y, 0), Expr::neg(leaf(at(x, 0))));
        let u: UjbMap = BTreeMap::from([(x, Value::Int(3)), (y, Value::Int(-3))]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::False);
    }

    #[test]
    fn guard_over_standard_boolean() {
        // c[i] >= 10 <- s1[i]
        let mut p = Program::new();
        let c = arr(&mut p, "c", ArrayKind::Founded, ValueType::Int);
        let s1 = arr(&mut p, "s1", ArrayKind::Standard, ValueType::Bool);
        let r = Rule::new(0, gen(), at(c, 0), Expr::guard(Expr::int(10), leaf(at(s1, 0))));
        let u: UjbMap = BTreeMap::from([(c, Value::Int(0))]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::True);
        let b = arr(&mut p, "b", ArrayKind::Founded, ValueType::Bool);
        let r = Rule::new(1, gen(), at(c, 0), Expr::guard(Expr::int(10), leaf(at(b, 0))));
        let u: UjbMap = BTreeMap::from([(c, Value::Int(0)), (b, Value::FALSE)]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::Conj(vec![at(b, 0)]));
    }

    #[test]
    fn product_needs_positive_factors() {
        let mut p = Program::new();
        let y = arr(&mut p, "y", ArrayKind::Founded, ValueType::Int);
        let x = arr(&mut p, "x", ArrayKind::Founded, ValueType::Int);
        let r = Rule::new(0, gen(), at(y, 0), Expr::Product(vec![leaf(at(x, 0)), Expr::int(2)]));
        let u: UjbMap = BTreeMap::from([(x, Value::Int(0)), (y, Value::Int(0))]);
        assert!(matches!(grounding_condition(&p, &r, &u), Err(ProgramError::UnmatchedRuleForm { .. })));
        let u: UjbMap = BTreeMap::from([(x, Value::Int(1)), (y, Value::Int(5))]);
        assert_eq!(grounding_condition(&p, &r, &u).unwrap(), Condition::Disj(vec![at(x, 0)]));
    }

    #[test]
    fn dnf_shapes() {
        assert_eq!(Condition::True.clauses().len(), 1);
        assert_eq!(Condition::False.clauses().len(), 0);
        assert_eq!(Condition::Conj(vec![at(0, 0), at(1, 0)]).clauses().len(), 1);
        assert_eq!(Condition::Disj(vec![at(0, 0), at(1, 0)]).clauses().len(), 2);
    }
}
