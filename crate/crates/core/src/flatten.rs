//! Flattening: rule bodies become one operator over terminals, constraints
//! become primitive.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::ProgramError;
use crate::expr::{CmpOp, Expr};
use crate::monotonicity::{interval, monotonicity, Interval, Monotonicity};
use crate::program::{Access, ArrayDecl, ArrayId, ArrayKind, Constraint, Generator, IndexExpr, Leaf, NgExpr, Program, Rule, RuleId};
use crate::simplify::simplify;
use crate::ujb::{leaf_interval, FoundedAt};
use crate::value::{Value, ValueType};

/// Constants, variable accesses, `-x`, `¬x`, and anything free of decision
/// variables.
pub fn is_terminal(p: &Program, e: &NgExpr) -> bool {
    match e {
        Expr::Const(_) | Expr::Leaf(_) => true,
        Expr::Neg(c) | Expr::Not(c) if matches!(**c, Expr::Leaf(_)) => true,
        _ => !e.any_leaf(&mut |l| p.leaf_is_decision(l)),
    }
}

/// A terminal, or one operator applied to terminals.
pub fn is_flat(p: &Program, e: &NgExpr) -> bool {
    is_terminal(p, e) || e.children().iter().all(|c| is_terminal(p, c))
}

fn bounds<'a>(p: &'a Program, gen: &'a Generator) -> impl Fn(&Leaf) -> Interval + 'a {
    move |l| leaf_interval(p, gen, l, FoundedAt::Domain)
}

/// Value type of an expression.
pub fn expr_type(p: &Program, e: &NgExpr) -> ValueType {
    if e.is_boolean(&|l| p.leaf_is_bool(l)) {
        return ValueType::Bool;
    }
    let mut real = false;
    e.for_each_leaf(&mut |l| {
        if let Leaf::Access(a) = l {
            real |= p.arrays[a.array].ty == ValueType::Real;
        }
    });
    fn has_real<L>(e: &Expr<L>) -> bool {
        matches!(e, Expr::Const(Value::Real(_)) | Expr::Recip(_)) || e.children().into_iter().any(has_real)
    }
    if real || has_real(e) {
        ValueType::Real
    } else {
        ValueType::Int
    }
}

/// Direction of `parent` in its `i`-th argument.
fn position_direction(p: &Program, gen: &Generator, parent: &NgExpr, i: usize) -> Monotonicity {
    use Monotonicity::*;
    let b = bounds(p, gen);
    match parent {
        Expr::Sum(_) | Expr::Max(_) | Expr::Min(_) | Expr::And(_) | Expr::Or(_) | Expr::Guard(..) => Increasing,
        Expr::Neg(_) | Expr::Not(_) => Decreasing,
        Expr::Recip(c) => {
            let iv = interval(c, &b);
            if iv.lo > 0.0 || iv.hi < 0.0 {
                Decreasing
            } else {
                NonMonotonic
            }
        }
        Expr::Product(v) => {
            let others = v
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, o)| interval(o, &b))
                .fold(Interval::point(1.0), Interval::mul);
            if others.lo >= 0.0 {
                Increasing
            } else if others.hi <= 0.0 {
                Decreasing
            } else {
                NonMonotonic
            }
        }
        Expr::Cmp(op, ..) => match (op, i) {
            (CmpOp::Eq, _) => NonMonotonic,
            (CmpOp::Ge | CmpOp::Gt, 0) | (CmpOp::Le | CmpOp::Lt, 1) => Increasing,
            _ => Decreasing,
        },
        Expr::Const(_) | Expr::Leaf(_) => Absent,
    }
}

fn founded_arrays(p: &Program, e: &NgExpr) -> BTreeSet<ArrayId> {
    let mut s = BTreeSet::new();
    e.for_each_leaf(&mut |l| {
        if let Leaf::Access(a) = l {
            if p.arrays[a.array].kind.is_founded() {
                s.insert(a.array);
            }
        }
    });
    s
}

fn path_name(prefix: &str, origin: u32, path: &[u32]) -> String {
    let parts: Vec<String> = path.iter().map(|k| format!("{k}")).collect();
    format!("_{prefix}{origin}_p{}", parts.join("_"))
}

/// Declare an array indexed by the generator's domains, bounded by `e`.
fn introduce(p: &mut Program, name: String, kind: ArrayKind, gen: &Generator, e: &NgExpr) -> Access {
    let ty = expr_type(p, e);
    let iv = interval(e, &bounds(p, gen));
    let (lb, ub) = match ty {
        ValueType::Bool => (Value::FALSE, Value::TRUE),
        _ => (Value::from_f64(iv.lo, ty, true), Value::from_f64(iv.hi, ty, false)),
    };
    let decl = ArrayDecl::new(name, kind, ty, gen.ranges()).with_bounds(lb, ub);
    let id = p.add_array(decl);
    Access::new(id, (0..gen.vars.len()).map(IndexExpr::Var).collect())
}

fn access(a: Access) -> NgExpr {
    Expr::Leaf(Leaf::Access(a))
}

fn unsupported(p: &Program, r: &Rule, reason: String) -> ProgramError {
    ProgramError::UnsupportedRuleForm { rule: format!("{} ({})", r.origin, p.show_rule(r)), reason }
}

/// One flattening step on a non-flat rule: every non-terminal argument of
/// the top operator is replaced by an introduced variable.
pub fn flat_rule(
    p: &mut Program,
    mut r: Rule,
    worklist: &mut VecDeque<Rule>,
    constraints: &mut Vec<Constraint>,
    next_id: &mut u32,
) -> Result<Rule, ProgramError> {
    let body = r.body.clone();
    let n = body.children().len();
    let unary = matches!(body, Expr::Neg(_) | Expr::Not(_) | Expr::Recip(_));
    let mut new_body = body.clone();
    let mut replaced: Vec<(usize, Monotonicity, NgExpr)> = Vec::new();
    for i in 0..n {
        let child = body.children()[i].clone();
        if is_terminal(p, &child) {
            continue;
        }
        let mut path = r.path.clone();
        path.push(i as u32);
        let name = path_name("f", r.origin.0, &path);
        let has_founded = child.any_leaf(&mut |l| p.leaf_is_founded(l));
        let replacement = if !has_founded {
            let t = introduce(p, name, ArrayKind::Standard, &r.gen, &child);
            constraints.push(Constraint { gen: r.gen.clone(), body: Expr::cmp(CmpOp::Eq, access(t.clone()), child.clone()) });
            access(t)
        } else {
            let d = position_direction(p, &r.gen, &body, i);
            let (rule_body, wrap): (NgExpr, fn(NgExpr) -> NgExpr) = match d {
                // A unary decreasing root keeps its operator; the introduced
                // variable takes the argument itself.
                Monotonicity::Decreasing if unary => (child.clone(), |e| e),
                Monotonicity::Increasing => (child.clone(), |e| e),
                Monotonicity::Decreasing => {
                    if child.is_boolean(&|l| p.leaf_is_bool(l)) {
                        (simplify(&Expr::not(child.clone())), Expr::not)
                    } else {
                        (simplify(&Expr::neg(child.clone())), Expr::neg)
                    }
                }
                _ => {
                    return Err(unsupported(p, &r, format!("founded variables in a non-monotonic argument {}", p.show_expr(&child, &r.gen))))
                }
            };
            let y = introduce(p, name, ArrayKind::Founded, &r.gen, &rule_body);
            let id = *next_id;
            *next_id += 1;
            worklist.push_back(Rule { id: RuleId(id), origin: r.origin, path, gen: r.gen.clone(), head: y.clone(), body: rule_body });
            replaced.push((i, d, child.clone()));
            wrap(access(y))
        };
        *new_body.children_mut()[i] = replacement;
    }
    // Shared founded variables must affect the rule in the same direction
    // through the introduced variable and directly.
    for (_, d, child) in &replaced {
        let b = bounds(p, &r.gen);
        for x in founded_arrays(p, child) {
            let is_x = |l: &Leaf| matches!(l, Leaf::Access(a) if a.array == x);
            let outer = monotonicity(&new_body, &is_x, &b);
            let inner = d.compose(monotonicity(child, &is_x, &b));
            if outer != Monotonicity::Absent && inner != Monotonicity::Absent && outer != inner {
                return Err(unsupported(
                    p,
                    &r,
                    format!("{} occurs with different monotonicity inside and outside a subexpression", p.arrays[x].name),
                ));
            }
        }
    }
    r.body = simplify(&new_body);
    Ok(r)
}

/// Flatten every rule (worklist, FIFO) and then every constraint.
pub fn flat(p: &Program) -> Result<Program, ProgramError> {
    let mut out = p.clone();
    out.rules.clear();
    out.constraints.clear();
    let mut src = p.rules.clone();
    src.sort_by_key(|r| r.id);
    let mut worklist: VecDeque<Rule> = src.into();
    let mut constraints = p.constraints.clone();
    let mut next_id = p.next_rule_id();
    while let Some(mut r) = worklist.pop_front() {
        r.body = simplify(&r.body);
        if is_flat(&out, &r.body) {
            check_flat_monotone(&out, &r)?;
            out.rules.push(r);
            continue;
        }
        let done = flat_rule(&mut out, r, &mut worklist, &mut constraints, &mut next_id)?;
        if is_flat(&out, &done.body) {
            check_flat_monotone(&out, &done)?;
            out.rules.push(done);
        } else {
            worklist.push_front(done);
        }
    }
    out.rules.sort_by_key(|r| r.id);
    for (k, c) in constraints.into_iter().enumerate() {
        let parts = cp_flat(&mut out, &c, k);
        out.constraints.extend(parts);
    }
    Ok(out)
}

/// Every founded occurrence in a flat body must be in a monotone position.
fn check_flat_monotone(p: &Program, r: &Rule) -> Result<(), ProgramError> {
    let mut occ: Vec<&Access> = Vec::new();
    r.body.for_each_leaf(&mut |l| {
        if let Leaf::Access(a) = l {
            if p.arrays[a.array].kind.is_founded() && !occ.contains(&a) {
                occ.push(a);
            }
        }
    });
    let b = bounds(p, &r.gen);
    for a in occ {
        let m = monotonicity(&r.body, &|l| matches!(l, Leaf::Access(x) if x == a), &b);
        if m == Monotonicity::NonMonotonic {
            return Err(unsupported(p, r, format!("non-monotonic in {}", p.show_access(a, &r.gen))));
        }
    }
    Ok(())
}

/// Classic CP flattening: nested subexpressions become standard variables
/// with defining equalities. Top-level conjunctions are split.
pub fn cp_flat(p: &mut Program, c: &Constraint, k: usize) -> Vec<Constraint> {
    let body = simplify(&c.body);
    let parts = match body {
        Expr::And(v) => v,
        other => vec![other],
    };
    let split = parts.len() > 1;
    let mut out = Vec::new();
    for (j, part) in parts.into_iter().enumerate() {
        let path = if split { vec![j as u32] } else { Vec::new() };
        let mut cx = CpCtx { p: &mut *p, gen: &c.gen, k, out: Vec::new() };
        let prim = cx.prim(part, path);
        let mut defs = cx.out;
        out.push(Constraint { gen: c.gen.clone(), body: prim });
        out.append(&mut defs);
    }
    out
}

struct CpCtx<'a> {
    p: &'a mut Program,
    gen: &'a Generator,
    k: usize,
    out: Vec<Constraint>,
}

impl CpCtx<'_> {
    fn prim(&mut self, e: NgExpr, path: Vec<u32>) -> NgExpr {
        match e {
            Expr::Cmp(op, a, b) => {
                let a2 = self.height_one(*a, sub(&path, 0));
                let mut b2 = self.height_one(*b, sub(&path, 1));
                if !is_terminal(self.p, &a2) && !is_terminal(self.p, &b2) {
                    b2 = self.intro(b2, sub(&path, 1));
                }
                Expr::Cmp(op, alloc::boxed::Box::new(a2), alloc::boxed::Box::new(b2))
            }
            e => self.height_one(e, path),
        }
    }

    /// Replace every non-terminal argument of `e` by an introduced variable.
    fn height_one(&mut self, mut e: NgExpr, path: Vec<u32>) -> NgExpr {
        if is_terminal(self.p, &e) {
            return e;
        }
        let n = e.children().len();
        for i in 0..n {
            let child = e.children()[i].clone();
            if !is_terminal(self.p, &child) {
                *e.children_mut()[i] = self.intro(child, sub(&path, i as u32));
            }
        }
        e
    }

    fn intro(&mut self, e: NgExpr, path: Vec<u32>) -> NgExpr {
        let name = path_name("c", self.k as u32, &path);
        let t = introduce(self.p, name, ArrayKind::Standard, self.gen, &e);
        let def = self.prim(Expr::cmp(CmpOp::Eq, access(t.clone()), e), path);
        self.out.push(Constraint { gen: self.gen.clone(), body: def });
        access(t)
    }
}

fn sub(path: &[u32], i: u32) -> Vec<u32> {
    let mut p = path.to_vec();
    p.push(i);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn scalar(p: &mut Program, name: &str, kind: ArrayKind, lb: i64, ub: i64) -> NgExpr {
        let id = p.add_array(ArrayDecl::new(name, kind, ValueType::Int, vec![]).with_bounds(Value::Int(lb), Value::Int(ub)));
        access(Access::scalar(id))
    }

    fn head(p: &Program, name: &str) -> Access {
        Access::scalar(p.array_id(name).unwrap())
    }

    fn shown(p: &Program) -> Vec<String> {
        let mut v: Vec<String> = p.rules.iter().map(|r| p.show_rule(r)).collect();
        v.extend(p.constraints.iter().map(|c| p.show_expr(&c.body, &c.gen)));
        v
    }

    #[test]
    fn nested_example() {
        // y >= x1 + min(x2, x3 - x4) - x5^2
        let mut p = Program::new();
        let y = scalar(&mut p, "y", ArrayKind::Founded, -100, 100);
        let _ = y;
        let x1 = scalar(&mut p, "x1", ArrayKind::Founded, 0, 3);
        let x2 = scalar(&mut p, "x2", ArrayKind::Founded, 0, 3);
        let x3 = scalar(&mut p, "x3", ArrayKind::Standard, 0, 3);
        let x4 = scalar(&mut p, "x4", ArrayKind::Standard, 0, 3);
        let x5 = scalar(&mut p, "x5", ArrayKind::Founded, 0, 3);
        let body = Expr::Sum(vec![
            x1,
            Expr::Min(vec![x2, Expr::Sum(vec![x3, Expr::neg(x4)])]),
            Expr::neg(Expr::Product(vec![x5.clone(), x5])),
        ]);
        p.rules.push(Rule::new(0, Generator::empty(), head(&p, "y"), body));
        let f = flat(&p).unwrap();
        assert_eq!(
            shown(&f),
            vec![
                "y >= sum(x1, _f0_p1, _f0_p2)".to_string(),
                "_f0_p1 >= min(x2, _f0_p1_1)".to_string(),
                "_f0_p2 >= prod(-1, x5, x5)".to_string(),
                "eq(_f0_p1_1, sum(x3, neg(x4)))".to_string(),
            ]
        );
        let i1 = f.array(f.array_id("_f0_p1").unwrap());
        let i3 = f.array(f.array_id("_f0_p1_1").unwrap());
        assert_eq!(i1.kind, ArrayKind::Founded);
        assert_eq!(i3.kind, ArrayKind::Standard);
        assert_eq!((i3.lb, i3.ub), (Value::Int(-3), Value::Int(3)));
        for r in &f.rules {
            assert!(is_flat(&f, &r.body));
        }
    }

    #[test]
    fn decreasing_argument_gets_negated_variable() {
        // y >= x1 - max(x2, x3)
        let mut p = Program::new();
        scalar(&mut p, "y", ArrayKind::Founded, -10, 10);
        let x1 = scalar(&mut p, "x1", ArrayKind::Founded, 0, 3);
        let x2 = scalar(&mut p, "x2", ArrayKind::Founded, 0, 3);
        let x3 = scalar(&mut p, "x3", ArrayKind::Founded, 0, 3);
        let body = Expr::Sum(vec![x1, Expr::neg(Expr::Max(vec![x2, x3]))]);
        p.rules.push(Rule::new(0, Generator::empty(), head(&p, "y"), body));
        let f = flat(&p).unwrap();
        assert_eq!(
            shown(&f),
            vec!["y >= sum(x1, _f0_p1)".to_string(), "_f0_p1 >= min(neg(x2), neg(x3))".to_string()]
        );
    }

    #[test]
    fn abs_of_founded_spanning_zero_is_rejected() {
        let mut p = Program::new();
        scalar(&mut p, "y", ArrayKind::Founded, 0, 10);
        let x = scalar(&mut p, "x", ArrayKind::Founded, -2, 2);
        p.rules.push(Rule::new(0, Generator::empty(), head(&p, "y"), Expr::Max(vec![x.clone(), Expr::neg(x)])));
        assert!(matches!(flat(&p), Err(ProgramError::UnsupportedRuleForm { .. })));
    }

    #[test]
    fn flat_program_is_unchanged() {
        let mut p = Program::new();
        scalar(&mut p, "y", ArrayKind::Founded, 0, 10);
        let x = scalar(&mut p, "x", ArrayKind::Founded, 0, 2);
        p.rules.push(Rule::new(0, Generator::empty(), head(&p, "y"), Expr::Sum(vec![x, Expr::int(3)])));
        let f = flat(&p).unwrap();
        assert_eq!(f, p);
    }

    #[test]
    fn unary_root_introduces_positive_variable() {
        // y >= -(x1 + x2) would loop if the argument were negated again.
        let mut p = Program::new();
        scalar(&mut p, "y", ArrayKind::Founded, -10, 10);
        let x1 = scalar(&mut p, "x1", ArrayKind::Founded, 0, 3);
        let x2 = scalar(&mut p, "x2", ArrayKind::Founded, 0, 3);
        let body = Expr::neg(Expr::Product(vec![x1, x2]));
        p.rules.push(Rule::new(0, Generator::empty(), head(&p, "y"), body));
        // simplify pushes the negation into the product, which is flat
        let f = flat(&p).unwrap();
        assert_eq!(shown(&f), vec!["y >= prod(-1, x1, x2)".to_string()]);
        let mut q = Program::new();
        scalar(&mut q, "y", ArrayKind::Founded, -10, 10);
        let z = scalar(&mut q, "z", ArrayKind::Founded, 1, 3);
        q.rules.push(Rule::new(0, Generator::empty(), head(&q, "y"), Expr::Recip(alloc::boxed::Box::new(Expr::Sum(vec![z.clone(), z])))));
        let f = flat(&q).unwrap();
        assert_eq!(shown(&f), vec!["y >= inv(_f0_p0)".to_string(), "_f0_p0 >= sum(z, z)".to_string()]);
    }

    #[test]
    fn cp_flat_counts() {
        let mut p = Program::new();
        let x1 = scalar(&mut p, "x1", ArrayKind::Standard, 0, 3);
        let x2 = scalar(&mut p, "x2", ArrayKind::Standard, 0, 3);
        let x3 = scalar(&mut p, "x3", ArrayKind::Standard, 0, 3);
        let c = Constraint { gen: Generator::empty(), body: Expr::cmp(CmpOp::Ge, Expr::Sum(vec![x1.clone(), x2.clone()]), Expr::int(3)) };
        assert_eq!(cp_flat(&mut p, &c, 0).len(), 1);
        let c = Constraint {
            gen: Generator::empty(),
            body: Expr::cmp(CmpOp::Ge, Expr::Product(vec![Expr::Sum(vec![x1, x2]), x3]), Expr::int(1)),
        };
        let out = cp_flat(&mut p, &c, 1);
        let shown: Vec<String> = out.iter().map(|c| p.show_expr(&c.body, &c.gen)).collect();
        assert_eq!(shown, vec!["ge(prod(_c1_p0_0, x3), 1)".to_string(), "eq(_c1_p0_0, sum(x1, x2))".to_string()]);
        let a = scalar(&mut p, "a", ArrayKind::Standard, 0, 3);
        let b = scalar(&mut p, "b", ArrayKind::Standard, 0, 3);
        let cc = scalar(&mut p, "c", ArrayKind::Standard, 0, 3);
        let d = scalar(&mut p, "d", ArrayKind::Standard, 0, 3);
        let c = Constraint {
            gen: Generator::empty(),
            body: Expr::cmp(CmpOp::Eq, Expr::Min(vec![Expr::Max(vec![a, b]), cc]), d),
        };
        assert_eq!(cp_flat(&mut p, &c, 2).len(), 2);
    }

    #[test]
    fn flattening_is_deterministic() {
        let mut p = Program::new();
        scalar(&mut p, "y", ArrayKind::Founded, -10, 10);
        let x1 = scalar(&mut p, "x1", ArrayKind::Founded, 0, 3);
        let x2 = scalar(&mut p, "x2", ArrayKind::Standard, 0, 3);
        let body = Expr::Max(vec![Expr::Sum(vec![x1.clone(), x2.clone()]), Expr::Min(vec![x1, Expr::Sum(vec![x2, Expr::int(1)])])]);
        p.rules.push(Rule::new(0, Generator::empty(), head(&p, "y"), body));
        assert_eq!(flat(&p).unwrap(), flat(&p).unwrap());
    }
}
