//! Brute-force reference semantics over ground programs: reducts, minimal
//! solutions, stability, enumeration and optimization.
//!
//! Every variable must have finite bounds and Boolean or integer type.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::error::EvalError;
use crate::expr::Expr;
use crate::ground::{GExpr, GroundProgram, VarDecl, VarId};
use crate::monotonicity::{interval, monotonicity, Interval, Monotonicity};
use crate::simplify::simplify;
use crate::value::{Value, ValueType};

pub const DEFAULT_CAP: u64 = 1_000_000;

/// Total valuation indexed by `VarId`.
pub type Assignment = Vec<Value>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("no stable solution")]
    Infeasible,
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("variable {0} needs finite bounds and a Boolean or integer type")]
    Unbounded(String),
    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),
}

/// Positive-CP left by a reduct: one `head >= body` per rule, where the body
/// mentions only variables it is increasing in.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PositiveCp {
    pub rules: Vec<(VarId, GExpr)>,
}

impl PositiveCp {
    pub fn show(&self, g: &GroundProgram) -> Vec<String> {
        self.rules.iter().map(|(h, b)| alloc::format!("{} >= {}", g.var(*h).name, g.show(b))).collect()
    }
}

fn bounds_of(d: &VarDecl) -> Interval {
    Interval::new(d.lb.to_f64(), d.ub.to_f64())
}

/// Every value of a variable's domain, ascending.
pub fn domain(d: &VarDecl) -> Result<Vec<Value>, OracleError> {
    match (d.ty, d.lb, d.ub) {
        (ValueType::Bool, lb, ub) => {
            let lo = lb.num_cmp(&Value::Int(0)).is_gt();
            let hi = ub.num_cmp(&Value::Int(1)).is_ge();
            Ok([false, true].into_iter().filter(|&b| (b || !lo) && (!b || hi)).map(Value::Bool).collect())
        }
        (ValueType::Int, Value::Int(lo), Value::Int(hi)) => Ok((lo..=hi).map(Value::Int).collect()),
        _ => Err(OracleError::Unbounded(d.name.clone())),
    }
}

fn in_domain(d: &VarDecl, v: Value) -> bool {
    let typed = match d.ty {
        ValueType::Bool => matches!(v, Value::Bool(_)),
        ValueType::Int => matches!(v, Value::Int(_)),
        ValueType::Real => false,
    };
    typed && v.num_cmp(&d.lb).is_ge() && v.num_cmp(&d.ub).is_le()
}

pub fn eval(g: &GroundProgram, e: &GExpr, theta: &[Value]) -> Result<Value, EvalError> {
    e.eval(&|v: &VarId| Ok(theta[v.idx()]), &|v: &VarId| g.is_bool(v))
}

fn holds(g: &GroundProgram, e: &GExpr, theta: &[Value]) -> Result<bool, EvalError> {
    match eval(g, e, theta)? {
        Value::Bool(b) => Ok(b),
        _ => Err(EvalError::Type("constraint is not Boolean")),
    }
}

/// Direction of `body` in `x`, using declared bounds for sign reasoning.
pub fn direction(g: &GroundProgram, body: &GExpr, x: VarId) -> Monotonicity {
    monotonicity(body, &|v: &VarId| *v == x, &|v: &VarId| bounds_of(g.var(*v)))
}

// Drop neutral constants left behind by substitution.
fn prune(e: GExpr) -> GExpr {
    let strip = |v: Vec<GExpr>, neutral: Value| -> Vec<GExpr> {
        let kept: Vec<GExpr> = v.into_iter().map(prune).filter(|c| !matches!(c, Expr::Const(k) if *k == neutral)).collect();
        kept
    };
    match e {
        Expr::And(v) => {
            let k = strip(v, Value::TRUE);
            if k.is_empty() {
                Expr::Const(Value::TRUE)
            } else {
                Expr::And(k)
            }
        }
        Expr::Or(v) => {
            let k = strip(v, Value::FALSE);
            if k.is_empty() {
                Expr::Const(Value::FALSE)
            } else {
                Expr::Or(k)
            }
        }
        Expr::Sum(v) => {
            let k = strip(v, Value::Int(0));
            if k.is_empty() {
                Expr::int(0)
            } else {
                Expr::Sum(k)
            }
        }
        Expr::Neg(c) => Expr::neg(prune(*c)),
        Expr::Not(c) => Expr::not(prune(*c)),
        Expr::Guard(a, b) => Expr::guard(prune(*a), prune(*b)),
        Expr::Cmp(op, a, b) => Expr::cmp(op, prune(*a), prune(*b)),
        other => other,
    }
}

/// Reduct of `g` with respect to `theta`.
///
/// Standard variables and founded variables the body is not increasing in
/// are replaced by their value, the head included. With `drop_tautologies`,
/// rules whose body can never rise above the bottom of its type are left out.
pub fn reduct(g: &GroundProgram, theta: &[Value], drop_tautologies: bool) -> PositiveCp {
    let mut cp = PositiveCp::default();
    for r in &g.rules {
        let keep: BTreeSet<VarId> = r
            .body
            .leaves()
            .into_iter()
            .copied()
            .filter(|&v| g.var(v).founded && direction(g, &r.body, v) == Monotonicity::Increasing)
            .collect();
        let body = r
            .body
            .map_leaves(&mut |v: &VarId| Ok::<_, ()>(if keep.contains(v) { Expr::Leaf(*v) } else { Expr::Const(theta[v.idx()]) }))
            .unwrap();
        let body = simplify(&prune(simplify(&body)));
        if drop_tautologies {
            let hi = interval(&body, &|v: &VarId| bounds_of(g.var(*v))).hi;
            let bottom = if body.is_boolean(&|v: &VarId| g.is_bool(v)) { 0.0 } else { f64::NEG_INFINITY };
            if hi <= bottom {
                continue;
            }
        }
        cp.rules.push((r.head, body));
    }
    cp
}

/// Least assignment satisfying `cp`, with every variable `cp` does not
/// mention as a head left at `base` for standard variables and at its lower
/// bound for founded ones.
pub fn minimal_solution(g: &GroundProgram, cp: &PositiveCp, base: &[Value]) -> Result<Assignment, OracleError> {
    let mut theta: Assignment = g.vars.iter().zip(base).map(|(d, v)| if d.founded { d.lb } else { *v }).collect();
    loop {
        let mut changed = false;
        for (h, body) in &cp.rules {
            let d = g.var(*h);
            let want = eval(g, body, &theta)?;
            if want.num_cmp(&theta[h.idx()]).is_gt() {
                let next = want.ceil_to(d.ty);
                if next.num_cmp(&d.ub).is_gt() {
                    return Err(OracleError::Infeasible);
                }
                theta[h.idx()] = next;
                changed = true;
            }
        }
        if !changed {
            return Ok(theta);
        }
    }
}

/// Domains, constraints and rules all hold under `theta`.
pub fn satisfies(g: &GroundProgram, theta: &[Value]) -> Result<bool, OracleError> {
    if theta.len() != g.vars.len() || g.vars.iter().zip(theta).any(|(d, v)| !in_domain(d, *v)) {
        return Ok(false);
    }
    for c in &g.constraints {
        if !holds(g, &c.body, theta)? {
            return Ok(false);
        }
    }
    for r in &g.rules {
        if eval(g, &r.body, theta)?.num_cmp(&theta[r.head.idx()]).is_gt() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_stable(g: &GroundProgram, theta: &[Value]) -> Result<bool, OracleError> {
    if !satisfies(g, theta)? {
        return Ok(false);
    }
    match minimal_solution(g, &reduct(g, theta, true), theta) {
        Ok(m) => Ok(g.vars.iter().zip(m.iter().zip(theta)).all(|(d, (a, b))| !d.founded || a.num_eq(b))),
        Err(OracleError::Infeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Variables whose value a stable solution cannot recover from the others:
/// standard variables and founded variables some rule is not increasing in.
pub fn guessed_vars(g: &GroundProgram) -> Vec<VarId> {
    let mut out = BTreeSet::new();
    for (i, d) in g.vars.iter().enumerate() {
        if !d.founded {
            out.insert(VarId(i as u32));
        }
    }
    for r in &g.rules {
        for &v in r.body.leaves() {
            if g.var(v).founded && direction(g, &r.body, v) != Monotonicity::Increasing {
                out.insert(v);
            }
        }
    }
    out.into_iter().collect()
}

// Odometer over the product of the given domains.
fn for_each_product(
    doms: &[Vec<Value>],
    cap: u64,
    f: &mut impl FnMut(&[Value]) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    let size = doms.iter().map(|d| d.len() as u128).product::<u128>();
    if size > cap as u128 {
        return Err(OracleError::CapExceeded { size, cap });
    }
    if size == 0 {
        return Ok(());
    }
    let mut ix = alloc::vec![0usize; doms.len()];
    let mut cur: Vec<Value> = doms.iter().map(|d| d[0]).collect();
    loop {
        f(&cur)?;
        let mut k = doms.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            ix[k] += 1;
            if ix[k] < doms[k].len() {
                cur[k] = doms[k][ix[k]];
                break;
            }
            ix[k] = 0;
            cur[k] = doms[k][0];
        }
    }
}

fn check_domains(g: &GroundProgram) -> Result<Vec<Vec<Value>>, OracleError> {
    g.vars.iter().map(domain).collect()
}

/// All stable solutions, sorted. Only the guessed variables are enumerated;
/// the rest follow from the minimal solution of the reduct.
pub fn enumerate_stable(g: &GroundProgram, cap: u64) -> Result<Vec<Assignment>, OracleError> {
    let doms = check_domains(g)?;
    let guessed = guessed_vars(g);
    let gdoms: Vec<Vec<Value>> = guessed.iter().map(|v| doms[v.idx()].clone()).collect();
    let base: Assignment = g.vars.iter().map(|d| d.lb).collect();
    let mut out = BTreeSet::new();
    for_each_product(&gdoms, cap, &mut |vals| {
        let mut theta = base.clone();
        for (v, x) in guessed.iter().zip(vals) {
            theta[v.idx()] = *x;
        }
        let m = match minimal_solution(g, &reduct(g, &theta, true), &theta) {
            Ok(m) => m,
            Err(OracleError::Infeasible) => return Ok(()),
            Err(e) => return Err(e),
        };
        if guessed.iter().all(|v| m[v.idx()].num_eq(&theta[v.idx()])) && is_stable(g, &m)? {
            out.insert(m);
        }
        Ok(())
    })?;
    Ok(out.into_iter().collect())
}

/// All stable solutions by testing every total assignment.
pub fn enumerate_naive(g: &GroundProgram, cap: u64) -> Result<Vec<Assignment>, OracleError> {
    let doms = check_domains(g)?;
    let mut out = Vec::new();
    for_each_product(&doms, cap, &mut |vals| {
        if is_stable(g, vals)? {
            out.push(vals.to_vec());
        }
        Ok(())
    })?;
    Ok(out)
}

/// Stable solution with the least objective value; ties go to the
/// lexicographically smallest assignment.
pub fn optimize(g: &GroundProgram, cap: u64) -> Result<(Assignment, Value), OracleError> {
    let mut best: Option<(Assignment, Value)> = None;
    for theta in enumerate_stable(g, cap)? {
        let val = match &g.objective {
            Some(o) => eval(g, o, &theta)?,
            None => Value::Int(0),
        };
        if best.as_ref().is_none_or(|(_, b)| val.num_cmp(b).is_lt()) {
            best = Some((theta, val));
        }
    }
    best.ok_or(OracleError::Infeasible)
}

/// Assignment keyed by variable name.
pub fn named(g: &GroundProgram, theta: &[Value]) -> BTreeMap<String, Value> {
    g.vars.iter().zip(theta).map(|(d, v)| (d.name.clone(), *v)).collect()
}

/// Restriction of `theta` to the named variables.
pub fn restrict(g: &GroundProgram, theta: &[Value], keep: &BTreeSet<String>) -> BTreeMap<String, Value> {
    named(g, theta).into_iter().filter(|(n, _)| keep.contains(n)).collect()
}

/// Stable solutions restricted to `keep`, as a set.
pub fn stable_set(g: &GroundProgram, keep: &BTreeSet<String>, cap: u64) -> Result<BTreeSet<BTreeMap<String, Value>>, OracleError> {
    Ok(enumerate_stable(g, cap)?.iter().map(|t| restrict(g, t, keep)).collect())
}

pub fn var_names(g: &GroundProgram) -> BTreeSet<String> {
    g.vars.iter().map(|d| d.name.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::CmpOp;
    use crate::ground::GroundRule;
    use alloc::vec;
    use proptest::prelude::*;

    fn var(g: &mut GroundProgram, name: &str, founded: bool, ty: ValueType, lb: Value, ub: Value) -> VarId {
        g.add_var(VarDecl { name: name.into(), founded, ty, lb, ub, ujb: None, origin: None })
    }

    fn int(g: &mut GroundProgram, name: &str, founded: bool, lo: i64, hi: i64) -> VarId {
        var(g, name, founded, ValueType::Int, Value::Int(lo), Value::Int(hi))
    }

    fn boolean(g: &mut GroundProgram, name: &str, founded: bool) -> VarId {
        var(g, name, founded, ValueType::Bool, Value::FALSE, Value::TRUE)
    }

    fn rule(g: &mut GroundProgram, head: VarId, body: GExpr) {
        g.rules.push(GroundRule { head, body, source: None });
    }

    fn l(v: VarId) -> GExpr {
        Expr::Leaf(v)
    }

    struct Ex1 {
        g: GroundProgram,
        s: VarId,
        a: VarId,
        b: VarId,
        x: VarId,
        y: VarId,
    }

    fn example1() -> Ex1 {
        let mut g = GroundProgram::new();
        let s = int(&mut g, "s", false, 3, 9);
        let a = int(&mut g, "a", true, 0, 20);
        let b = int(&mut g, "b", true, 0, 10);
        let x = boolean(&mut g, "x", true);
        let y = boolean(&mut g, "y", true);
        rule(&mut g, a, Expr::int(0));
        rule(&mut g, b, Expr::int(0));
        rule(&mut g, a, Expr::Sum(vec![l(b), l(s)]));
        rule(&mut g, b, Expr::guard(Expr::int(8), l(x)));
        rule(&mut g, x, Expr::And(vec![Expr::not(l(y)), Expr::cmp(CmpOp::Ge, l(a), Expr::int(5))]));
        Ex1 { g, s, a, b, x, y }
    }

    fn theta(e: &Ex1, s: i64) -> Assignment {
        let mut t = vec![Value::Int(0); 5];
        t[e.s.idx()] = Value::Int(s);
        t[e.a.idx()] = Value::Int(17);
        t[e.b.idx()] = Value::Int(8);
        t[e.x.idx()] = Value::TRUE;
        t[e.y.idx()] = Value::FALSE;
        t
    }

    #[test]
    fn example1_reduct() {
        let e = example1();
        let cp = reduct(&e.g, &theta(&e, 9), true);
        assert_eq!(cp.show(&e.g), vec!["a >= 0", "b >= 0", "a >= sum(b, 9)", "b >= 8 <- x", "x >= ge(a, 5)"]);
        let cp3 = reduct(&e.g, &theta(&e, 3), true);
        assert_eq!(cp3.show(&e.g)[2], "a >= sum(b, 3)");
    }

    #[test]
    fn example1_minimal_solution() {
        let e = example1();
        let t = theta(&e, 3);
        let m = minimal_solution(&e.g, &reduct(&e.g, &t, true), &t).unwrap();
        assert_eq!(m[e.a.idx()], Value::Int(3));
        assert_eq!(m[e.b.idx()], Value::Int(0));
        assert_eq!(m[e.x.idx()], Value::FALSE);
        assert_eq!(m[e.y.idx()], Value::FALSE);
    }

    #[test]
    fn example1_stability() {
        let e = example1();
        assert!(is_stable(&e.g, &theta(&e, 9)).unwrap());
        assert!(!is_stable(&e.g, &theta(&e, 3)).unwrap());
        let mut bad = theta(&e, 9);
        bad[e.b.idx()] = Value::Int(7);
        assert!(!is_stable(&e.g, &bad).unwrap());
    }

    #[test]
    fn example1_enumeration() {
        let e = example1();
        let all = enumerate_stable(&e.g, DEFAULT_CAP).unwrap();
        assert!(all.contains(&theta(&e, 9)));
        assert!(!all.contains(&theta(&e, 3)));
        // closed form: a = s below 5, otherwise x holds, b = 8 and a = s + 8
        assert_eq!(all.len(), 7);
        for t in &all {
            let s = t[e.s.idx()].as_int().unwrap();
            let a = if s >= 5 { s + 8 } else { s };
            assert_eq!(t[e.a.idx()], Value::Int(a));
            assert_eq!(t[e.b.idx()], Value::Int(if s >= 5 { 8 } else { 0 }));
        }
        assert_eq!(enumerate_naive(&e.g, 10_000_000).unwrap(), all);
    }

    #[test]
    fn tautology_is_dropped() {
        let e = example1();
        let mut t = theta(&e, 9);
        t[e.y.idx()] = Value::TRUE;
        let cp = reduct(&e.g, &t, true);
        assert_eq!(cp.rules.len(), 4);
        assert!(cp.rules.iter().all(|(h, _)| *h != e.x));
        assert_eq!(reduct(&e.g, &t, false).rules.len(), 5);
    }

    #[test]
    fn trivial_programs() {
        let mut g = GroundProgram::new();
        let b = int(&mut g, "b", true, 0, 3);
        assert_eq!(minimal_solution(&g, &PositiveCp::default(), &[Value::Int(2)]).unwrap(), vec![Value::Int(0)]);
        rule(&mut g, b, Expr::int(0));
        assert_eq!(enumerate_stable(&g, DEFAULT_CAP).unwrap(), vec![vec![Value::Int(0)]]);

        let mut g = GroundProgram::new();
        let a = int(&mut g, "a", true, 0, 3);
        let b = int(&mut g, "b", true, 0, 3);
        rule(&mut g, a, l(b));
        rule(&mut g, b, l(a));
        assert_eq!(enumerate_stable(&g, DEFAULT_CAP).unwrap(), vec![vec![Value::Int(0), Value::Int(0)]]);
        let cp = reduct(&g, &[Value::Int(3), Value::Int(3)], true);
        assert_eq!(minimal_solution(&g, &cp, &[Value::Int(3), Value::Int(3)]).unwrap(), vec![Value::Int(0); 2]);
    }

    #[test]
    fn optimize_and_infeasible() {
        let mut g = GroundProgram::new();
        let s = int(&mut g, "s", false, 0, 3);
        let y = int(&mut g, "y", true, 0, 5);
        rule(&mut g, y, Expr::Sum(vec![l(s), Expr::int(2)]));
        g.objective = Some(Expr::neg(l(y)));
        let (t, v) = optimize(&g, DEFAULT_CAP).unwrap();
        assert_eq!(t, vec![Value::Int(3), Value::Int(5)]);
        assert_eq!(v, Value::Int(-5));
        g.constraints.push(crate::ground::GroundConstraint { body: Expr::cmp(CmpOp::Gt, l(s), l(y)) });
        assert_eq!(optimize(&g, DEFAULT_CAP), Err(OracleError::Infeasible));
    }

    #[test]
    fn ub_overflow_is_infeasible() {
        let mut g = GroundProgram::new();
        let y = int(&mut g, "y", true, 0, 2);
        rule(&mut g, y, Expr::int(3));
        assert!(enumerate_stable(&g, DEFAULT_CAP).unwrap().is_empty());
    }

    #[test]
    fn cap_and_bounds_are_enforced() {
        let mut g = GroundProgram::new();
        for i in 0..4 {
            int(&mut g, &alloc::format!("s{i}"), false, 0, 9);
        }
        assert!(matches!(enumerate_stable(&g, 1000), Err(OracleError::CapExceeded { size: 10000, .. })));
        var(&mut g, "r", false, ValueType::Int, Value::Int(0), Value::PosInf);
        assert!(matches!(enumerate_stable(&g, DEFAULT_CAP), Err(OracleError::Unbounded(_))));
    }

    // Textbook stable models: delete rules with a true negative literal,
    // drop the remaining negative literals, compare with the least model.
    fn asp_stable_models(n: usize, rules: &[(usize, Vec<usize>, Vec<usize>)]) -> BTreeSet<Vec<bool>> {
        let mut out = BTreeSet::new();
        for mask in 0u32..(1 << n) {
            let m: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let kept: Vec<_> = rules.iter().filter(|(_, _, neg)| neg.iter().all(|&b| !m[b])).collect();
            let mut least = vec![false; n];
            loop {
                let mut changed = false;
                for (h, pos, _) in &kept {
                    if !least[*h] && pos.iter().all(|&b| least[b]) {
                        least[*h] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            if least == m {
                out.insert(m);
            }
        }
        out
    }

    /// `(head, positive body, negative body)` over atoms `0..n`.
    type AspRule = (usize, Vec<usize>, Vec<usize>);

    fn asp_rules() -> impl Strategy<Value = (usize, Vec<AspRule>)> {
        (1usize..=5).prop_flat_map(|n| {
            let r = (0..n, proptest::collection::vec(0..n, 0..3), proptest::collection::vec(0..n, 0..3));
            (Just(n), proptest::collection::vec(r, 0..7))
        })
    }

    fn bools(g: &GroundProgram, t: &[Value]) -> Vec<bool> {
        let _ = g;
        t.iter().map(|v| v.as_bool().unwrap()).collect()
    }

    // Positive programs over founded ints in [0,3]: the body only uses
    // operators that are increasing in every argument.
    fn positive_body(n: usize) -> impl Strategy<Value = GExpr> {
        let leaf = prop_oneof![(0..n as u32).prop_map(|i| Expr::Leaf(VarId(i))), (0i64..4).prop_map(Expr::int)];
        leaf.prop_recursive(2, 8, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 1..3).prop_map(Expr::Sum),
                proptest::collection::vec(inner.clone(), 1..3).prop_map(Expr::Max),
                proptest::collection::vec(inner.clone(), 1..3).prop_map(Expr::Min),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::guard(a, Expr::cmp(CmpOp::Ge, b, Expr::int(2)))),
            ]
        })
    }

    fn positive_program() -> impl Strategy<Value = GroundProgram> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec((0..n as u32, positive_body(n)), 0..6).prop_map(move |rs| {
                let mut g = GroundProgram::new();
                for i in 0..n {
                    int(&mut g, &alloc::format!("v{i}"), true, 0, 3);
                }
                for (h, b) in rs {
                    rule(&mut g, VarId(h), b);
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn asp_embedding_matches_textbook((n, rules) in asp_rules()) {
            let mut g = GroundProgram::new();
            let vs: Vec<VarId> = (0..n).map(|i| boolean(&mut g, &alloc::format!("p{i}"), true)).collect();
            for (h, pos, neg) in &rules {
                let mut lits: Vec<GExpr> = pos.iter().map(|&b| l(vs[b])).collect();
                lits.extend(neg.iter().map(|&b| Expr::not(l(vs[b]))));
                rule(&mut g, vs[*h], Expr::And(lits));
            }
            let ours: BTreeSet<Vec<bool>> = enumerate_stable(&g, DEFAULT_CAP).unwrap().iter().map(|t| bools(&g, t)).collect();
            prop_assert_eq!(ours, asp_stable_models(n, &rules));
        }

        #[test]
        fn minimal_solution_is_least(g in positive_program()) {
            let base: Assignment = g.vars.iter().map(|d| d.lb).collect();
            let cp = PositiveCp { rules: g.rules.iter().map(|r| (r.head, r.body.clone())).collect() };
            let doms = check_domains(&g).unwrap();
            let mut models = Vec::new();
            for_each_product(&doms, DEFAULT_CAP, &mut |t| {
                if satisfies(&g, t)? { models.push(t.to_vec()); }
                Ok(())
            }).unwrap();
            match minimal_solution(&g, &cp, &base) {
                Ok(m) => {
                    prop_assert!(satisfies(&g, &m).unwrap());
                    for t in &models {
                        prop_assert!(m.iter().zip(t).all(|(a, b)| a.num_cmp(b).is_le()));
                    }
                }
                Err(OracleError::Infeasible) => prop_assert!(models.is_empty()),
                Err(e) => prop_assert!(false, "{}", e),
            }
        }

        #[test]
        fn kleene_is_order_independent(g in positive_program(), seed in any::<u64>()) {
            let base: Assignment = g.vars.iter().map(|d| d.lb).collect();
            let cp = PositiveCp { rules: g.rules.iter().map(|r| (r.head, r.body.clone())).collect() };
            let mut shuffled = cp.clone();
            let k = shuffled.rules.len();
            if k > 1 {
                shuffled.rules.rotate_left((seed as usize) % k);
                shuffled.rules.reverse();
            }
            prop_assert_eq!(minimal_solution(&g, &cp, &base), minimal_solution(&g, &shuffled, &base));
        }

        #[test]
        fn stable_solutions_reproduce_themselves(g in positive_program()) {
            for t in enumerate_stable(&g, DEFAULT_CAP).unwrap() {
                let m = minimal_solution(&g, &reduct(&g, &t, true), &t).unwrap();
                prop_assert_eq!(&m, &t);
                let m2 = minimal_solution(&g, &reduct(&g, &t, false), &t).unwrap();
                prop_assert_eq!(&m2, &t);
            }
            prop_assert_eq!(enumerate_stable(&g, DEFAULT_CAP).unwrap(), enumerate_naive(&g, DEFAULT_CAP).unwrap());
        }
    }
}
