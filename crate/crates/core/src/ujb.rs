//! Leaf bounds and unconditionally justified bounds (ujb).

use alloc::collections::BTreeMap;

use crate::monotonicity::{interval, Interval};
use crate::program::{Access, ArrayDecl, ArrayId, ArrayKind, Generator, IndexExpr, Leaf, Program, Rule};

use crate::value::{Value, ValueType};

/// Fixpoint rounds for [`compute_array_ujbs`].
pub const UJB_ROUNDS: usize = 16;

pub type UjbMap = BTreeMap<ArrayId, Value>;

/// How founded leaves are bounded when computing an interval.
#[derive(Clone, Copy)]
pub enum FoundedAt<'a> {
    /// Declared domain `[lb, ub]`.
    Domain,
    /// `[ujb, ub]`: values a founded variable can take in a solution.
    Justified(&'a UjbMap),
    /// The single point `ujb`.
    Point(&'a UjbMap),
}

fn array_range(d: &ArrayDecl) -> Interval {
    if d.kind == ArrayKind::Param {
        if d.values.is_empty() {
            return Interval::FULL;
        }
        let lo = d.values.iter().map(|v| v.to_f64()).fold(f64::INFINITY, f64::min);
        let hi = d.values.iter().map(|v| v.to_f64()).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    } else {
        Interval::new(d.lb.to_f64(), d.ub.to_f64())
    }
}

/// Range of an index expression given the generator's variable ranges.
pub fn index_interval(e: &IndexExpr, gen: &Generator, arrays: &[ArrayDecl]) -> Interval {
    let rec = |x: &IndexExpr| index_interval(x, gen, arrays);
    match e {
        IndexExpr::Lit(v) => Interval::point(*v as f64),
        IndexExpr::Var(i) => match gen.vars.get(*i) {
            Some((_, r)) => Interval::new(r.lo as f64, r.hi as f64),
            None => Interval::FULL,
        },
        IndexExpr::Param(a, _) => array_range(&arrays[*a]),
        IndexExpr::Add(v) => v.iter().map(rec).fold(Interval::point(0.0), Interval::add),
        IndexExpr::Mul(a, b) => rec(a).mul(rec(b)),
        IndexExpr::Neg(a) => rec(a).neg(),
        IndexExpr::Mod(_, b) => match **b {
            IndexExpr::Lit(k) if k != 0 => Interval::new(0.0, (k.abs() - 1) as f64),
            _ => Interval::FULL,
        },
        IndexExpr::Div(..) => Interval::FULL,
    }
}

/// Bounds of a leaf of a rule or constraint with generator `gen`.
pub fn leaf_interval(p: &Program, gen: &Generator, leaf: &Leaf, mode: FoundedAt<'_>) -> Interval {
    match leaf {
        Leaf::Index(e) => index_interval(e, gen, &p.arrays),
        Leaf::Access(a) => access_interval(p, a, mode),
    }
}

fn access_interval(p: &Program, a: &Access, mode: FoundedAt<'_>) -> Interval {
    let d = &p.arrays[a.array];
    let range = array_range(d);
    if !d.kind.is_founded() {
        return range;
    }
    match mode {
        FoundedAt::Domain => range,
        FoundedAt::Justified(u) => {
            let lo = u.get(&a.array).map_or(range.lo, |v| v.to_f64().max(range.lo));
            Interval::new(lo, range.hi)
        }
        FoundedAt::Point(u) => Interval::point(u.get(&a.array).map_or(range.lo, |v| v.to_f64())),
    }
}

/// ujb of a single term: parameters and standard variables give their upper
/// bound, founded variables the array's ujb.
pub fn ujb_of_term(p: &Program, ujbs: &UjbMap, gen: &Generator, leaf: &Leaf) -> Value {
    let iv = leaf_interval(p, gen, leaf, FoundedAt::Point(ujbs));
    let ty = match leaf {
        Leaf::Access(a) => p.arrays[a.array].ty,
        Leaf::Index(_) => ValueType::Int,
    };
    Value::from_f64(iv.hi, ty, false)
}

/// Whether the heads of `r` cover every element of the head array.
pub fn rule_covers_head(p: &Program, r: &Rule) -> bool {
    if r.gen.cond.is_some() || r.gen.vars.iter().any(|(_, rg)| rg.is_empty()) {
        return false;
    }
    let d = &p.arrays[r.head.array];
    let mut seen = alloc::vec::Vec::new();
    for (ix, dim) in r.head.index.iter().zip(&d.dims) {
        match ix {
            IndexExpr::Var(k) if !seen.contains(k) && r.gen.vars[*k].1 == *dim => seen.push(*k),
            _ => return false,
        }
    }
    true
}

/// Per-array lower bound that every stable solution satisfies.
pub fn compute_array_ujbs(p: &Program) -> UjbMap {
    compute_array_ujbs_rounds(p, UJB_ROUNDS)
}

pub fn compute_array_ujbs_rounds(p: &Program, rounds: usize) -> UjbMap {
    let mut ujbs: UjbMap = BTreeMap::new();
    for (id, d) in p.arrays.iter().enumerate() {
        if d.kind.is_founded() {
            let declared = d.ujb.unwrap_or(d.lb);
            ujbs.insert(id, declared.max_num(d.lb));
        }
    }
    let covering: alloc::vec::Vec<&Rule> = p.rules.iter().filter(|r| rule_covers_head(p, r)).collect();
    for _ in 0..rounds {
        let mut changed = false;
        for r in &covering {
            let d = &p.arrays[r.head.array];
            let lo = interval(&r.body, &|l| leaf_interval(p, &r.gen, l, FoundedAt::Justified(&ujbs))).lo;
            let cand = Value::from_f64(lo, d.ty, true).min_num(d.ub);
            let cur = ujbs[&r.head.array];
            if cand.num_cmp(&cur).is_gt() {
                ujbs.insert(r.head.array, cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    ujbs
}
