//! Random programs for differential testing.
//!
//! Scalar programs exercise flattening; small array programs exercise the
//! grounders. Generated programs are not guaranteed to be valid or
//! supported; callers filter with the pipeline.

use bfasp_core::program::{
    Access, ArrayDecl, ArrayId, ArrayKind, Constraint, Generator, IndexCond, IndexExpr, IndexRange, Leaf, NgExpr, Rule,
};
use bfasp_core::{CmpOp, Expr, Program, Value, ValueType};
use rand::Rng;

const TOP: i64 = 3;

fn decl(name: String, kind: ArrayKind, ty: ValueType, dims: Vec<IndexRange>) -> ArrayDecl {
    let d = ArrayDecl::new(name, kind, ty, dims);
    match ty {
        ValueType::Bool => d.with_bounds(Value::FALSE, Value::TRUE),
        _ => d.with_bounds(Value::Int(0), Value::Int(TOP)),
    }
}

fn cmp_op(rng: &mut impl Rng) -> CmpOp {
    [CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt][rng.gen_range(0..4)]
}

struct Scalar<'a> {
    p: &'a Program,
    ints: Vec<ArrayId>,
    bools: Vec<ArrayId>,
}

impl Scalar<'_> {
    fn var(&self, rng: &mut impl Rng, pool: &[ArrayId]) -> Option<NgExpr> {
        if pool.is_empty() {
            None
        } else {
            Some(Expr::Leaf(Leaf::Access(Access::scalar(pool[rng.gen_range(0..pool.len())]))))
        }
    }

    fn int(&self, rng: &mut impl Rng, depth: usize) -> NgExpr {
        if depth == 0 || rng.gen_bool(0.3) {
            return match self.var(rng, &self.ints) {
                Some(v) if rng.gen_bool(0.8) => v,
                _ => Expr::int(rng.gen_range(0..=TOP)),
            };
        }
        let n = rng.gen_range(2..=3);
        let args = |rng: &mut _| (0..n).map(|_| self.int(rng, depth - 1)).collect::<Vec<_>>();
        match rng.gen_range(0..5) {
            0 => Expr::Sum(args(rng)),
            1 => Expr::Max(args(rng)),
            2 => Expr::Min(args(rng)),
            3 => Expr::Product(args(rng)),
            _ => Expr::neg(self.int(rng, depth - 1)),
        }
    }

    fn bool(&self, rng: &mut impl Rng, depth: usize) -> NgExpr {
        if depth == 0 || rng.gen_bool(0.3) {
            return match self.var(rng, &self.bools) {
                Some(v) => v,
                None => Expr::cmp(CmpOp::Ge, self.int(rng, 0), Expr::int(rng.gen_range(1..=TOP))),
            };
        }
        let n = rng.gen_range(2..=3);
        match rng.gen_range(0..4) {
            0 => Expr::And((0..n).map(|_| self.bool(rng, depth - 1)).collect()),
            1 => Expr::Or((0..n).map(|_| self.bool(rng, depth - 1)).collect()),
            2 => Expr::not(self.bool(rng, depth - 1)),
            _ => Expr::cmp(cmp_op(rng), self.int(rng, depth - 1), self.int(rng, depth - 1)),
        }
    }

    fn body(&self, rng: &mut impl Rng, head: ArrayId) -> NgExpr {
        let guarded = rng.gen_bool(0.2);
        let depth = rng.gen_range(1..=if guarded { 2 } else { 3 });
        let e = if self.p.arrays[head].ty == ValueType::Bool { self.bool(rng, depth) } else { self.int(rng, depth) };
        if guarded {
            Expr::guard(e, self.bool(rng, 1))
        } else {
            e
        }
    }
}

/// At most 6 founded and 2 standard scalar variables over `[0, 3]` or bool,
/// rules and constraints of height at most 3.
pub fn scalar_program(rng: &mut impl Rng) -> Program {
    let mut p = Program::new();
    let nf = rng.gen_range(1..=6);
    let ns = rng.gen_range(0..=2);
    let mut founded = Vec::new();
    for k in 0..nf + ns {
        let ty = if rng.gen_bool(0.35) { ValueType::Bool } else { ValueType::Int };
        let (kind, name) = if k < nf { (ArrayKind::Founded, format!("x{k}")) } else { (ArrayKind::Standard, format!("s{}", k - nf)) };
        let id = p.add_array(decl(name, kind, ty, vec![]));
        if k < nf {
            founded.push(id);
        }
    }
    let ints = (0..p.arrays.len()).filter(|&a| p.arrays[a].ty == ValueType::Int).collect();
    let bools = (0..p.arrays.len()).filter(|&a| p.arrays[a].ty == ValueType::Bool).collect();
    let nr = rng.gen_range(1..=5);
    let (rules, constraints) = {
        let s = Scalar { p: &p, ints, bools };
        let rules: Vec<Rule> = (0..nr)
            .map(|k| {
                let head = founded[rng.gen_range(0..founded.len())];
                Rule::new(k as u32, Generator::empty(), Access::scalar(head), s.body(rng, head))
            })
            .collect();
        let nc = rng.gen_range(0..=1);
        let constraints: Vec<Constraint> = (0..nc).map(|_| Constraint { gen: Generator::empty(), body: s.bool(rng, 2) }).collect();
        (rules, constraints)
    };
    p.rules = rules;
    p.constraints = constraints;
    p
}

/// Index term for generator variable 0 over `1..=n`, with the side
/// condition keeping it in range.
fn index(rng: &mut impl Rng, n: i64) -> (IndexExpr, IndexCond) {
    match rng.gen_range(0..4) {
        0 | 1 => (IndexExpr::var(0), IndexCond::True),
        2 => {
            let k = if rng.gen_bool(0.5) { 1 } else { -1 };
            let e = IndexExpr::offset(0, k);
            let cond = IndexCond::Cmp(CmpOp::Ge, e.clone(), IndexExpr::Lit(1)).and(IndexCond::Cmp(CmpOp::Le, e.clone(), IndexExpr::Lit(n)));
            (e, cond)
        }
        _ => (IndexExpr::Lit(rng.gen_range(1..=n)), IndexCond::True),
    }
}

struct Arrays {
    n: i64,
    founded: Vec<ArrayId>,
    all: Vec<ArrayId>,
}

impl Arrays {
    fn pick(&self, rng: &mut impl Rng, p: &Program, ty: ValueType) -> Option<ArrayId> {
        let pool: Vec<ArrayId> = self.all.iter().copied().filter(|&a| p.arrays[a].ty == ty).collect();
        if pool.is_empty() {
            None
        } else {
            Some(pool[rng.gen_range(0..pool.len())])
        }
    }

    fn leaf(&self, rng: &mut impl Rng, p: &Program, ty: ValueType, cond: &mut IndexCond) -> NgExpr {
        match self.pick(rng, p, ty) {
            Some(a) => {
                let (ix, c) = index(rng, self.n);
                *cond = std::mem::replace(cond, IndexCond::True).and(c);
                Expr::Leaf(Leaf::Access(Access::new(a, vec![ix])))
            }
            None if ty == ValueType::Bool => Expr::Const(Value::Bool(rng.gen_bool(0.5))),
            None => Expr::int(rng.gen_range(0..=TOP)),
        }
    }

    /// A body of primitive form for a head of type `ty`.
    fn body(&self, rng: &mut impl Rng, p: &Program, ty: ValueType, cond: &mut IndexCond) -> NgExpr {
        let n = rng.gen_range(1..=3);
        if ty == ValueType::Bool {
            match rng.gen_range(0..5) {
                0 => Expr::And((0..n).map(|_| self.leaf(rng, p, ty, cond)).collect()),
                1 => Expr::Or((0..n).map(|_| self.leaf(rng, p, ty, cond)).collect()),
                2 => Expr::not(self.leaf(rng, p, ty, cond)),
                3 => Expr::cmp(CmpOp::Ge, self.leaf(rng, p, ValueType::Int, cond), Expr::int(rng.gen_range(1..=TOP))),
                _ => self.leaf(rng, p, ty, cond),
            }
        } else {
            match rng.gen_range(0..6) {
                // capped so that no rule can push a founded value past its bound
                0 => Expr::Min(vec![Expr::Sum((0..n).map(|_| self.leaf(rng, p, ty, cond)).collect()), Expr::int(TOP)]),
                1 => Expr::Max((0..n).map(|_| self.leaf(rng, p, ty, cond)).collect()),
                2 => Expr::Min((0..n).map(|_| self.leaf(rng, p, ty, cond)).collect()),
                3 => Expr::guard(self.leaf(rng, p, ty, cond), self.leaf(rng, p, ValueType::Bool, cond)),
                4 => Expr::Sum(vec![Expr::int(TOP), Expr::neg(self.leaf(rng, p, ty, cond))]),
                _ => self.leaf(rng, p, ty, cond),
            }
        }
    }
}

/// At most 3 one-dimensional arrays over `1..=n` with `n <= 4`, with
/// optional injected negative cycles between two founded arrays.
pub fn array_program(rng: &mut impl Rng, negative_cycle: bool) -> Program {
    let mut p = Program::new();
    let n = rng.gen_range(2..=4);
    let dims = vec![IndexRange::new(1, n)];
    let na = rng.gen_range(2..=3);
    let mut ar = Arrays { n, founded: Vec::new(), all: Vec::new() };
    for k in 0..na {
        let ty = if rng.gen_bool(0.5) { ValueType::Bool } else { ValueType::Int };
        let standard = k > 0 && rng.gen_bool(0.3);
        let (kind, name) = if standard { (ArrayKind::Standard, format!("s{k}")) } else { (ArrayKind::Founded, format!("a{k}")) };
        let id = p.add_array(decl(name, kind, ty, dims.clone()));
        ar.all.push(id);
        if !standard {
            ar.founded.push(id);
        }
    }
    let nr = rng.gen_range(1..=4);
    for k in 0..nr {
        let head = ar.founded[rng.gen_range(0..ar.founded.len())];
        let mut cond = IndexCond::True;
        let (hix, hc) = index(rng, n);
        cond = cond.and(hc);
        let body = ar.body(rng, &p, p.arrays[head].ty, &mut cond);
        let gen = Generator::new(vec![("i".into(), IndexRange::new(1, n))], Some(cond));
        p.rules.push(Rule::new(k, gen, Access::new(head, vec![hix]), body));
    }
    if negative_cycle {
        let x = p.add_array(decl(format!("p{}", p.arrays.len()), ArrayKind::Founded, ValueType::Bool, dims.clone()));
        let y = p.add_array(decl(format!("q{}", p.arrays.len()), ArrayKind::Founded, ValueType::Bool, dims.clone()));
        ar.founded.extend([x, y]);
        ar.all.extend([x, y]);
        let at = |a: ArrayId| Expr::Leaf(Leaf::Access(Access::new(a, vec![IndexExpr::var(0)])));
        let all = || Generator::new(vec![("i".into(), IndexRange::new(1, n))], None);
        let id = p.next_rule_id();
        p.rules.push(Rule::new(id, all(), Access::new(x, vec![IndexExpr::var(0)]), Expr::not(at(y))));
        let mut cond = IndexCond::True;
        let other = ar.leaf(rng, &p, ValueType::Bool, &mut cond);
        let body = if rng.gen_bool(0.5) { Expr::And(vec![Expr::not(at(x)), other]) } else { Expr::not(at(x)) };
        let gen = Generator::new(vec![("i".into(), IndexRange::new(1, n))], Some(cond));
        p.rules.push(Rule::new(id + 1, gen, Access::new(y, vec![IndexExpr::var(0)]), body));
    }
    let nc = rng.gen_range(0..=2);
    for _ in 0..nc {
        let a = ar.all[rng.gen_range(0..ar.all.len())];
        let at = Expr::Leaf(Leaf::Access(Access::new(a, vec![IndexExpr::Lit(rng.gen_range(1..=n))])));
        let body = if p.arrays[a].ty == ValueType::Bool {
            if rng.gen_bool(0.5) {
                at
            } else {
                Expr::not(at)
            }
        } else {
            Expr::cmp(cmp_op(rng), at, Expr::int(rng.gen_range(0..=TOP)))
        };
        p.constraints.push(Constraint { gen: Generator::empty(), body });
    }
    p
}
