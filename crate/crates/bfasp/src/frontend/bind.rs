//! Combine a checked model with its data into a core [`Program`].

use std::collections::BTreeMap;

use bfasp_core::program::{
    Access, ArrayDecl, ArrayId, ArrayKind, Constraint, Generator, IndexCond, IndexExpr, IndexRange, Leaf, NgExpr,
    Program, Rule,
};
use bfasp_core::{CmpOp, Expr, Value};

use super::ast::*;
use super::data::Data;
use super::error::{ErrorKind, FrontendError, Pos};

type R<T> = Result<T, FrontendError>;

fn err(kind: ErrorKind, pos: Pos, msg: impl Into<String>) -> FrontendError {
    FrontendError::new(kind, pos, msg)
}

struct Binder {
    p: Program,
    sets: BTreeMap<String, IndexRange>,
}

pub fn bind(m: &Model, data: &Data) -> R<Program> {
    let mut b = Binder { p: Program::new(), sets: BTreeMap::new() };
    let mut scalars: BTreeMap<String, i64> = BTreeMap::new();
    for item in &m.items {
        if let Item::Array(a) = item {
            if a.kind == DeclKind::Param && a.dims.is_empty() && a.ty == bfasp_core::ValueType::Int {
                if let Ok(v) = data.values(&a.name, a.ty, &[]) {
                    scalars.insert(a.name.clone(), v[0].as_int().unwrap_or(0));
                }
            }
        }
    }
    for item in &m.items {
        if let Item::Set(s) = item {
            let bound = |x: &SetBound| -> R<i64> {
                match x {
                    SetBound::Int(i) => Ok(*i),
                    SetBound::Param(p) => scalars
                        .get(p)
                        .copied()
                        .ok_or_else(|| FrontendError::data(ErrorKind::MissingParameter, format!("no data for parameter {p}"))),
                }
            };
            b.sets.insert(s.name.clone(), IndexRange::new(bound(&s.lo)?, bound(&s.hi)?));
        }
    }
    for item in &m.items {
        if let Item::Array(a) = item {
            let decl = b.array_decl(a, data)?;
            b.p.add_array(decl);
        }
    }
    let mut next_id = 0u32;
    for item in &m.items {
        match item {
            Item::Rule { quant, head, body, guard, .. } => {
                let (gen, scope) = b.generator(quant.as_ref())?;
                let head = b.access_of(head, &scope)?;
                let mut e = b.value(body, &scope)?;
                if let Some(g) = guard {
                    e = Expr::guard(e, b.value(g, &scope)?);
                }
                b.p.rules.push(Rule::new(next_id, gen, head, e));
                next_id += 1;
            }
            Item::Constraint { quant, body, .. } => {
                let (gen, scope) = b.generator(quant.as_ref())?;
                let body = b.value(body, &scope)?;
                b.p.constraints.push(Constraint { gen, body });
            }
            Item::Minimize(e, _) => {
                b.p.objective = Some(b.value(e, &[])?);
            }
            Item::Output(v, pos) => {
                for a in v {
                    b.output(a, *pos)?;
                }
            }
            Item::Set(_) | Item::Array(_) => {}
        }
    }
    Ok(b.p)
}

impl Binder {
    fn id(&self, name: &str, pos: Pos) -> R<ArrayId> {
        self.p.array_id(name).ok_or_else(|| err(ErrorKind::UnknownIdentifier, pos, format!("unknown array {name}")))
    }

    fn set(&self, name: &str, pos: Pos) -> R<IndexRange> {
        self.sets.get(name).copied().ok_or_else(|| err(ErrorKind::UnknownIdentifier, pos, format!("unknown set {name}")))
    }

    fn array_decl(&self, a: &ArrayDeclAst, data: &Data) -> R<ArrayDecl> {
        let dims: Vec<IndexRange> = a.dims.iter().map(|d| self.set(d, a.pos)).collect::<R<_>>()?;
        let kind = match a.kind {
            DeclKind::Param => ArrayKind::Param,
            DeclKind::Founded => ArrayKind::Founded,
            DeclKind::Std => ArrayKind::Standard,
        };
        let mut d = ArrayDecl::new(a.name.clone(), kind, a.ty, dims);
        if kind == ArrayKind::Param {
            let shape: Vec<u64> = d.dims.iter().map(|r| r.len()).collect();
            d.values = data.values(&a.name, a.ty, &shape)?;
            if let (Some(lo), Some(hi)) = (d.values.iter().min().copied(), d.values.iter().max().copied()) {
                d.lb = lo;
                d.ub = hi;
            }
        }
        if let Some((lb, ub)) = a.bounds {
            if lb.num_cmp(&ub).is_gt() {
                return Err(err(ErrorKind::DomainViolation, a.pos, format!("empty domain {lb}..{ub} for {}", a.name)));
            }
            d.lb = lb;
            d.ub = ub;
        }
        d.ujb = a.ujb;
        Ok(d)
    }

    fn generator(&self, q: Option<&Quant>) -> R<(Generator, Vec<String>)> {
        let Some(q) = q else {
            return Ok((Generator::empty(), Vec::new()));
        };
        let mut vars = Vec::new();
        let mut scope = Vec::new();
        for (v, s, pos) in &q.vars {
            vars.push((v.clone(), self.set(s, *pos)?));
            scope.push(v.clone());
        }
        let cond = match &q.cond {
            Some(c) => Some(self.cond(c, &scope)?),
            None => None,
        };
        Ok((Generator::new(vars, cond), scope))
    }

    fn output(&mut self, a: &Ast, pos: Pos) -> R<()> {
        match a {
            Ast::Name(n, p) => {
                let id = self.id(n, *p)?;
                for t in self.p.arrays[id].tuples() {
                    self.p.outputs.push((id, t));
                }
            }
            Ast::Index(n, args, p) => {
                let id = self.id(n, *p)?;
                let t: Vec<i64> = args
                    .iter()
                    .map(|x| {
                        self.index(x, &[])?
                            .eval(&[], &self.p.arrays)
                            .map_err(|e| err(ErrorKind::DomainViolation, x.pos(), e.to_string()))
                    })
                    .collect::<R<_>>()?;
                if !self.p.arrays[id].contains(&t) {
                    return Err(err(ErrorKind::DomainViolation, *p, format!("output {n}{t:?} is out of range")));
                }
                self.p.outputs.push((id, t));
            }
            _ => return Err(FrontendError::syntax(pos, "output expects array elements")),
        }
        Ok(())
    }

    fn access_of(&self, a: &Ast, scope: &[String]) -> R<Access> {
        match a {
            Ast::Name(n, p) => Ok(Access::scalar(self.id(n, *p)?)),
            Ast::Index(n, args, p) => {
                let id = self.id(n, *p)?;
                let ix = args.iter().map(|x| self.index(x, scope)).collect::<R<_>>()?;
                Ok(Access::new(id, ix))
            }
            other => Err(FrontendError::syntax(other.pos(), "expected an array element")),
        }
    }

    fn index(&self, e: &Ast, scope: &[String]) -> R<IndexExpr> {
        Ok(match e {
            Ast::Num(v, p) => IndexExpr::Lit(v.as_int().ok_or_else(|| err(ErrorKind::KindMismatch, *p, "indices must be integers"))?),
            Ast::Name(n, p) => match scope.iter().rposition(|s| s == n) {
                Some(k) => IndexExpr::Var(k),
                None => match self.p.array_id(n) {
                    Some(id) if self.p.arrays[id].kind == ArrayKind::Param => IndexExpr::Param(id, Vec::new()),
                    _ => return Err(err(ErrorKind::UnboundIndexVariable, *p, format!("index variable {n} is not bound"))),
                },
            },
            Ast::Index(n, args, p) => {
                let id = self.id(n, *p)?;
                if self.p.arrays[id].kind != ArrayKind::Param {
                    return Err(err(ErrorKind::KindMismatch, *p, format!("{n} cannot appear in an index")));
                }
                IndexExpr::Param(id, args.iter().map(|x| self.index(x, scope)).collect::<R<_>>()?)
            }
            Ast::Bin(op, a, b, p) => {
                let (x, y) = (self.index(a, scope)?, self.index(b, scope)?);
                match op {
                    BinOp::Add => IndexExpr::Add(vec![x, y]),
                    BinOp::Sub => IndexExpr::Add(vec![x, IndexExpr::Neg(Box::new(y))]),
                    BinOp::Mul => IndexExpr::Mul(Box::new(x), Box::new(y)),
                    BinOp::Div => IndexExpr::Div(Box::new(x), Box::new(y)),
                    BinOp::Mod => IndexExpr::Mod(Box::new(x), Box::new(y)),
                    _ => return Err(err(ErrorKind::KindMismatch, *p, "not an integer index expression")),
                }
            }
            Ast::Neg(a, _) => IndexExpr::Neg(Box::new(self.index(a, scope)?)),
            other => return Err(err(ErrorKind::KindMismatch, other.pos(), "not an integer index expression")),
        })
    }

    fn cond(&self, e: &Ast, scope: &[String]) -> R<IndexCond> {
        Ok(match e {
            Ast::Num(Value::Bool(true), _) => IndexCond::True,
            Ast::Num(Value::Bool(false), _) => IndexCond::Not(Box::new(IndexCond::True)),
            Ast::Bin(BinOp::And, a, b, _) => IndexCond::And(vec![self.cond(a, scope)?, self.cond(b, scope)?]),
            Ast::Bin(BinOp::Or, a, b, _) => IndexCond::Or(vec![self.cond(a, scope)?, self.cond(b, scope)?]),
            Ast::Not(a, _) => IndexCond::Not(Box::new(self.cond(a, scope)?)),
            Ast::Rel(rel, a, b, _) => {
                let (x, y) = (self.index(a, scope)?, self.index(b, scope)?);
                match rel {
                    Rel::Cmp(op) => IndexCond::Cmp(*op, x, y),
                    Rel::Ne => IndexCond::Not(Box::new(IndexCond::Cmp(CmpOp::Eq, x, y))),
                }
            }
            other => return Err(err(ErrorKind::KindMismatch, other.pos(), "not a condition over index variables")),
        })
    }

    fn value(&self, e: &Ast, scope: &[String]) -> R<NgExpr> {
        let rec = |x: &Ast| self.value(x, scope);
        Ok(match e {
            Ast::Num(v, _) => Expr::Const(*v),
            Ast::Name(n, p) => match scope.iter().rposition(|s| s == n) {
                Some(k) => Expr::Leaf(Leaf::Index(IndexExpr::Var(k))),
                None => Expr::Leaf(Leaf::Access(Access::scalar(self.id(n, *p)?))),
            },
            Ast::Index(..) => Expr::Leaf(Leaf::Access(self.access_of(e, scope)?)),
            Ast::Bin(BinOp::Mod, ..) => Expr::Leaf(Leaf::Index(self.index(e, scope)?)),
            Ast::Bin(op, a, b, _) => {
                let (x, y) = (rec(a)?, rec(b)?);
                match op {
                    BinOp::Add => Expr::Sum(vec![x, y]),
                    BinOp::Sub => Expr::Sum(vec![x, Expr::neg(y)]),
                    BinOp::Mul => Expr::Product(vec![x, y]),
                    BinOp::Div => Expr::Product(vec![x, Expr::Recip(Box::new(y))]),
                    BinOp::And => Expr::And(vec![x, y]),
                    BinOp::Or => Expr::Or(vec![x, y]),
                    BinOp::Mod => unreachable!(),
                }
            }
            Ast::Neg(a, _) => Expr::neg(rec(a)?),
            Ast::Not(a, _) => Expr::not(rec(a)?),
            Ast::Rel(Rel::Cmp(op), a, b, _) => Expr::cmp(*op, rec(a)?, rec(b)?),
            Ast::Rel(Rel::Ne, a, b, _) => Expr::not(Expr::cmp(CmpOp::Eq, rec(a)?, rec(b)?)),
            Ast::Call(f, args, _) => {
                let v: Vec<NgExpr> = args.iter().map(rec).collect::<R<_>>()?;
                match f {
                    Func::Sum => Expr::Sum(v),
                    Func::Min => Expr::Min(v),
                    Func::Max => Expr::Max(v),
                    Func::Abs => Expr::Max(vec![v[0].clone(), Expr::neg(v[0].clone())]),
                }
            }
            Ast::Agg(f, q, body, _) => self.aggregate(*f, q, body, scope)?,
        })
    }

    // Expand over the aggregate's own bindings; its variables become literals.
    fn aggregate(&self, f: Func, q: &Quant, body: &Ast, scope: &[String]) -> R<NgExpr> {
        let (gen, own) = self.generator(Some(q))?;
        let bindings = gen
            .bindings(&self.p.arrays)
            .map_err(|e| err(ErrorKind::DomainViolation, body.pos(), e.to_string()))?;
        let mut inner = scope.to_vec();
        inner.extend(own);
        let template = self.value(body, &inner)?;
        let outer = scope.len();
        let terms: Vec<NgExpr> = bindings
            .iter()
            .map(|b| {
                let sub = |k: usize| if k >= outer { IndexExpr::Lit(b[k - outer]) } else { IndexExpr::Var(k) };
                template
                    .map_leaves(&mut |l: &Leaf| {
                        Ok::<_, ()>(Expr::Leaf(match l {
                            Leaf::Access(a) => Leaf::Access(Access::new(a.array, a.index.iter().map(|x| x.remap(&sub)).collect())),
                            Leaf::Index(x) => Leaf::Index(x.remap(&sub)),
                        }))
                    })
                    .unwrap()
            })
            .collect();
        Ok(match (f, terms.is_empty()) {
            (Func::Sum, true) => Expr::int(0),
            (Func::Max, true) => Expr::Const(Value::NegInf),
            (Func::Min, true) => Expr::Const(Value::PosInf),
            (Func::Sum, false) => Expr::Sum(terms),
            (Func::Max, false) => Expr::Max(terms),
            _ => Expr::Min(terms),
        })
    }
}
