//! Non-ground programs: array declarations, generators and rules.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::ProgramError;
use crate::expr::{CmpOp, Expr};
use crate::value::{Value, ValueType};

pub type ArrayId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArrayKind {
    Founded,
    Standard,
    Param,
    /// Relevance marker `m_x` of the array `x`; founded Boolean.
    Magic(ArrayId),
}

impl ArrayKind {
    /// Founded or standard, i.e. something a solver decides.
    pub fn is_decision(self) -> bool {
        matches!(self, ArrayKind::Founded | ArrayKind::Standard)
    }

    pub fn is_founded(self) -> bool {
        matches!(self, ArrayKind::Founded | ArrayKind::Magic(_))
    }
}

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

impl IndexRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IndexRange { lo, hi }
    }

    pub fn len(&self) -> u64 {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo) as u64 + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrayDecl {
    pub name: String,
    pub kind: ArrayKind,
    pub ty: ValueType,
    pub dims: Vec<IndexRange>,
    pub lb: Value,
    pub ub: Value,
    /// Declared unconditionally justified bound (founded arrays only).
    pub ujb: Option<Value>,
    /// Row-major element values; parameters only.
    pub values: Vec<Value>,
}

impl ArrayDecl {
    pub fn new(name: impl Into<String>, kind: ArrayKind, ty: ValueType, dims: Vec<IndexRange>) -> Self {
        let (lb, ub) = match ty {
            ValueType::Bool => (Value::FALSE, Value::TRUE),
            _ => (Value::NegInf, Value::PosInf),
        };
        ArrayDecl { name: name.into(), kind, ty, dims, lb, ub, ujb: None, values: Vec::new() }
    }

    pub fn with_bounds(mut self, lb: Value, ub: Value) -> Self {
        self.lb = lb;
        self.ub = ub;
        self
    }

    /// Number of elements.
    pub fn size(&self) -> u64 {
        self.dims.iter().map(|d| d.len()).product()
    }

    /// Row-major position of `index`, if inside the index sets.
    pub fn offset(&self, index: &[i64]) -> Option<usize> {
        if index.len() != self.dims.len() {
            return None;
        }
        let mut off = 0u64;
        for (d, &i) in self.dims.iter().zip(index) {
            if !d.contains(i) {
                return None;
            }
            off = off * d.len() + (i - d.lo) as u64;
        }
        Some(off as usize)
    }

    pub fn contains(&self, index: &[i64]) -> bool {
        self.offset(index).is_some()
    }

    /// Every index tuple, in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let vars: Vec<IndexRange> = self.dims.clone();
        enumerate_ranges(&vars, &mut Vec::new(), &mut |t| out.push(t.to_vec()));
        out
    }

    pub fn param_value(&self, index: &[i64]) -> Option<Value> {
        self.offset(index).and_then(|o| self.values.get(o).copied())
    }
}

fn enumerate_ranges(ranges: &[IndexRange], prefix: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    match ranges.split_first() {
        None => f(prefix),
        Some((r, rest)) => {
            for i in r.lo..=r.hi {
                prefix.push(i);
                enumerate_ranges(rest, prefix, f);
                prefix.pop();
            }
        }
    }
}

/// Integer expression over index variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexExpr {
    Lit(i64),
    /// Position of the variable in the enclosing generator.
    Var(usize),
    Add(Vec<IndexExpr>),
    Mul(Box<IndexExpr>, Box<IndexExpr>),
    Neg(Box<IndexExpr>),
    Mod(Box<IndexExpr>, Box<IndexExpr>),
    Div(Box<IndexExpr>, Box<IndexExpr>),
    /// Integer parameter lookup, e.g. `from[e]`.
    Param(ArrayId, Vec<IndexExpr>),
}

impl IndexExpr {
    pub fn var(i: usize) -> Self {
        IndexExpr::Var(i)
    }

    /// `var + k`.
    pub fn offset(var: usize, k: i64) -> Self {
        if k == 0 {
            IndexExpr::Var(var)
        } else {
            IndexExpr::Add(vec![IndexExpr::Var(var), IndexExpr::Lit(k)])
        }
    }

    pub fn eval(&self, binding: &[i64], arrays: &[ArrayDecl]) -> Result<i64, ProgramError> {
        let oob = |what: &str| ProgramError::Eval {
            context: what.to_string(),
            source: crate::error::EvalError::Overflow,
        };
        Ok(match self {
            IndexExpr::Lit(v) => *v,
            IndexExpr::Var(i) => binding[*i],
            IndexExpr::Add(v) => {
                let mut acc = 0i64;
                for c in v {
                    acc = acc.checked_add(c.eval(binding, arrays)?).ok_or_else(|| oob("index"))?;
                }
                acc
            }
            IndexExpr::Mul(a, b) => a
                .eval(binding, arrays)?
                .checked_mul(b.eval(binding, arrays)?)
                .ok_or_else(|| oob("index"))?,
            IndexExpr::Neg(a) => -a.eval(binding, arrays)?,
            IndexExpr::Mod(a, b) | IndexExpr::Div(a, b) => {
                let (x, y) = (a.eval(binding, arrays)?, b.eval(binding, arrays)?);
                if y == 0 {
                    return Err(ProgramError::Eval {
                        context: "index expression".to_string(),
                        source: crate::error::EvalError::DivisionByZero,
                    });
                }
                if matches!(self, IndexExpr::Mod(..)) {
                    x.rem_euclid(y)
                } else {
                    x.div_euclid(y)
                }
            }
            IndexExpr::Param(arr, idx) => {
                let t: Vec<i64> = idx.iter().map(|e| e.eval(binding, arrays)).collect::<Result<_, _>>()?;
                let decl = &arrays[*arr];
                match decl.param_value(&t) {
                    Some(v) => v.as_int().ok_or_else(|| ProgramError::Eval {
                        context: format!("index lookup {}", decl.name),
                        source: crate::error::EvalError::Type("integer parameter expected"),
                    })?,
                    None => {
                        return Err(ProgramError::IndexOutOfRange {
                            array: decl.name.clone(),
                            index: fmt_tuple(&t),
                        })
                    }
                }
            }
        })
    }

    /// `Some((coeffs, constant))` when the expression is linear in the index
    /// variables with no parameter lookups.
    pub fn linear_form(&self) -> Option<(BTreeMap<usize, i64>, i64)> {
        match self {
            IndexExpr::Lit(v) => Some((BTreeMap::new(), *v)),
            IndexExpr::Var(i) => Some((BTreeMap::from([(*i, 1)]), 0)),
            IndexExpr::Add(v) => {
                let mut coeffs = BTreeMap::new();
                let mut k = 0i64;
                for c in v {
                    let (cc, ck) = c.linear_form()?;
                    for (var, a) in cc {
                        *coeffs.entry(var).or_insert(0) += a;
                    }
                    k = k.checked_add(ck)?;
                }
                coeffs.retain(|_, a| *a != 0);
                Some((coeffs, k))
            }
            IndexExpr::Neg(a) => {
                let (cc, ck) = a.linear_form()?;
                Some((cc.into_iter().map(|(v, a)| (v, -a)).collect(), -ck))
            }
            IndexExpr::Mul(a, b) => {
                let (ca, ka) = a.linear_form()?;
                let (cb, kb) = b.linear_form()?;
                if ca.is_empty() {
                    Some((cb.into_iter().map(|(v, c)| (v, c * ka)).filter(|(_, c)| *c != 0).collect(), ka * kb))
                } else if cb.is_empty() {
                    Some((ca.into_iter().map(|(v, c)| (v, c * kb)).filter(|(_, c)| *c != 0).collect(), ka * kb))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// `Some((var, a, b))` when the expression is `a * var + b` with `a != 0`.
    pub fn univariate_affine(&self) -> Option<(usize, i64, i64)> {
        let (coeffs, k) = self.linear_form()?;
        if coeffs.len() == 1 {
            let (&v, &a) = coeffs.iter().next().unwrap();
            Some((v, a, k))
        } else {
            None
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(usize)) {
        match self {
            IndexExpr::Lit(_) => {}
            IndexExpr::Var(i) => f(*i),
            IndexExpr::Add(v) | IndexExpr::Param(_, v) => v.iter().for_each(|c| c.for_each_var(f)),
            IndexExpr::Mul(a, b) | IndexExpr::Mod(a, b) | IndexExpr::Div(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            IndexExpr::Neg(a) => a.for_each_var(f),
        }
    }

    /// Rename index variables.
    pub fn remap(&self, f: &impl Fn(usize) -> IndexExpr) -> IndexExpr {
        match self {
            IndexExpr::Lit(v) => IndexExpr::Lit(*v),
            IndexExpr::Var(i) => f(*i),
            IndexExpr::Add(v) => IndexExpr::Add(v.iter().map(|c| c.remap(f)).collect()),
            IndexExpr::Param(a, v) => IndexExpr::Param(*a, v.iter().map(|c| c.remap(f)).collect()),
            IndexExpr::Mul(a, b) => IndexExpr::Mul(Box::new(a.remap(f)), Box::new(b.remap(f))),
            IndexExpr::Mod(a, b) => IndexExpr::Mod(Box::new(a.remap(f)), Box::new(b.remap(f))),
            IndexExpr::Div(a, b) => IndexExpr::Div(Box::new(a.remap(f)), Box::new(b.remap(f))),
            IndexExpr::Neg(a) => IndexExpr::Neg(Box::new(a.remap(f))),
        }
    }
}

/// Decidable condition over index variables (and parameters).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexCond {
    True,
    Cmp(CmpOp, IndexExpr, IndexExpr),
    And(Vec<IndexCond>),
    Or(Vec<IndexCond>),
    Not(Box<IndexCond>),
}

impl IndexCond {
    pub fn eval(&self, binding: &[i64], arrays: &[ArrayDecl]) -> Result<bool, ProgramError> {
        Ok(match self {
            IndexCond::True => true,
            IndexCond::Cmp(op, a, b) => {
                let (x, y) = (a.eval(binding, arrays)?, b.eval(binding, arrays)?);
                op.holds(&Value::Int(x), &Value::Int(y))
            }
            IndexCond::And(v) => {
                for c in v {
                    if !c.eval(binding, arrays)? {
                        return Ok(false);
                    }
                }
                true
            }
            IndexCond::Or(v) => {
                for c in v {
                    if c.eval(binding, arrays)? {
                        return Ok(true);
                    }
                }
                false
            }
            IndexCond::Not(c) => !c.eval(binding, arrays)?,
        })
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(usize)) {
        match self {
            IndexCond::True => {}
            IndexCond::Cmp(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            IndexCond::And(v) | IndexCond::Or(v) => v.iter().for_each(|c| c.for_each_var(f)),
            IndexCond::Not(c) => c.for_each_var(f),
        }
    }

    pub fn and(self, other: IndexCond) -> IndexCond {
        match (self, other) {
            (IndexCond::True, c) | (c, IndexCond::True) => c,
            (IndexCond::And(mut a), IndexCond::And(b)) => {
                a.extend(b);
                IndexCond::And(a)
            }
            (IndexCond::And(mut a), c) => {
                a.push(c);
                IndexCond::And(a)
            }
            (a, b) => IndexCond::And(vec![a, b]),
        }
    }
}

/// `forall (i1 in D1, ..., im in Dm where cond)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Generator {
    pub vars: Vec<(String, IndexRange)>,
    pub cond: Option<IndexCond>,
}

impl Generator {
    pub fn empty() -> Self {
        Generator::default()
    }

    pub fn new(vars: Vec<(String, IndexRange)>, cond: Option<IndexCond>) -> Self {
        Generator { vars, cond }
    }

    /// Size of the domain product, without enumerating it.
    pub fn domain_size(&self) -> u64 {
        self.vars.iter().map(|(_, r)| r.len()).product()
    }

    pub fn ranges(&self) -> Vec<IndexRange> {
        self.vars.iter().map(|(_, r)| *r).collect()
    }

    pub fn holds(&self, binding: &[i64], arrays: &[ArrayDecl]) -> Result<bool, ProgramError> {
        match &self.cond {
            None => Ok(true),
            Some(c) => c.eval(binding, arrays),
        }
    }

    /// Every binding satisfying the generator, in lexicographic order.
    pub fn bindings(&self, arrays: &[ArrayDecl]) -> Result<Vec<Vec<i64>>, ProgramError> {
        let mut out = Vec::new();
        let mut err = None;
        enumerate_ranges(&self.ranges(), &mut Vec::new(), &mut |t| {
            if err.is_some() {
                return;
            }
            match self.holds(t, arrays) {
                Ok(true) => out.push(t.to_vec()),
                Ok(false) => {}
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Access {
    pub array: ArrayId,
    pub index: Vec<IndexExpr>,
}

impl Access {
    pub fn new(array: ArrayId, index: Vec<IndexExpr>) -> Self {
        Access { array, index }
    }

    pub fn scalar(array: ArrayId) -> Self {
        Access { array, index: Vec::new() }
    }

    pub fn eval_index(&self, binding: &[i64], arrays: &[ArrayDecl]) -> Result<Vec<i64>, ProgramError> {
        self.index.iter().map(|e| e.eval(binding, arrays)).collect()
    }
}

/// Leaf of a non-ground expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leaf {
    Access(Access),
    /// An index expression used as an integer value.
    Index(IndexExpr),
}

pub type NgExpr = Expr<Leaf>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(pub u32);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// `forall gen: (head >= body, head)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub id: RuleId,
    /// Id of the source rule this one was derived from by flattening.
    pub origin: RuleId,
    /// Subexpression path inside the source rule (empty for source rules).
    pub path: Vec<u32>,
    pub gen: Generator,
    pub head: Access,
    pub body: NgExpr,
}

impl Rule {
    pub fn new(id: u32, gen: Generator, head: Access, body: NgExpr) -> Self {
        Rule { id: RuleId(id), origin: RuleId(id), path: Vec::new(), gen, head, body }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub gen: Generator,
    pub body: NgExpr,
}

/// A non-ground program with its data bound.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Program {
    pub arrays: Vec<ArrayDecl>,
    pub rules: Vec<Rule>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<NgExpr>,
    pub outputs: Vec<(ArrayId, Vec<i64>)>,
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    pub fn add_array(&mut self, decl: ArrayDecl) -> ArrayId {
        self.arrays.push(decl);
        self.arrays.len() - 1
    }

    pub fn array_id(&self, name: &str) -> Option<ArrayId> {
        self.arrays.iter().position(|a| a.name == name)
    }

    pub fn array(&self, id: ArrayId) -> &ArrayDecl {
        &self.arrays[id]
    }

    pub fn next_rule_id(&self) -> u32 {
        self.rules.iter().map(|r| r.id.0 + 1).max().unwrap_or(0)
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Whether a leaf refers to a founded array.
    pub fn leaf_is_founded(&self, l: &Leaf) -> bool {
        matches!(l, Leaf::Access(a) if self.arrays[a.array].kind.is_founded())
    }

    pub fn leaf_is_decision(&self, l: &Leaf) -> bool {
        matches!(l, Leaf::Access(a) if self.arrays[a.array].kind != ArrayKind::Param)
    }

    pub fn leaf_is_bool(&self, l: &Leaf) -> bool {
        matches!(l, Leaf::Access(a) if self.arrays[a.array].ty == ValueType::Bool)
    }

    /// Display helper for accesses and expressions in rule context.
    pub fn show_access(&self, a: &Access, gen: &Generator) -> String {
        let mut s = self.arrays[a.array].name.clone();
        if let ArrayKind::Magic(base) = self.arrays[a.array].kind {
            s = format!("m_{}", self.arrays[base].name);
        }
        if !a.index.is_empty() {
            s.push('[');
            for (k, e) in a.index.iter().enumerate() {
                if k > 0 {
                    s.push_str(", ");
                }
                s.push_str(&self.show_index(e, gen));
            }
            s.push(']');
        }
        s
    }

    pub fn show_index(&self, e: &IndexExpr, gen: &Generator) -> String {
        match e {
            IndexExpr::Lit(v) => v.to_string(),
            IndexExpr::Var(i) => gen.vars.get(*i).map(|(n, _)| n.clone()).unwrap_or_else(|| format!("?{i}")),
            IndexExpr::Add(v) => {
                let mut s = String::new();
                for (k, c) in v.iter().enumerate() {
                    match c {
                        IndexExpr::Lit(x) if k > 0 && *x < 0 => s.push_str(&format!(" - {}", -x)),
                        IndexExpr::Neg(inner) if k > 0 => s.push_str(&format!(" - {}", self.show_index(inner, gen))),
                        _ => {
                            if k > 0 {
                                s.push_str(" + ");
                            }
                            s.push_str(&self.show_index(c, gen));
                        }
                    }
                }
                format!("({s})")
            }
            IndexExpr::Mul(a, b) => format!("({} * {})", self.show_index(a, gen), self.show_index(b, gen)),
            IndexExpr::Neg(a) => format!("(-{})", self.show_index(a, gen)),
            IndexExpr::Mod(a, b) => format!("({} mod {})", self.show_index(a, gen), self.show_index(b, gen)),
            IndexExpr::Div(a, b) => format!("({} div {})", self.show_index(a, gen), self.show_index(b, gen)),
            IndexExpr::Param(arr, idx) => {
                self.show_access(&Access { array: *arr, index: idx.clone() }, gen)
            }
        }
    }

    pub fn show_expr(&self, e: &NgExpr, gen: &Generator) -> String {
        let shown: Expr<Shown> = e
            .map_leaves(&mut |l| {
                Ok::<_, ()>(Expr::Leaf(Shown(match l {
                    Leaf::Access(a) => self.show_access(a, gen),
                    Leaf::Index(ix) => self.show_index(ix, gen),
                })))
            })
            .unwrap();
        shown.to_string()
    }

    pub fn show_rule(&self, r: &Rule) -> String {
        format!("{} >= {}", self.show_access(&r.head, &r.gen), self.show_expr(&r.body, &r.gen))
    }
}

/// Pre-rendered leaf, used for display only.
#[derive(Clone, Debug)]
pub struct Shown(pub String);

impl fmt::Display for Shown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn fmt_tuple(t: &[i64]) -> String {
    let parts: Vec<String> = t.iter().map(|i| i.to_string()).collect();
    format!("[{}]", parts.join(", "))
}
