//! Ground programs: variables, rules, constraints and an objective over
//! ground variable ids.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::Expr;
use crate::program::{ArrayId, RuleId};
use crate::value::{Value, ValueType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub founded: bool,
    pub ty: ValueType,
    pub lb: Value,
    pub ub: Value,
    /// Array-level ujb, founded variables only.
    pub ujb: Option<Value>,
    /// Source array element, when known.
    pub origin: Option<(ArrayId, Vec<i64>)>,
}

pub type GExpr = Expr<VarId>;

#[derive(Clone, Debug, PartialEq)]
pub struct GroundRule {
    pub head: VarId,
    pub body: GExpr,
    /// Non-ground rule and binding this instance came from; `None` for
    /// ujb facts and rules read from a file.
    pub source: Option<(RuleId, Vec<i64>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundConstraint {
    pub body: GExpr,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundProgram {
    pub vars: Vec<VarDecl>,
    pub rules: Vec<GroundRule>,
    pub constraints: Vec<GroundConstraint>,
    pub objective: Option<GExpr>,
    by_name: BTreeMap<String, VarId>,
}

/// Canonical ground variable name: `arr_i_j`, negative indices as `n3`.
pub fn ground_name(array: &str, index: &[i64]) -> String {
    let mut s = String::from(array);
    for &i in index {
        if i < 0 {
            s.push_str(&format!("_n{}", i.unsigned_abs()));
        } else {
            s.push_str(&format!("_{i}"));
        }
    }
    s
}

impl GroundProgram {
    pub fn new() -> Self {
        GroundProgram::default()
    }

    /// Add a variable, or return the existing one with the same name.
    pub fn add_var(&mut self, decl: VarDecl) -> VarId {
        if let Some(&v) = self.by_name.get(&decl.name) {
            return v;
        }
        let id = VarId(self.vars.len() as u32);
        self.by_name.insert(decl.name.clone(), id);
        self.vars.push(decl);
        id
    }

    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.vars[id.idx()]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn is_bool(&self, id: &VarId) -> bool {
        self.vars[id.idx()].ty == ValueType::Bool
    }

    pub fn founded_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars.iter().enumerate().filter(|(_, d)| d.founded).map(|(i, _)| VarId(i as u32))
    }

    pub fn show(&self, e: &GExpr) -> String {
        let named: Expr<Named<'_>> = e.map_leaves(&mut |v| Ok::<_, ()>(Expr::Leaf(Named(&self.vars[v.idx()].name)))).unwrap();
        format!("{named}")
    }

    pub fn show_rule(&self, r: &GroundRule) -> String {
        format!("{} >= {}", self.vars[r.head.idx()].name, self.show(&r.body))
    }

    /// Rules rendered as text, sorted; handy for set comparisons.
    pub fn rule_strings(&self) -> Vec<String> {
        let mut v: Vec<String> = self.rules.iter().map(|r| self.show_rule(r)).collect();
        v.sort();
        v
    }
}

struct Named<'a>(&'a str);

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}
