//! Untyped syntax tree of a model file.

use bfasp_core::{CmpOp, Value, ValueType};

use super::error::Pos;

#[derive(Clone, Debug, PartialEq)]
pub enum SetBound {
    Int(i64),
    /// Scalar integer parameter.
    Param(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetDecl {
    pub name: String,
    pub lo: SetBound,
    pub hi: SetBound,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Param,
    Founded,
    Std,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrayDeclAst {
    pub kind: DeclKind,
    pub ty: ValueType,
    pub name: String,
    pub dims: Vec<String>,
    pub bounds: Option<(Value, Value)>,
    pub ujb: Option<Value>,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sum,
    Min,
    Max,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Cmp(CmpOp),
    Ne,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quant {
    /// (variable, set) pairs.
    pub vars: Vec<(String, String, Pos)>,
    pub cond: Option<Box<Ast>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Value, Pos),
    Name(String, Pos),
    Index(String, Vec<Ast>, Pos),
    Bin(BinOp, Box<Ast>, Box<Ast>, Pos),
    Neg(Box<Ast>, Pos),
    Not(Box<Ast>, Pos),
    Rel(Rel, Box<Ast>, Box<Ast>, Pos),
    Call(Func, Vec<Ast>, Pos),
    /// `sum(i in S where c)(e)` and its min/max variants.
    Agg(Func, Quant, Box<Ast>, Pos),
}

impl Ast {
    pub fn pos(&self) -> Pos {
        match self {
            Ast::Num(_, p)
            | Ast::Name(_, p)
            | Ast::Index(_, _, p)
            | Ast::Bin(_, _, _, p)
            | Ast::Neg(_, p)
            | Ast::Not(_, p)
            | Ast::Rel(_, _, _, p)
            | Ast::Call(_, _, p)
            | Ast::Agg(_, _, _, p) => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Set(SetDecl),
    Array(ArrayDeclAst),
    /// `head >= body <- guard`, or `head <- body` for Boolean heads.
    Rule { quant: Option<Quant>, head: Ast, body: Ast, guard: Option<Ast>, pos: Pos },
    Constraint { quant: Option<Quant>, body: Ast, pos: Pos },
    Minimize(Ast, Pos),
    Output(Vec<Ast>, Pos),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    pub items: Vec<Item>,
}
