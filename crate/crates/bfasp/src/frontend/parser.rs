//! Recursive-descent parser producing a [`Model`].

use bfasp_core::{CmpOp, Value, ValueType};

use super::ast::*;
use super::error::{FrontendError, Pos};
use super::lexer::{tokenize, Tok, Token};

pub fn parse(src: &str) -> Result<Model, FrontendError> {
    let mut p = Parser { toks: tokenize(src)?, at: 0 };
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(Model { items })
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type R<T> = Result<T, FrontendError>;

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(i) => i.to_string(),
        Tok::Real(x) => x.to_string(),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        let hit = self.is_kw(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn unexpected<T>(&self, wanted: &str) -> R<T> {
        Err(FrontendError::syntax(self.pos(), format!("expected {wanted}, found {}", describe(self.peek()))))
    }

    fn expect_sym(&mut self, s: &str) -> R<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> R<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn ident(&mut self) -> R<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.pos();
                self.bump();
                Ok((s, pos))
            }
            _ => self.unexpected("a name"),
        }
    }

    fn item(&mut self) -> R<Item> {
        let pos = self.pos();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.unexpected("a declaration"),
        };
        match kw.as_str() {
            "set" => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect_sym("=")?;
                let lo = self.set_bound()?;
                self.expect_sym("..")?;
                let hi = self.set_bound()?;
                self.expect_sym(";")?;
                Ok(Item::Set(SetDecl { name, lo, hi, pos }))
            }
            "param" | "founded" | "std" => {
                self.bump();
                let kind = match kw.as_str() {
                    "param" => DeclKind::Param,
                    "founded" => DeclKind::Founded,
                    _ => DeclKind::Std,
                };
                self.array_decl(kind, pos)
            }
            "rule" | "forall" => {
                self.eat_kw("rule");
                self.rule(pos)
            }
            "constraint" => {
                self.bump();
                let quant = self.opt_forall()?;
                let body = self.expr()?;
                self.expect_sym(";")?;
                Ok(Item::Constraint { quant, body, pos })
            }
            "minimize" => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(";")?;
                Ok(Item::Minimize(e, pos))
            }
            "output" => {
                self.bump();
                let mut v = vec![self.access()?];
                while self.eat_sym(",") {
                    v.push(self.access()?);
                }
                self.expect_sym(";")?;
                Ok(Item::Output(v, pos))
            }
            _ => self.unexpected("a declaration"),
        }
    }

    fn set_bound(&mut self) -> R<SetBound> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(SetBound::Int(if neg { -i } else { i }))
            }
            Tok::Ident(s) if !neg => {
                self.bump();
                Ok(SetBound::Param(s))
            }
            _ => self.unexpected("an integer or parameter name"),
        }
    }

    fn value_bound(&mut self) -> R<Value> {
        let neg = self.eat_sym("-");
        let v = match self.peek().clone() {
            Tok::Int(i) => Value::Int(i),
            Tok::Real(x) => Value::Real(x),
            Tok::Ident(s) if s == "inf" => Value::PosInf,
            Tok::Ident(s) if s == "true" && !neg => Value::TRUE,
            Tok::Ident(s) if s == "false" && !neg => Value::FALSE,
            _ => return self.unexpected("a bound"),
        };
        self.bump();
        Ok(if neg {
            match v {
                Value::Int(i) => Value::Int(-i),
                Value::Real(x) => Value::Real(-x),
                _ => Value::NegInf,
            }
        } else {
            v
        })
    }

    fn array_decl(&mut self, kind: DeclKind, pos: Pos) -> R<Item> {
        let ty = if self.eat_kw("int") {
            ValueType::Int
        } else if self.eat_kw("real") {
            ValueType::Real
        } else if self.eat_kw("bool") {
            ValueType::Bool
        } else {
            return self.unexpected("'int', 'real' or 'bool'");
        };
        let (name, _) = self.ident()?;
        let mut dims = Vec::new();
        if self.eat_sym("[") {
            dims.push(self.ident()?.0);
            while self.eat_sym(",") {
                dims.push(self.ident()?.0);
            }
            self.expect_sym("]")?;
        }
        let mut bounds = None;
        let mut ujb = None;
        if kind != DeclKind::Param && self.eat_kw("in") {
            let lo = self.value_bound()?;
            self.expect_sym("..")?;
            bounds = Some((lo, self.value_bound()?));
        }
        if kind == DeclKind::Founded && self.eat_kw("ujb") {
            ujb = Some(self.value_bound()?);
        }
        self.expect_sym(";")?;
        Ok(Item::Array(ArrayDeclAst { kind, ty, name, dims, bounds, ujb, pos }))
    }

    fn opt_forall(&mut self) -> R<Option<Quant>> {
        if !self.eat_kw("forall") {
            return Ok(None);
        }
        self.expect_sym("(")?;
        let q = self.quant_body()?;
        self.expect_sym(")")?;
        self.expect_sym(":")?;
        Ok(Some(q))
    }

    // `i in S, j in T where cond`, without the parentheses.
    fn quant_body(&mut self) -> R<Quant> {
        let mut vars = Vec::new();
        loop {
            let (v, pos) = self.ident()?;
            self.expect_kw("in")?;
            let (s, _) = self.ident()?;
            vars.push((v, s, pos));
            if !self.eat_sym(",") {
                break;
            }
        }
        let cond = if self.eat_kw("where") { Some(Box::new(self.expr()?)) } else { None };
        Ok(Quant { vars, cond })
    }

    fn rule(&mut self, pos: Pos) -> R<Item> {
        let quant = self.opt_forall()?;
        let head = self.access()?;
        let (body, guard) = if self.eat_sym(">=") {
            let body = self.expr()?;
            let guard = if self.eat_sym("<-") { Some(self.expr()?) } else { None };
            (body, guard)
        } else if self.eat_sym("<-") {
            (self.expr()?, None)
        } else {
            return self.unexpected("'>=' or '<-'");
        };
        self.expect_sym(";")?;
        Ok(Item::Rule { quant, head, body, guard, pos })
    }

    fn access(&mut self) -> R<Ast> {
        let (name, pos) = self.ident()?;
        if self.eat_sym("[") {
            let args = self.args("]")?;
            Ok(Ast::Index(name, args, pos))
        } else {
            Ok(Ast::Name(name, pos))
        }
    }

    fn args(&mut self, close: &str) -> R<Vec<Ast>> {
        let mut v = Vec::new();
        if self.eat_sym(close) {
            return Ok(v);
        }
        loop {
            v.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(v);
            }
            self.expect_sym(",")?;
        }
    }

    pub fn expr(&mut self) -> R<Ast> {
        let mut e = self.and_expr()?;
        while self.is_kw("or") {
            let pos = self.bump().pos;
            e = Ast::Bin(BinOp::Or, Box::new(e), Box::new(self.and_expr()?), pos);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> R<Ast> {
        let mut e = self.not_expr()?;
        while self.is_kw("and") {
            let pos = self.bump().pos;
            e = Ast::Bin(BinOp::And, Box::new(e), Box::new(self.not_expr()?), pos);
        }
        Ok(e)
    }

    fn not_expr(&mut self) -> R<Ast> {
        if self.is_kw("not") {
            let pos = self.bump().pos;
            return Ok(Ast::Not(Box::new(self.not_expr()?), pos));
        }
        self.rel_expr()
    }

    fn rel_expr(&mut self) -> R<Ast> {
        let a = self.add_expr()?;
        let rel = match self.peek() {
            Tok::Sym(">=") => Rel::Cmp(CmpOp::Ge),
            Tok::Sym(">") => Rel::Cmp(CmpOp::Gt),
            Tok::Sym("<=") => Rel::Cmp(CmpOp::Le),
            Tok::Sym("<") => Rel::Cmp(CmpOp::Lt),
            Tok::Sym("==") => Rel::Cmp(CmpOp::Eq),
            Tok::Sym("!=") => Rel::Ne,
            _ => return Ok(a),
        };
        let pos = self.bump().pos;
        Ok(Ast::Rel(rel, Box::new(a), Box::new(self.add_expr()?), pos))
    }

    fn add_expr(&mut self) -> R<Ast> {
        let mut e = self.mul_expr()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            let pos = self.bump().pos;
            e = Ast::Bin(op, Box::new(e), Box::new(self.mul_expr()?), pos);
        }
    }

    fn mul_expr(&mut self) -> R<Ast> {
        let mut e = self.unary()?;
        loop {
            let op = if self.is_sym("*") {
                BinOp::Mul
            } else if self.is_sym("/") {
                BinOp::Div
            } else if self.is_kw("mod") {
                BinOp::Mod
            } else {
                return Ok(e);
            };
            let pos = self.bump().pos;
            e = Ast::Bin(op, Box::new(e), Box::new(self.unary()?), pos);
        }
    }

    fn unary(&mut self) -> R<Ast> {
        if self.is_sym("-") {
            let pos = self.bump().pos;
            return Ok(Ast::Neg(Box::new(self.unary()?), pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> R<Ast> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Ast::Num(Value::Int(i), pos))
            }
            Tok::Real(x) => {
                self.bump();
                Ok(Ast::Num(Value::Real(x), pos))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) => {
                let lit = match s.as_str() {
                    "inf" => Some(Value::PosInf),
                    "true" => Some(Value::TRUE),
                    "false" => Some(Value::FALSE),
                    _ => None,
                };
                if let Some(v) = lit {
                    self.bump();
                    return Ok(Ast::Num(v, pos));
                }
                let func = match s.as_str() {
                    "sum" => Some(Func::Sum),
                    "min" => Some(Func::Min),
                    "max" => Some(Func::Max),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let (Some(f), Tok::Sym("(")) = (func, self.peek_at(1)) {
                    self.bump();
                    self.bump();
                    let is_agg = f != Func::Abs
                        && matches!(self.peek(), Tok::Ident(_))
                        && matches!(self.peek_at(1), Tok::Ident(k) if k == "in");
                    if is_agg {
                        let q = self.quant_body()?;
                        self.expect_sym(")")?;
                        self.expect_sym("(")?;
                        let body = self.expr()?;
                        self.expect_sym(")")?;
                        return Ok(Ast::Agg(f, q, Box::new(body), pos));
                    }
                    let args = self.args(")")?;
                    return Ok(Ast::Call(f, args, pos));
                }
                self.access()
            }
            _ => self.unexpected("an expression"),
        }
    }
}
