//! Name, arity and kind checks that need only the model text.

use std::collections::BTreeMap;

use bfasp_core::ValueType;

use super::ast::*;
use super::error::{ErrorKind, FrontendError, Pos};

#[derive(Clone, Debug)]
pub struct ArrayInfo {
    pub kind: DeclKind,
    pub ty: ValueType,
    pub arity: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Env {
    pub sets: BTreeMap<String, Pos>,
    pub arrays: BTreeMap<String, ArrayInfo>,
}

type R = Result<(), FrontendError>;

fn err(kind: ErrorKind, pos: Pos, msg: String) -> FrontendError {
    FrontendError::new(kind, pos, msg)
}

pub fn collect_env(m: &Model) -> Result<Env, FrontendError> {
    let mut env = Env::default();
    for item in &m.items {
        let (name, pos) = match item {
            Item::Set(s) => (&s.name, s.pos),
            Item::Array(a) => (&a.name, a.pos),
            _ => continue,
        };
        if env.sets.contains_key(name) || env.arrays.contains_key(name) {
            return Err(err(ErrorKind::KindMismatch, pos, format!("{name} is declared twice")));
        }
        match item {
            Item::Set(_) => {
                env.sets.insert(name.clone(), pos);
            }
            Item::Array(a) => {
                env.arrays.insert(name.clone(), ArrayInfo { kind: a.kind, ty: a.ty, arity: a.dims.len() });
            }
            _ => {}
        }
    }
    Ok(env)
}

pub fn check_model(m: &Model) -> Result<Env, FrontendError> {
    let env = collect_env(m)?;
    let c = Checker { env: &env };
    for item in &m.items {
        match item {
            Item::Set(s) => {
                for b in [&s.lo, &s.hi] {
                    if let SetBound::Param(p) = b {
                        c.scalar_int_param(p, s.pos)?;
                    }
                }
            }
            Item::Array(a) => {
                for d in &a.dims {
                    if !env.sets.contains_key(d) {
                        return Err(err(ErrorKind::UnknownIdentifier, a.pos, format!("unknown set {d}")));
                    }
                }
            }
            Item::Rule { quant, head, body, guard, .. } => {
                let scope = c.quant(quant.as_ref(), &[])?;
                c.head(head, &scope)?;
                c.value(body, &scope)?;
                if let Some(g) = guard {
                    c.value(g, &scope)?;
                }
            }
            Item::Constraint { quant, body, .. } => {
                let scope = c.quant(quant.as_ref(), &[])?;
                c.value(body, &scope)?;
            }
            Item::Minimize(e, _) => c.value(e, &[])?,
            Item::Output(v, _) => {
                for a in v {
                    match a {
                        Ast::Name(n, p) => {
                            c.array(n, *p)?;
                        }
                        Ast::Index(n, args, p) => {
                            c.access(n, args, *p, &[])?;
                        }
                        other => return Err(FrontendError::syntax(other.pos(), "output expects array elements")),
                    }
                }
            }
        }
    }
    Ok(env)
}

struct Checker<'a> {
    env: &'a Env,
}

impl Checker<'_> {
    fn array(&self, name: &str, pos: Pos) -> Result<&ArrayInfo, FrontendError> {
        self.env.arrays.get(name).ok_or_else(|| err(ErrorKind::UnknownIdentifier, pos, format!("unknown array {name}")))
    }

    fn scalar_int_param(&self, name: &str, pos: Pos) -> R {
        let a = self.array(name, pos)?;
        if a.kind != DeclKind::Param || a.arity != 0 || a.ty != ValueType::Int {
            return Err(err(ErrorKind::KindMismatch, pos, format!("{name} must be a scalar integer parameter")));
        }
        Ok(())
    }

    fn quant(&self, q: Option<&Quant>, outer: &[String]) -> Result<Vec<String>, FrontendError> {
        let mut scope = outer.to_vec();
        if let Some(q) = q {
            for (v, s, pos) in &q.vars {
                if !self.env.sets.contains_key(s) {
                    return Err(err(ErrorKind::UnknownIdentifier, *pos, format!("unknown set {s}")));
                }
                if self.env.arrays.contains_key(v) || self.env.sets.contains_key(v) {
                    return Err(err(ErrorKind::KindMismatch, *pos, format!("index variable {v} shadows a declaration")));
                }
                scope.push(v.clone());
            }
            if let Some(c) = &q.cond {
                self.cond(c, &scope)?;
            }
        }
        Ok(scope)
    }

    fn head(&self, h: &Ast, scope: &[String]) -> R {
        let (name, pos) = match h {
            Ast::Name(n, p) => (n, *p),
            Ast::Index(n, _, p) => (n, *p),
            other => return Err(FrontendError::syntax(other.pos(), "rule head must be an array element")),
        };
        if self.array(name, pos)?.kind != DeclKind::Founded {
            return Err(err(ErrorKind::KindMismatch, pos, format!("rule head {name} must be a founded array")));
        }
        match h {
            Ast::Index(n, args, p) => self.access(n, args, *p, scope),
            _ => self.access(name, &[], pos, scope),
        }
    }

    fn access(&self, name: &str, args: &[Ast], pos: Pos, scope: &[String]) -> R {
        let a = self.array(name, pos)?;
        if a.arity != args.len() {
            return Err(err(
                ErrorKind::ArityMismatch,
                pos,
                format!("{name} takes {} indices, got {}", a.arity, args.len()),
            ));
        }
        for x in args {
            self.index(x, scope)?;
        }
        Ok(())
    }

    fn index(&self, e: &Ast, scope: &[String]) -> R {
        match e {
            Ast::Num(v, p) => {
                if v.as_int().is_none() || matches!(v, bfasp_core::Value::Bool(_)) {
                    return Err(err(ErrorKind::KindMismatch, *p, "indices must be integers".into()));
                }
                Ok(())
            }
            Ast::Name(n, p) => {
                if scope.contains(n) {
                    Ok(())
                } else if self.env.arrays.contains_key(n) {
                    self.scalar_int_param(n, *p)
                } else {
                    Err(err(ErrorKind::UnboundIndexVariable, *p, format!("index variable {n} is not bound")))
                }
            }
            Ast::Index(n, args, p) => {
                let a = self.array(n, *p)?;
                if a.kind != DeclKind::Param || a.ty != ValueType::Int {
                    return Err(err(ErrorKind::KindMismatch, *p, format!("{n} cannot appear in an index; only integer parameters can")));
                }
                self.access(n, args, *p, scope)
            }
            Ast::Bin(BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod, a, b, _) => {
                self.index(a, scope)?;
                self.index(b, scope)
            }
            Ast::Neg(a, _) => self.index(a, scope),
            other => Err(err(ErrorKind::KindMismatch, other.pos(), "not an integer index expression".into())),
        }
    }

    fn cond(&self, e: &Ast, scope: &[String]) -> R {
        match e {
            Ast::Num(bfasp_core::Value::Bool(_), _) => Ok(()),
            Ast::Bin(BinOp::And | BinOp::Or, a, b, _) => {
                self.cond(a, scope)?;
                self.cond(b, scope)
            }
            Ast::Not(a, _) => self.cond(a, scope),
            Ast::Rel(_, a, b, _) => {
                self.index(a, scope)?;
                self.index(b, scope)
            }
            other => Err(err(ErrorKind::KindMismatch, other.pos(), "not a condition over index variables".into())),
        }
    }

    fn value(&self, e: &Ast, scope: &[String]) -> R {
        match e {
            Ast::Num(..) => Ok(()),
            Ast::Name(n, p) => {
                if scope.contains(n) {
                    return Ok(());
                }
                match self.env.arrays.get(n) {
                    Some(a) if a.arity == 0 => Ok(()),
                    Some(a) => Err(err(ErrorKind::ArityMismatch, *p, format!("{n} takes {} indices, got 0", a.arity))),
                    None => Err(err(ErrorKind::UnknownIdentifier, *p, format!("unknown name {n}"))),
                }
            }
            Ast::Index(n, args, p) => self.access(n, args, *p, scope),
            Ast::Bin(BinOp::Mod, a, b, _) => {
                self.index(a, scope)?;
                self.index(b, scope)
            }
            Ast::Bin(_, a, b, _) | Ast::Rel(_, a, b, _) => {
                self.value(a, scope)?;
                self.value(b, scope)
            }
            Ast::Neg(a, _) | Ast::Not(a, _) => self.value(a, scope),
            Ast::Call(f, args, p) => {
                if args.is_empty() || (*f == Func::Abs && args.len() != 1) {
                    return Err(err(ErrorKind::ArityMismatch, *p, format!("wrong number of arguments to {f:?}")));
                }
                args.iter().try_for_each(|a| self.value(a, scope))
            }
            Ast::Agg(_, q, body, _) => {
                // the condition sees only the aggregate's own variables
                let own = self.quant(Some(q), &[])?;
                let mut inner = scope.to_vec();
                inner.extend(own);
                self.value(body, &inner)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    fn kind(src: &str) -> ErrorKind {
        check_model(&parse(src).unwrap()).unwrap_err().kind
    }

    #[test]
    fn unbound_index_variable() {
        assert_eq!(kind("set S = 1..3; founded int a[S]; rule a[i] >= 1;"), ErrorKind::UnboundIndexVariable);
    }

    #[test]
    fn unknown_and_arity() {
        assert_eq!(kind("founded int a; rule a >= b;"), ErrorKind::UnknownIdentifier);
        assert_eq!(kind("set S = 1..3; founded int a[S]; rule a >= 1;"), ErrorKind::ArityMismatch);
        assert_eq!(kind("set S = 1..3; founded int a[S]; rule forall (i in S): a[i, i] >= 1;"), ErrorKind::ArityMismatch);
    }

    #[test]
    fn kinds() {
        assert_eq!(kind("std int a; rule a >= 1;"), ErrorKind::KindMismatch);
        assert_eq!(
            kind("set S = 1..3; founded int a[S]; std int k; rule forall (i in S): a[k] >= 1;"),
            ErrorKind::KindMismatch
        );
        assert_eq!(kind("set S = 1..n; param real n;"), ErrorKind::KindMismatch);
    }

    #[test]
    fn aggregate_conditions_are_local() {
        let ok = "set S = 1..3; founded int a[S]; rule forall (i in S): a[i] >= sum(j in S where j < 3)(a[j] + i);";
        assert!(check_model(&parse(ok).unwrap()).is_ok());
        let bad = "set S = 1..3; founded int a[S]; rule forall (i in S): a[i] >= sum(j in S where j < i)(a[j]);";
        assert_eq!(kind(bad), ErrorKind::UnboundIndexVariable);
    }
}
