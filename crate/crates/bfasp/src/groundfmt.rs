//! Line-oriented text format for ground programs.
//!
//! ```text
//! # bfasp ground program
//! var founded int a_2 lb=-inf ub=inf ujb=-inf
//! var std bool s1_4 lb=false ub=true
//! rule a_2 >= sum(b_1, y_2)
//! constraint ge(sum(a_2, a_5), 10)
//! minimize a_2
//! ```
//!
//! Each section is sorted, so emitting the same program twice gives the same
//! bytes.

use bfasp_core::ground::{GExpr, GroundConstraint, GroundProgram, GroundRule, VarDecl};
use bfasp_core::{CmpOp, Expr, Value, ValueType};
use thiserror::Error;

pub const HEADER: &str = "# bfasp ground program";

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn var_line(d: &VarDecl) -> String {
    let kind = if d.founded { "founded" } else { "std" };
    let mut s = format!("var {kind} {} {} lb={} ub={}", d.ty, d.name, d.lb, d.ub);
    if let Some(u) = d.ujb {
        s.push_str(&format!(" ujb={u}"));
    }
    s
}

pub fn emit(g: &GroundProgram) -> String {
    let mut vars: Vec<&VarDecl> = g.vars.iter().collect();
    vars.sort_by(|a, b| a.name.cmp(&b.name));
    let mut cons: Vec<String> = g.constraints.iter().map(|c| format!("constraint {}", g.show(&c.body))).collect();
    cons.sort();
    let mut out = String::from(HEADER);
    out.push('\n');
    for d in vars {
        out.push_str(&var_line(d));
        out.push('\n');
    }
    for r in g.rule_strings() {
        out.push_str("rule ");
        out.push_str(&r);
        out.push('\n');
    }
    for c in cons {
        out.push_str(&c);
        out.push('\n');
    }
    if let Some(o) = &g.objective {
        out.push_str(&format!("minimize {}\n", g.show(o)));
    }
    out
}

pub fn parse_value(s: &str) -> Option<Value> {
    match s {
        "inf" => Some(Value::PosInf),
        "-inf" => Some(Value::NegInf),
        "true" => Some(Value::TRUE),
        "false" => Some(Value::FALSE),
        _ => {
            if let Ok(i) = s.parse::<i64>() {
                Some(Value::Int(i))
            } else {
                s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Value::Real)
            }
        }
    }
}

pub fn parse(text: &str) -> Result<GroundProgram, FormatError> {
    let mut g = GroundProgram::new();
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).collect();
    // declarations first so that rules may mention any variable
    for &(n, l) in &lines {
        if let Some(rest) = l.strip_prefix("var ") {
            let d = parse_var(rest).map_err(|msg| FormatError { line: n, msg })?;
            if g.lookup(&d.name).is_some() {
                return Err(FormatError { line: n, msg: format!("variable {} declared twice", d.name) });
            }
            g.add_var(d);
        }
    }
    for &(n, l) in &lines {
        let fail = |msg: String| FormatError { line: n, msg };
        let (kw, rest) = l.split_once(' ').unwrap_or((l, ""));
        match kw {
            "var" => {}
            "rule" => {
                let (head, body) = rest.split_once(">=").ok_or_else(|| fail("expected 'head >= body'".into()))?;
                let head = g.lookup(head.trim()).ok_or_else(|| fail(format!("unknown variable {}", head.trim())))?;
                if !g.var(head).founded {
                    return Err(fail("rule head must be founded".into()));
                }
                let body = parse_expr(&g, body).map_err(fail)?;
                g.rules.push(GroundRule { head, body, source: None });
            }
            "constraint" => {
                let body = parse_expr(&g, rest).map_err(fail)?;
                g.constraints.push(GroundConstraint { body });
            }
            "minimize" => {
                g.objective = Some(parse_expr(&g, rest).map_err(fail)?);
            }
            _ => return Err(fail(format!("unknown line kind '{kw}'"))),
        }
    }
    Ok(g)
}

fn parse_var(rest: &str) -> Result<VarDecl, String> {
    let parts: Vec<&str> = rest.split_whitespace().collect();
    if parts.len() < 5 {
        return Err("expected 'var <kind> <type> <name> lb=<v> ub=<v>'".into());
    }
    let founded = match parts[0] {
        "founded" => true,
        "std" => false,
        k => return Err(format!("unknown variable kind {k}")),
    };
    let ty = match parts[1] {
        "bool" => ValueType::Bool,
        "int" => ValueType::Int,
        "real" => ValueType::Real,
        t => return Err(format!("unknown type {t}")),
    };
    let mut d = VarDecl {
        name: parts[2].to_string(),
        founded,
        ty,
        lb: ty.bottom(),
        ub: if ty == ValueType::Bool { Value::TRUE } else { Value::PosInf },
        ujb: None,
        origin: None,
    };
    for kv in &parts[3..] {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, found {kv}"))?;
        let v = parse_value(v).ok_or_else(|| format!("bad value {v}"))?;
        match k {
            "lb" => d.lb = v,
            "ub" => d.ub = v,
            "ujb" => d.ujb = Some(v),
            _ => return Err(format!("unknown attribute {k}")),
        }
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Comma,
    Arrow,
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '<' if cs.get(i + 1) == Some(&'-') => {
                out.push(Tok::Arrow);
                i += 2;
            }
            _ if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' || c == '+' => {
                let start = i;
                i += 1;
                while i < cs.len() && (cs[i].is_alphanumeric() || matches!(cs[i], '_' | '.' | '-' | '+')) {
                    i += 1;
                }
                out.push(Tok::Word(cs[start..i].iter().collect()));
            }
            _ => return Err(format!("unexpected character '{c}'")),
        }
    }
    Ok(out)
}

pub fn parse_expr(g: &GroundProgram, s: &str) -> Result<GExpr, String> {
    let toks = lex(s)?;
    let mut at = 0;
    let e = guarded(g, &toks, &mut at)?;
    if at != toks.len() {
        return Err(format!("trailing input in '{}'", s.trim()));
    }
    Ok(e)
}

fn guarded(g: &GroundProgram, t: &[Tok], at: &mut usize) -> Result<GExpr, String> {
    let mut e = term(g, t, at)?;
    while t.get(*at) == Some(&Tok::Arrow) {
        *at += 1;
        e = Expr::guard(e, term(g, t, at)?);
    }
    Ok(e)
}

fn term(g: &GroundProgram, t: &[Tok], at: &mut usize) -> Result<GExpr, String> {
    let Some(Tok::Word(w)) = t.get(*at) else {
        return Err("expected a term".into());
    };
    *at += 1;
    if t.get(*at) == Some(&Tok::Open) {
        *at += 1;
        let mut args = Vec::new();
        if t.get(*at) == Some(&Tok::Close) {
            *at += 1;
        } else {
            loop {
                args.push(guarded(g, t, at)?);
                match t.get(*at) {
                    Some(Tok::Comma) => *at += 1,
                    Some(Tok::Close) => {
                        *at += 1;
                        break;
                    }
                    _ => return Err(format!("unclosed call to {w}")),
                }
            }
        }
        return build(w, args);
    }
    if let Some(v) = parse_value(w) {
        return Ok(Expr::Const(v));
    }
    g.lookup(w).map(Expr::Leaf).ok_or_else(|| format!("unknown variable {w}"))
}

fn build(op: &str, mut args: Vec<GExpr>) -> Result<GExpr, String> {
    let one = |args: &mut Vec<GExpr>| -> Result<Box<GExpr>, String> {
        if args.len() == 1 {
            Ok(Box::new(args.pop().unwrap()))
        } else {
            Err(format!("{op} takes one argument"))
        }
    };
    let cmp = |c: CmpOp, mut args: Vec<GExpr>| -> Result<GExpr, String> {
        if args.len() != 2 {
            return Err(format!("{op} takes two arguments"));
        }
        let b = args.pop().unwrap();
        Ok(Expr::cmp(c, args.pop().unwrap(), b))
    };
    Ok(match op {
        "sum" => Expr::Sum(args),
        "prod" => Expr::Product(args),
        "max" => Expr::Max(args),
        "min" => Expr::Min(args),
        "and" => Expr::And(args),
        "or" => Expr::Or(args),
        "neg" => Expr::Neg(one(&mut args)?),
        "inv" => Expr::Recip(one(&mut args)?),
        "not" => Expr::Not(one(&mut args)?),
        "ge" => cmp(CmpOp::Ge, args)?,
        "gt" => cmp(CmpOp::Gt, args)?,
        "le" => cmp(CmpOp::Le, args)?,
        "lt" => cmp(CmpOp::Lt, args)?,
        "eq" => cmp(CmpOp::Eq, args)?,
        _ => return Err(format!("unknown operator {op}")),
    })
}
