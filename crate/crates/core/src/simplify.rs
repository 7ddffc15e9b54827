//! Local rewriting: double negations, pushing negation inwards, flattening
//! nested associative operators and folding constant nodes.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::expr::Expr;
use crate::value::Value;

pub fn simplify<L: Clone>(e: &Expr<L>) -> Expr<L> {
    let mut out = e.clone();
    for c in out.children_mut() {
        *c = simplify(c);
    }
    local(out)
}

/// Rewrite a node whose children are already simplified.
fn local<L: Clone>(e: Expr<L>) -> Expr<L> {
    match e {
        Expr::Neg(c) => match *c {
            Expr::Neg(x) => *x,
            Expr::Const(v) => match v.neg() {
                Ok(r) => Expr::Const(r),
                Err(_) => Expr::Neg(Box::new(Expr::Const(v))),
            },
            Expr::Sum(v) => local(Expr::Sum(v.into_iter().map(|x| local(Expr::neg(x))).collect())),
            Expr::Max(v) => local(Expr::Min(v.into_iter().map(|x| local(Expr::neg(x))).collect())),
            Expr::Min(v) => local(Expr::Max(v.into_iter().map(|x| local(Expr::neg(x))).collect())),
            Expr::Product(mut v) => {
                match v.iter().position(|x| matches!(x, Expr::Const(_))) {
                    Some(k) => v[k] = local(Expr::neg(v[k].clone())),
                    None => v.insert(0, Expr::int(-1)),
                }
                local(Expr::Product(v))
            }
            other => Expr::neg(other),
        },
        Expr::Not(c) => match *c {
            Expr::Not(x) => *x,
            Expr::Const(Value::Bool(b)) => Expr::Const(Value::Bool(!b)),
            Expr::And(v) => local(Expr::Or(v.into_iter().map(|x| local(Expr::not(x))).collect())),
            Expr::Or(v) => local(Expr::And(v.into_iter().map(|x| local(Expr::not(x))).collect())),
            Expr::Cmp(op, a, b) => match op.complement() {
                Some(op2) => local(Expr::Cmp(op2, a, b)),
                None => Expr::not(Expr::Cmp(op, a, b)),
            },
            other => Expr::not(other),
        },
        Expr::Sum(v) => fold_nary(Expr::Sum(splice(v, |x| matches!(x, Expr::Sum(_))))),
        Expr::Product(v) => fold_nary(Expr::Product(splice(v, |x| matches!(x, Expr::Product(_))))),
        Expr::Max(v) => collapse(fold_nary(Expr::Max(splice(v, |x| matches!(x, Expr::Max(_)))))),
        Expr::Min(v) => collapse(fold_nary(Expr::Min(splice(v, |x| matches!(x, Expr::Min(_)))))),
        Expr::And(v) => collapse(fold_nary(Expr::And(splice(v, |x| matches!(x, Expr::And(_)))))),
        Expr::Or(v) => collapse(fold_nary(Expr::Or(splice(v, |x| matches!(x, Expr::Or(_)))))),
        other => fold_nary(other),
    }
}

/// Inline children that use the same associative operator.
fn splice<L>(v: Vec<Expr<L>>, same: impl Fn(&Expr<L>) -> bool) -> Vec<Expr<L>> {
    let mut out = Vec::with_capacity(v.len());
    for c in v {
        if same(&c) {
            match c {
                Expr::Sum(inner)
                | Expr::Product(inner)
                | Expr::Max(inner)
                | Expr::Min(inner)
                | Expr::And(inner)
                | Expr::Or(inner) => out.extend(inner),
                _ => unreachable!(),
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn collapse<L>(e: Expr<L>) -> Expr<L> {
    match e {
        Expr::Max(mut v) | Expr::Min(mut v) | Expr::And(mut v) | Expr::Or(mut v) if v.len() == 1 => v.pop().unwrap(),
        other => other,
    }
}

/// Evaluate nodes whose children are all constants.
fn fold_nary<L>(e: Expr<L>) -> Expr<L> {
    if matches!(e, Expr::Const(_) | Expr::Leaf(_)) || !e.children().iter().all(|c| matches!(c, Expr::Const(_))) {
        return e;
    }
    match e.eval(&|_| unreachable!(), &|_| false) {
        Ok(v) => Expr::Const(v),
        Err(_) => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::CmpOp;
    use alloc::vec;
    use proptest::prelude::*;

    type E = Expr<u8>;

    fn x(i: u8) -> E {
        Expr::Leaf(i)
    }

    #[test]
    fn double_negations() {
        assert_eq!(simplify(&Expr::not(Expr::not(x(0)))), x(0));
        assert_eq!(simplify(&Expr::neg(Expr::neg(x(0)))), x(0));
    }

    #[test]
    fn negated_max_becomes_min() {
        let e = Expr::neg(Expr::Max(vec![x(2), x(3)]));
        assert_eq!(simplify(&e), Expr::Min(vec![Expr::neg(x(2)), Expr::neg(x(3))]));
    }

    #[test]
    fn subtracting_a_negation() {
        // x1 - (-y)
        let e = Expr::Sum(vec![x(1), Expr::neg(Expr::neg(x(9)))]);
        assert_eq!(simplify(&e), Expr::Sum(vec![x(1), x(9)]));
    }

    #[test]
    fn negated_comparison_and_connectives() {
        let e = Expr::not(Expr::And(vec![Expr::cmp(CmpOp::Ge, x(0), x(1)), x(2)]));
        assert_eq!(
            simplify(&e),
            Expr::Or(vec![Expr::cmp(CmpOp::Lt, x(0), x(1)), Expr::not(x(2))])
        );
    }

    #[test]
    fn constants_fold() {
        let e: E = Expr::Sum(vec![Expr::int(2), Expr::int(3)]);
        assert_eq!(simplify(&e), Expr::int(5));
        let e: E = Expr::Max(vec![Expr::int(4), Expr::Const(Value::NegInf)]);
        assert_eq!(simplify(&e), Expr::int(4));
    }

    #[test]
    fn neg_max_pointwise() {
        let e = Expr::neg(Expr::Max(vec![x(0), x(1)]));
        let s = simplify(&e);
        for a in -3..=3 {
            for b in -3..=3 {
                let vals = [a, b];
                let f = |l: &u8| Ok(Value::Int(vals[*l as usize]));
                assert_eq!(e.eval(&f, &|_| false).unwrap(), s.eval(&f, &|_| false).unwrap());
            }
        }
    }

    fn arb_num() -> impl Strategy<Value = E> {
        let leaf = prop_oneof![(0u8..3).prop_map(Expr::Leaf), (-2i64..3).prop_map(Expr::int)];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::Sum),
                prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::Product),
                prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::Max),
                prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::Min),
                inner.prop_map(Expr::neg),
            ]
        })
    }

    fn arb_bool() -> impl Strategy<Value = E> {
        let atom = prop_oneof![
            (0u8..3).prop_map(|i| Expr::Leaf(i + 10)),
            (arb_num(), arb_num(), 0usize..5).prop_map(|(a, b, k)| {
                let op = [CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt, CmpOp::Eq][k];
                Expr::cmp(op, a, b)
            }),
        ];
        atom.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::And),
                prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::Or),
                inner.prop_map(Expr::not),
            ]
        })
    }

    proptest! {
        #[test]
        fn simplify_preserves_numeric_eval(e in arb_num()) {
            let s = simplify(&e);
            for a in -2..=2 { for b in -2..=2 { for c in -2..=2 {
                let vals = [a, b, c];
                let f = |l: &u8| Ok(Value::Int(vals[*l as usize]));
                let (u, v) = (e.eval(&f, &|_| false), s.eval(&f, &|_| false));
                if let (Ok(u), Ok(v)) = (&u, &v) {
                    prop_assert!(u.num_eq(v), "{:?} vs {:?}", u, v);
                } else {
                    prop_assert_eq!(u.is_ok(), v.is_ok());
                }
            }}}
        }

        #[test]
        fn simplify_preserves_boolean_eval(e in arb_bool()) {
            let s = simplify(&e);
            for bits in 0..64u32 {
                let f = |l: &u8| Ok(if *l >= 10 {
                    Value::Bool(bits >> (*l - 10) & 1 == 1)
                } else {
                    Value::Int((bits >> (3 + *l)) as i64 % 3 - 1)
                });
                let (u, v) = (e.eval(&f, &|l| *l >= 10).unwrap(), s.eval(&f, &|l| *l >= 10).unwrap());
                prop_assert!(u.num_eq(&v));
            }
        }

        #[test]
        fn simplify_is_idempotent(e in arb_num()) {
            let s = simplify(&e);
            prop_assert_eq!(simplify(&s), s);
        }
    }
}
