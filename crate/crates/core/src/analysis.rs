//! Predicate dependency graph, SCCs and validity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::ProgramError;
use crate::monotonicity::{monotonicity, Monotonicity};
use crate::program::{ArrayId, ArrayKind, Leaf, Program, RuleId};
use crate::ujb::{leaf_interval, FoundedAt};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepEdge {
    pub rule: RuleId,
    pub head: ArrayId,
    pub body: ArrayId,
    pub label: Monotonicity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SccFlags {
    pub recursive: bool,
    pub has_decreasing_edge: bool,
    pub has_nonmonotonic_edge: bool,
}

#[derive(Clone, Debug)]
pub struct DepGraph {
    /// Founded arrays, in declaration order.
    pub nodes: Vec<ArrayId>,
    pub edges: Vec<DepEdge>,
    /// SCCs in reverse topological order (dependencies first).
    pub sccs: Vec<Vec<ArrayId>>,
    pub scc_of: BTreeMap<ArrayId, usize>,
    pub flags: Vec<SccFlags>,
}

pub fn array_label(p: &Program, id: ArrayId) -> String {
    match p.arrays[id].kind {
        ArrayKind::Magic(base) => alloc::format!("m_{}", p.arrays[base].name),
        _ => p.arrays[id].name.clone(),
    }
}

pub fn build_dep_graph(p: &Program) -> DepGraph {
    let nodes: Vec<ArrayId> = (0..p.arrays.len()).filter(|&a| p.arrays[a].kind.is_founded()).collect();
    let mut edges = Vec::new();
    for r in &p.rules {
        let mut bodies = BTreeSet::new();
        r.body.for_each_leaf(&mut |l| {
            if let Leaf::Access(a) = l {
                if p.arrays[a.array].kind.is_founded() {
                    bodies.insert(a.array);
                }
            }
        });
        for b in bodies {
            let label = monotonicity(
                &r.body,
                &|l| matches!(l, Leaf::Access(a) if a.array == b),
                &|l| leaf_interval(p, &r.gen, l, FoundedAt::Domain),
            );
            edges.push(DepEdge { rule: r.id, head: r.head.array, body: b, label });
        }
    }
    let succ: BTreeMap<ArrayId, Vec<ArrayId>> = nodes
        .iter()
        .map(|&n| (n, edges.iter().filter(|e| e.head == n).map(|e| e.body).collect()))
        .collect();
    let sccs = tarjan(&nodes, &succ);
    let mut scc_of = BTreeMap::new();
    for (k, c) in sccs.iter().enumerate() {
        for &n in c {
            scc_of.insert(n, k);
        }
    }
    let mut flags = vec![SccFlags::default(); sccs.len()];
    for e in &edges {
        let (a, b) = (scc_of[&e.head], scc_of[&e.body]);
        if a == b {
            let f = &mut flags[a];
            f.recursive = true;
            match e.label {
                Monotonicity::Decreasing => f.has_decreasing_edge = true,
                Monotonicity::NonMonotonic => f.has_nonmonotonic_edge = true,
                _ => {}
            }
        }
    }
    DepGraph { nodes, edges, sccs, scc_of, flags }
}

/// Strongly connected components (Tarjan), dependencies first.
pub fn tarjan(nodes: &[ArrayId], succ: &BTreeMap<ArrayId, Vec<ArrayId>>) -> Vec<Vec<ArrayId>> {
    struct St<'a> {
        succ: &'a BTreeMap<ArrayId, Vec<ArrayId>>,
        index: BTreeMap<ArrayId, usize>,
        low: BTreeMap<ArrayId, usize>,
        stack: Vec<ArrayId>,
        on_stack: BTreeSet<ArrayId>,
        out: Vec<Vec<ArrayId>>,
    }
    fn visit(s: &mut St<'_>, v: ArrayId) {
        let i = s.index.len();
        s.index.insert(v, i);
        s.low.insert(v, i);
        s.stack.push(v);
        s.on_stack.insert(v);
        let next: Vec<ArrayId> = s.succ.get(&v).cloned().unwrap_or_default();
        for w in next {
            if !s.index.contains_key(&w) {
                visit(s, w);
                let lw = s.low[&w];
                let lv = s.low.get_mut(&v).unwrap();
                *lv = (*lv).min(lw);
            } else if s.on_stack.contains(&w) {
                let iw = s.index[&w];
                let lv = s.low.get_mut(&v).unwrap();
                *lv = (*lv).min(iw);
            }
        }
        if s.low[&v] == s.index[&v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack.remove(&w);
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let mut s = St {
        succ,
        index: BTreeMap::new(),
        low: BTreeMap::new(),
        stack: Vec::new(),
        on_stack: BTreeSet::new(),
        out: Vec::new(),
    };
    for &n in nodes {
        if !s.index.contains_key(&n) {
            visit(&mut s, n);
        }
    }
    s.out
}

/// Rejects non-monotonic edges inside an SCC.
pub fn check_validity(p: &Program, g: &DepGraph) -> Result<(), ProgramError> {
    for e in &g.edges {
        if e.label == Monotonicity::NonMonotonic && g.scc_of[&e.head] == g.scc_of[&e.body] {
            return Err(ProgramError::InvalidProgram {
                rule: alloc::format!("{}", e.rule),
                head: array_label(p, e.head),
                body: array_label(p, e.body),
            });
        }
    }
    Ok(())
}

/// SCCs with a decreasing edge between two of their members.
pub fn unstratified_components(g: &DepGraph) -> Vec<Vec<ArrayId>> {
    g.sccs
        .iter()
        .zip(&g.flags)
        .filter(|(_, f)| f.has_decreasing_edge)
        .map(|(c, _)| c.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::program::{Access, ArrayDecl, Generator, Rule};
    use crate::value::{Value, ValueType};
    use proptest::prelude::*;

    fn founded(p: &mut Program, name: &str, ty: ValueType) -> ArrayId {
        p.add_array(ArrayDecl::new(name, ArrayKind::Founded, ty, vec![]))
    }

    fn acc(a: ArrayId) -> Expr<Leaf> {
        Expr::Leaf(Leaf::Access(Access::scalar(a)))
    }

    fn rule(p: &mut Program, head: ArrayId, body: Expr<Leaf>) {
        let id = p.next_rule_id();
        p.rules.push(Rule::new(id, Generator::empty(), Access::scalar(head), body));
    }

    #[test]
    fn negation_gives_decreasing_edge() {
        let mut p = Program::new();
        let a = founded(&mut p, "a", ValueType::Bool);
        let b = founded(&mut p, "b", ValueType::Bool);
        rule(&mut p, a, Expr::not(acc(b)));
        let g = build_dep_graph(&p);
        assert_eq!(g.edges[0].label, Monotonicity::Decreasing);
        assert!(unstratified_components(&g).is_empty());
        rule(&mut p, b, Expr::not(acc(a)));
        let g = build_dep_graph(&p);
        assert_eq!(unstratified_components(&g), vec![vec![a, b]]);
        assert!(check_validity(&p, &g).is_ok());
    }

    #[test]
    fn square_inside_cycle_is_invalid() {
        let mut p = Program::new();
        let a = founded(&mut p, "a", ValueType::Int);
        let b = p.add_array(
            ArrayDecl::new("b", ArrayKind::Founded, ValueType::Int, vec![]).with_bounds(Value::Int(-2), Value::Int(2)),
        );
        rule(&mut p, a, Expr::Product(vec![acc(b), acc(b)]));
        let g = build_dep_graph(&p);
        assert_eq!(g.edges[0].label, Monotonicity::NonMonotonic);
        assert!(check_validity(&p, &g).is_ok());
        rule(&mut p, b, acc(a));
        let g = build_dep_graph(&p);
        assert!(matches!(check_validity(&p, &g), Err(ProgramError::InvalidProgram { .. })));
    }

    #[test]
    fn positive_cycle_is_stratified() {
        let mut p = Program::new();
        let a = founded(&mut p, "a", ValueType::Int);
        let b = founded(&mut p, "b", ValueType::Int);
        rule(&mut p, a, acc(b));
        rule(&mut p, b, acc(a));
        let g = build_dep_graph(&p);
        assert_eq!(g.sccs.len(), 1);
        assert!(g.flags[0].recursive);
        assert!(unstratified_components(&g).is_empty());
    }

    fn reach(n: usize, adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let mut r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || adj[i][j]).collect()).collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    proptest! {
        #[test]
        fn tarjan_matches_transitive_closure(n in 1usize..12, bits in prop::collection::vec(any::<bool>(), 144)) {
            let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| bits[i * 12 + j]).collect()).collect();
            let nodes: Vec<ArrayId> = (0..n).collect();
            let succ: BTreeMap<ArrayId, Vec<ArrayId>> =
                (0..n).map(|i| (i, (0..n).filter(|&j| adj[i][j]).collect())).collect();
            let sccs = tarjan(&nodes, &succ);
            let r = reach(n, &adj);
            let mut comp = vec![usize::MAX; n];
            for (k, c) in sccs.iter().enumerate() {
                for &v in c {
                    prop_assert_eq!(comp[v], usize::MAX);
                    comp[v] = k;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(comp[i] == comp[j], r[i][j] && r[j][i]);
                    // dependencies come first
                    if adj[i][j] {
                        prop_assert!(comp[j] <= comp[i]);
                    }
                }
            }
        }
    }
}
