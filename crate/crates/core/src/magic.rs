//! Magic set transformation: relevance atoms `m_x` restrict grounding to
//! what the constraints, objective and outputs can observe.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::{build_dep_graph, DepGraph};
use crate::condition::{grounding_condition, Condition};
use crate::error::ProgramError;
use crate::grounder::{ground_all, ground_units, GroundResult, Unit};
use crate::program::{Access, ArrayDecl, ArrayId, ArrayKind, Leaf, NgExpr, Program, Rule};
use crate::ujb::{compute_array_ujbs, UjbMap};
use crate::value::{Value, ValueType};

pub type MagicMap = BTreeMap<ArrayId, ArrayId>;

pub type Query = BTreeSet<(ArrayId, Vec<i64>)>;

/// Declare `m_x` for every founded and standard array.
pub fn add_magic_arrays(p: &mut Program) -> MagicMap {
    let mut map = MagicMap::new();
    for id in 0..p.arrays.len() {
        let d = &p.arrays[id];
        if d.kind.is_decision() {
            let m = ArrayDecl::new(format!("m_{}", d.name), ArrayKind::Magic(id), ValueType::Bool, d.dims.clone());
            map.insert(id, p.add_array(m));
        }
    }
    map
}

fn magic_access(map: &MagicMap, a: &Access) -> Access {
    Access::new(map[&a.array], a.index.clone())
}

/// Magic rules for one rule, followed by the modified rule.
pub fn magic_transform(p: &Program, rule_idx: usize, cond: &Condition, map: &MagicMap) -> Vec<Unit> {
    let r: &Rule = &p.rules[rule_idx];
    let m_head = magic_access(map, &r.head);
    let unit = |head: Access, clauses: Vec<Vec<Access>>| Unit { gen: r.gen.clone(), head, clauses, rule: None };
    let mut out = Vec::new();
    match cond {
        Condition::Disj(atoms) => {
            for x in atoms {
                out.push(unit(magic_access(map, x), vec![vec![m_head.clone()]]));
            }
        }
        Condition::Conj(atoms) => {
            let mut b = vec![m_head.clone()];
            for x in atoms {
                out.push(unit(magic_access(map, x), vec![b.clone()]));
                b.push(x.clone());
            }
        }
        _ => {}
    }
    let guarded: Vec<Vec<Access>> = cond
        .clauses()
        .into_iter()
        .map(|c| {
            let mut v = vec![m_head.clone()];
            v.extend(c);
            v
        })
        .collect();
    let in_cond = cond.atoms();
    let mut seen: Vec<&Access> = Vec::new();
    r.body.for_each_leaf(&mut |l| {
        if let Leaf::Access(a) = l {
            if p.arrays[a.array].kind.is_decision() && *a != r.head && !in_cond.contains(a) && !seen.contains(&a) {
                seen.push(a);
            }
        }
    });
    for v in seen {
        out.push(unit(magic_access(map, v), guarded.clone()));
    }
    out.push(Unit { gen: r.gen.clone(), head: r.head.clone(), clauses: guarded, rule: Some(rule_idx) });
    out
}

fn collect_vars(p: &Program, e: &NgExpr, b: &[i64], map: &MagicMap, q: &mut Query) -> Result<(), ProgramError> {
    let mut err = None;
    e.for_each_leaf(&mut |l| {
        if let Leaf::Access(a) = l {
            if let Some(&m) = map.get(&a.array) {
                match a.eval_index(b, &p.arrays) {
                    Ok(t) => {
                        q.insert((m, t));
                    }
                    Err(e) => err = Some(e),
                }
            }
        }
    });
    err.map_or(Ok(()), Err)
}

/// `m_v` for every variable in a ground constraint, the objective or an
/// output declaration.
pub fn build_query(p: &Program, map: &MagicMap) -> Result<Query, ProgramError> {
    let mut q = Query::new();
    for c in &p.constraints {
        for b in ground_all(&c.gen, &p.arrays)? {
            collect_vars(p, &c.body, &b, map, &mut q)?;
        }
    }
    if let Some(o) = &p.objective {
        collect_vars(p, o, &[], map, &mut q)?;
    }
    for (a, t) in &p.outputs {
        if let Some(&m) = map.get(a) {
            q.insert((m, t.clone()));
        }
    }
    Ok(q)
}

/// Add every magic atom of every array in an SCC with a decreasing edge.
pub fn seed_unstratified(p: &Program, g: &DepGraph, map: &MagicMap, mut q: Query) -> Query {
    for (scc, flags) in g.sccs.iter().zip(&g.flags) {
        if !flags.has_decreasing_edge {
            continue;
        }
        for a in scc {
            if let Some(&m) = map.get(a) {
                for t in p.arrays[*a].tuples() {
                    q.insert((m, t));
                }
            }
        }
    }
    q
}

/// Statistics specific to the magic pipeline.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MagicStats {
    pub magic_rules: usize,
    pub magic_instances: usize,
    pub query: usize,
}

/// Transform, ground with the query as seed, and strip every magic artifact.
pub fn apply_magic(p: &Program) -> Result<(GroundResult, MagicStats), ProgramError> {
    let ujbs = compute_array_ujbs(p);
    let conds: Vec<Condition> = p.rules.iter().map(|r| grounding_condition(p, r, &ujbs)).collect::<Result<_, _>>()?;
    let graph = build_dep_graph(p);
    let mut pm = p.clone();
    let map = add_magic_arrays(&mut pm);
    let mut ujbs_m: UjbMap = ujbs.clone();
    for &m in map.values() {
        ujbs_m.insert(m, Value::FALSE);
    }
    let mut order: Vec<usize> = (0..p.rules.len()).collect();
    order.sort_by_key(|&k| p.rules[k].id);
    let mut units = Vec::new();
    for k in order {
        units.extend(magic_transform(&pm, k, &conds[k], &map));
    }
    let query = seed_unstratified(p, &graph, &map, build_query(p, &map)?);
    let seed: Vec<(ArrayId, Vec<i64>)> = query.iter().cloned().collect();
    let res = ground_units(&pm, &ujbs_m, &units, &seed)?;
    let magic_rules = units.iter().filter(|u| u.rule.is_none()).count();
    let magic_instances = res.q_order.iter().filter(|(a, _)| matches!(pm.arrays[*a].kind, ArrayKind::Magic(_))).count();
    Ok((res, MagicStats { magic_rules, magic_instances, query: query.len() }))
}
