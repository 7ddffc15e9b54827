//! Bottom-up grounding driven by grounding conditions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::condition::grounding_condition;
use crate::error::ProgramError;
use crate::expr::Expr;
use crate::ground::{ground_name, GExpr, GroundConstraint, GroundProgram, GroundRule, VarDecl, VarId};
use crate::program::{fmt_tuple, Access, ArrayDecl, ArrayId, ArrayKind, Generator, IndexExpr, Leaf, NgExpr, Program, RuleId};
use crate::ujb::{compute_array_ujbs, UjbMap};
use crate::value::Value;

/// The set Q of created ground variables, with insertion order.
#[derive(Clone, Debug, Default)]
pub struct CreatedSet {
    seq: BTreeMap<(ArrayId, Vec<i64>), u64>,
    log: BTreeMap<ArrayId, Vec<(u64, Vec<i64>)>>,
    order: Vec<(ArrayId, Vec<i64>)>,
}

impl CreatedSet {
    pub fn new() -> Self {
        CreatedSet::default()
    }

    /// Sequence number the next insertion will get.
    pub fn mark(&self) -> u64 {
        self.order.len() as u64
    }

    pub fn insert(&mut self, array: ArrayId, t: Vec<i64>) -> bool {
        if self.seq.contains_key(&(array, t.clone())) {
            return false;
        }
        let s = self.mark();
        self.seq.insert((array, t.clone()), s);
        self.log.entry(array).or_default().push((s, t.clone()));
        self.order.push((array, t));
        true
    }

    pub fn contains(&self, array: ArrayId, t: &[i64]) -> bool {
        self.seq.contains_key(&(array, t.to_vec()))
    }

    fn contains_in(&self, array: ArrayId, t: &[i64], range: &Range<u64>) -> bool {
        self.seq.get(&(array, t.to_vec())).is_some_and(|s| range.contains(s))
    }

    fn slice(&self, array: ArrayId, range: &Range<u64>) -> &[(u64, Vec<i64>)] {
        let Some(v) = self.log.get(&array) else { return &[] };
        let a = v.partition_point(|(s, _)| *s < range.start);
        let b = v.partition_point(|(s, _)| *s < range.end);
        &v[a..b]
    }

    /// Every created element, in creation order.
    pub fn order(&self) -> &[(ArrayId, Vec<i64>)] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// `l(i) ∈ set`, where the set is the part of Q created within `range`.
#[derive(Clone, Debug)]
pub struct Membership {
    pub array: ArrayId,
    pub index: Vec<IndexExpr>,
    pub range: Range<u64>,
}

/// A generator plus membership constraints on index tuples.
#[derive(Clone, Debug)]
pub struct IndexCp<'a> {
    pub gen: &'a Generator,
    pub members: Vec<Membership>,
}

fn eval_tuple(index: &[IndexExpr], b: &[i64], arrays: &[ArrayDecl]) -> Result<Vec<i64>, ProgramError> {
    index.iter().map(|e| e.eval(b, arrays)).collect()
}

/// All bindings satisfying the generator and every membership, in
/// lexicographic order. The smallest membership set is used as a pivot;
/// univariate affine index functions are inverted to fix variables.
pub fn search(cp: &IndexCp<'_>, q: &CreatedSet, arrays: &[ArrayDecl]) -> Result<Vec<Vec<i64>>, ProgramError> {
    let ranges = cp.gen.ranges();
    let n = ranges.len();
    let accept = |b: &[i64]| -> Result<bool, ProgramError> {
        if !cp.gen.holds(b, arrays)? {
            return Ok(false);
        }
        for m in &cp.members {
            let t = eval_tuple(&m.index, b, arrays)?;
            if !q.contains_in(m.array, &t, &m.range) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut out = BTreeSet::new();
    let pivot = cp.members.iter().min_by_key(|m| q.slice(m.array, &m.range).len());
    match pivot {
        None => {
            enumerate(&ranges, &vec![None; n], &mut |b| {
                if accept(b)? {
                    out.insert(b.to_vec());
                }
                Ok(())
            })?;
        }
        Some(m) => {
            'tuples: for (_, t) in q.slice(m.array, &m.range) {
                let mut fixed: Vec<Option<i64>> = vec![None; n];
                for (k, ix) in m.index.iter().enumerate() {
                    if let Some((v, a, c)) = ix.univariate_affine() {
                        let d = t[k] - c;
                        if d % a != 0 {
                            continue 'tuples;
                        }
                        let val = d / a;
                        if !ranges[v].contains(val) || fixed[v].is_some_and(|f| f != val) {
                            continue 'tuples;
                        }
                        fixed[v] = Some(val);
                    } else if let Some((coeffs, c)) = ix.linear_form() {
                        if coeffs.is_empty() && c != t[k] {
                            continue 'tuples;
                        }
                    }
                }
                enumerate(&ranges, &fixed, &mut |b| {
                    if accept(b)? {
                        out.insert(b.to_vec());
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn enumerate(
    ranges: &[crate::program::IndexRange],
    fixed: &[Option<i64>],
    f: &mut impl FnMut(&[i64]) -> Result<(), ProgramError>,
) -> Result<(), ProgramError> {
    fn go(
        ranges: &[crate::program::IndexRange],
        fixed: &[Option<i64>],
        cur: &mut Vec<i64>,
        f: &mut impl FnMut(&[i64]) -> Result<(), ProgramError>,
    ) -> Result<(), ProgramError> {
        let k = cur.len();
        if k == ranges.len() {
            return f(cur);
        }
        let (lo, hi) = match fixed[k] {
            Some(v) => (v, v),
            None => (ranges[k].lo, ranges[k].hi),
        };
        for i in lo..=hi {
            cur.push(i);
            go(ranges, fixed, cur, f)?;
            cur.pop();
        }
        Ok(())
    }
    go(ranges, fixed, &mut Vec::new(), f)
}

/// Every binding of a generator (exhaustive expansion).
pub fn ground_all(gen: &Generator, arrays: &[ArrayDecl]) -> Result<Vec<Vec<i64>>, ProgramError> {
    gen.bindings(arrays)
}

/// A rule-like item for the fixpoint: grounding an instance creates its head.
#[derive(Clone, Debug)]
pub struct Unit {
    pub gen: Generator,
    pub head: Access,
    /// Condition in disjunctive normal form.
    pub clauses: Vec<Vec<Access>>,
    /// Index into the program's rules; `None` for magic rules.
    pub rule: Option<usize>,
}

/// The programs searched for one clause: memberships on every atom.
pub fn create_cps(clauses: &[Vec<Access>]) -> Vec<usize> {
    clauses.iter().filter(|c| !c.is_empty()).map(|c| c.len()).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundStats {
    pub rules: usize,
    pub constraints: usize,
    pub vars: usize,
    pub created: usize,
    pub iterations: usize,
    pub searches: usize,
}

#[derive(Clone, Debug)]
pub struct GroundResult {
    pub program: GroundProgram,
    /// `(rule id, binding)` of every grounded instance of a program rule.
    pub instances: BTreeSet<(RuleId, Vec<i64>)>,
    /// Created elements of non-magic arrays.
    pub created: BTreeSet<(ArrayId, Vec<i64>)>,
    /// Q in creation order, magic atoms included.
    pub q_order: Vec<(ArrayId, Vec<i64>)>,
    pub stats: GroundStats,
}

/// Semi-naive fixpoint over `units`, starting from `seed`.
pub struct Fixpoint<'p> {
    p: &'p Program,
    pub q: CreatedSet,
    pub fired: BTreeSet<(usize, Vec<i64>)>,
    pub iterations: usize,
    pub searches: usize,
}

impl<'p> Fixpoint<'p> {
    pub fn run(p: &'p Program, units: &[Unit], seed: &[(ArrayId, Vec<i64>)]) -> Result<Self, ProgramError> {
        let mut fx = Fixpoint { p, q: CreatedSet::new(), fired: BTreeSet::new(), iterations: 0, searches: 0 };
        for (a, t) in seed {
            fx.q.insert(*a, t.clone());
        }
        for (u, unit) in units.iter().enumerate() {
            if unit.clauses.iter().any(|c| c.is_empty()) {
                for b in ground_all(&unit.gen, &p.arrays)? {
                    fx.fire(units, u, b)?;
                }
            }
        }
        let mut lo = 0;
        loop {
            let hi = fx.q.mark();
            if lo == hi {
                break;
            }
            fx.iterations += 1;
            for (u, unit) in units.iter().enumerate() {
                for clause in unit.clauses.iter().filter(|c| !c.is_empty()) {
                    for i in 0..clause.len() {
                        let members = clause
                            .iter()
                            .enumerate()
                            .map(|(j, a)| Membership {
                                array: a.array,
                                index: a.index.clone(),
                                range: match j.cmp(&i) {
                                    core::cmp::Ordering::Less => 0..hi,
                                    core::cmp::Ordering::Equal => lo..hi,
                                    core::cmp::Ordering::Greater => 0..lo,
                                },
                            })
                            .collect();
                        fx.searches += 1;
                        let found = search(&IndexCp { gen: &unit.gen, members }, &fx.q, &p.arrays)?;
                        for b in found {
                            fx.fire(units, u, b)?;
                        }
                    }
                }
            }
            lo = hi;
        }
        Ok(fx)
    }

    fn fire(&mut self, units: &[Unit], u: usize, b: Vec<i64>) -> Result<(), ProgramError> {
        if self.fired.contains(&(u, b.clone())) {
            return Ok(());
        }
        let head = &units[u].head;
        let t = eval_tuple(&head.index, &b, &self.p.arrays)?;
        let decl = &self.p.arrays[head.array];
        if !decl.contains(&t) {
            return Err(ProgramError::IndexOutOfRange { array: decl.name.clone(), index: fmt_tuple(&t) });
        }
        self.q.insert(head.array, t);
        self.fired.insert((u, b));
        Ok(())
    }
}

/// Turns instances into a ground program.
pub struct Emitter<'p> {
    p: &'p Program,
    ujbs: &'p UjbMap,
    /// Founded occurrences outside this set become their ujb constant.
    plug: Option<&'p CreatedSet>,
    pub out: GroundProgram,
    ids: BTreeMap<(ArrayId, Vec<i64>), VarId>,
}

impl<'p> Emitter<'p> {
    pub fn new(p: &'p Program, ujbs: &'p UjbMap, plug: Option<&'p CreatedSet>) -> Self {
        Emitter { p, ujbs, plug, out: GroundProgram::new(), ids: BTreeMap::new() }
    }

    pub fn var(&mut self, array: ArrayId, t: Vec<i64>) -> VarId {
        if let Some(&v) = self.ids.get(&(array, t.clone())) {
            return v;
        }
        let d = &self.p.arrays[array];
        let name = match d.kind {
            ArrayKind::Magic(base) => ground_name(&alloc::format!("m_{}", self.p.arrays[base].name), &t),
            _ => ground_name(&d.name, &t),
        };
        let id = self.out.add_var(VarDecl {
            name,
            founded: d.kind.is_founded(),
            ty: d.ty,
            lb: d.lb,
            ub: d.ub,
            ujb: self.ujbs.get(&array).copied(),
            origin: Some((array, t.clone())),
        });
        self.ids.insert((array, t), id);
        id
    }

    fn ujb(&self, array: ArrayId) -> Value {
        self.ujbs.get(&array).copied().unwrap_or(self.p.arrays[array].lb)
    }

    /// Instantiate an expression under a binding.
    pub fn instantiate(&mut self, e: &NgExpr, b: &[i64]) -> Result<GExpr, ProgramError> {
        let p = self.p;
        e.map_leaves(&mut |l| match l {
            Leaf::Index(ix) => Ok(Expr::Const(Value::Int(ix.eval(b, &p.arrays)?))),
            Leaf::Access(a) => {
                let t = a.eval_index(b, &p.arrays)?;
                let d = &p.arrays[a.array];
                if !d.contains(&t) {
                    return Err(ProgramError::IndexOutOfRange { array: d.name.clone(), index: fmt_tuple(&t) });
                }
                if d.kind == ArrayKind::Param {
                    return Ok(Expr::Const(d.param_value(&t).unwrap()));
                }
                if d.kind.is_founded() {
                    if let Some(q) = self.plug {
                        if !q.contains(a.array, &t) {
                            return Ok(Expr::Const(self.ujb(a.array)));
                        }
                    }
                }
                Ok(Expr::Leaf(self.var(a.array, t)))
            }
        })
    }

    pub fn rule(&mut self, rule_idx: usize, b: &[i64]) -> Result<(), ProgramError> {
        let r = &self.p.rules[rule_idx];
        let t = r.head.eval_index(b, &self.p.arrays)?;
        let head = self.var(r.head.array, t);
        let body = self.instantiate(&r.body, b)?;
        self.out.rules.push(GroundRule { head, body, source: Some((r.id, b.to_vec())) });
        Ok(())
    }

    /// Constraints, objective and outputs.
    pub fn rest(&mut self) -> Result<(), ProgramError> {
        let p = self.p;
        for c in &p.constraints {
            for b in ground_all(&c.gen, &p.arrays)? {
                let body = self.instantiate(&c.body, &b)?;
                self.out.constraints.push(GroundConstraint { body });
            }
        }
        if let Some(o) = &p.objective {
            self.out.objective = Some(self.instantiate(o, &[])?);
        }
        for (a, t) in &p.outputs {
            if p.arrays[*a].kind.is_decision() {
                self.var(*a, t.clone());
            }
        }
        Ok(())
    }

    /// `y >= ujb(y)` for founded variables whose ujb exceeds their lb.
    pub fn ujb_facts(&mut self) {
        let founded: Vec<VarId> = self.out.founded_vars().collect();
        for v in founded {
            let d = self.out.var(v);
            if let Some(u) = d.ujb {
                if u.num_cmp(&d.lb).is_gt() {
                    self.out.rules.push(GroundRule { head: v, body: Expr::Const(u), source: None });
                }
            }
        }
    }
}

fn result(
    p: &Program,
    out: GroundProgram,
    instances: BTreeSet<(RuleId, Vec<i64>)>,
    q: &CreatedSet,
    mut stats: GroundStats,
) -> GroundResult {
    let created = q
        .order()
        .iter()
        .filter(|(a, _)| !matches!(p.arrays[*a].kind, ArrayKind::Magic(_)))
        .cloned()
        .collect::<BTreeSet<_>>();
    stats.rules = out.rules.len();
    stats.constraints = out.constraints.len();
    stats.vars = out.vars.len();
    stats.created = created.len();
    GroundResult { program: out, instances, created, q_order: q.order().to_vec(), stats }
}

/// Units for a flat program, one per rule, with grounding conditions.
pub fn rule_units(p: &Program, ujbs: &UjbMap) -> Result<Vec<Unit>, ProgramError> {
    p.rules
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let cond = grounding_condition(p, r, ujbs)?;
            Ok(Unit { gen: r.gen.clone(), head: r.head.clone(), clauses: cond.clauses(), rule: Some(k) })
        })
        .collect()
}

/// Run the fixpoint and emit the ground program with plugging and ujb facts.
pub fn ground_units(p: &Program, ujbs: &UjbMap, units: &[Unit], seed: &[(ArrayId, Vec<i64>)]) -> Result<GroundResult, ProgramError> {
    let fx = Fixpoint::run(p, units, seed)?;
    let mut fired: Vec<(RuleId, Vec<i64>, usize)> = fx
        .fired
        .iter()
        .filter_map(|(u, b)| units[*u].rule.map(|k| (p.rules[k].id, b.clone(), k)))
        .collect();
    fired.sort();
    fired.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    let mut em = Emitter::new(p, ujbs, Some(&fx.q));
    for (_, b, k) in &fired {
        em.rule(*k, b)?;
    }
    em.rest()?;
    em.ujb_facts();
    let instances = fired.into_iter().map(|(id, b, _)| (id, b)).collect();
    let stats = GroundStats { iterations: fx.iterations, searches: fx.searches, ..Default::default() };
    Ok(result(p, em.out, instances, &fx.q, stats))
}

/// Bottom-up grounding of a flat program.
pub fn ground(p: &Program) -> Result<GroundResult, ProgramError> {
    let ujbs = compute_array_ujbs(p);
    let units = rule_units(p, &ujbs)?;
    ground_units(p, &ujbs, &units, &[])
}

/// Exhaustive grounding: every binding of every rule, no plugging.
pub fn ground_exhaustive(p: &Program) -> Result<GroundResult, ProgramError> {
    let ujbs = compute_array_ujbs(p);
    let mut em = Emitter::new(p, &ujbs, None);
    let mut q = CreatedSet::new();
    let mut instances = BTreeSet::new();
    let mut order: Vec<usize> = (0..p.rules.len()).collect();
    order.sort_by_key(|&k| p.rules[k].id);
    for k in order {
        let r = &p.rules[k];
        for b in ground_all(&r.gen, &p.arrays)? {
            q.insert(r.head.array, r.head.eval_index(&b, &p.arrays)?);
            em.rule(k, &b)?;
            instances.insert((r.id, b));
        }
    }
    em.rest()?;
    Ok(result(p, em.out, instances, &q, GroundStats { iterations: 1, ..Default::default() }))
}
