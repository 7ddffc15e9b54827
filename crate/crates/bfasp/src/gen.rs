//! Seeded benchmark instance generators.
//!
//! Each generator returns the model text, the JSON data and the raw instance
//! so tests can check it against independent computations.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid generator parameters: {0}")]
pub struct GenError(pub String);

#[derive(Clone, Debug, PartialEq)]
pub struct Instance<T> {
    pub model: String,
    pub data: String,
    pub raw: T,
}

fn check(ok: bool, msg: &str) -> Result<(), GenError> {
    if ok {
        Ok(())
    } else {
        Err(GenError(msg.into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoadCon {
    pub nodes: usize,
    /// (from, to, length, cost), nodes numbered from 1.
    pub edges: Vec<(usize, usize, i64, i64)>,
    /// (from, to, maximal distance).
    pub demands: Vec<(usize, usize, i64)>,
    /// Distance standing for "unreachable"; larger than any simple path.
    pub big: i64,
}

/// All-pairs shortest distances over the given undirected edges.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, i64)]) -> Vec<Vec<Option<i64>>> {
    let mut d = vec![vec![None; n + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b, l) in edges {
        for (x, y) in [(a, b), (b, a)] {
            if d[x][y].is_none_or(|v| l < v) {
                d[x][y] = Some(l);
            }
        }
    }
    for k in 1..=n {
        for i in 1..=n {
            for j in 1..=n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|v| a + b < v) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Road construction: which edges to build so that every demand's shortest
/// path is short enough, at minimal cost.
///
/// Shortest paths are upper-bound founded; they are modeled as the negation
/// `nsp = -sp` of a lower-bound founded array.
pub fn roadcon(nodes: usize, edges: usize, demands: usize, seed: u64) -> Result<Instance<RoadCon>, GenError> {
    check(nodes >= 2, "roadcon needs at least two nodes")?;
    check(edges + 1 >= nodes, "roadcon needs at least nodes - 1 edges")?;
    check(edges <= nodes * (nodes - 1) / 2, "too many edges for a simple graph")?;
    check(demands >= 1, "roadcon needs a demand")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (1..=nodes).collect();
    perm.shuffle(&mut rng);
    let mut pairs = BTreeSet::new();
    for i in 1..nodes {
        let j = rng.gen_range(0..i);
        pairs.insert((perm[i].min(perm[j]), perm[i].max(perm[j])));
    }
    while pairs.len() < edges {
        let a = rng.gen_range(1..=nodes);
        let b = rng.gen_range(1..=nodes);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let mut list: Vec<(usize, usize)> = pairs.into_iter().collect();
    list.shuffle(&mut rng);
    let es: Vec<(usize, usize, i64, i64)> =
        list.into_iter().map(|(a, b)| (a, b, rng.gen_range(1..=9), rng.gen_range(1..=9))).collect();
    let dist = floyd_warshall(nodes, &es.iter().map(|&(a, b, l, _)| (a, b, l)).collect::<Vec<_>>());
    let mut ds = Vec::new();
    while ds.len() < demands {
        let a = rng.gen_range(1..=nodes);
        let b = rng.gen_range(1..=nodes);
        if a != b {
            ds.push((a, b, dist[a][b].unwrap() + rng.gen_range(0..=4)));
        }
    }
    let big = es.iter().map(|e| e.2).sum::<i64>() + 1;
    let raw = RoadCon { nodes, edges: es, demands: ds, big };
    let model = format!(
        "# road construction; nsp[x, y] is minus the shortest distance from x to y
set Node = 1..n;
set Edge = 1..m;
set Demand = 1..k;
param int n;
param int m;
param int k;
param int efrom[Edge];
param int eto[Edge];
param int len[Edge];
param int cost[Edge];
param int dfrom[Demand];
param int dto[Demand];
param int demand[Demand];
std bool built[Edge];
founded int nsp[Node, Node] in -{big}..0;
minimize sum(e in Edge)(built[e] * cost[e]);
rule forall (y in Node): nsp[y, y] >= 0;
rule forall (y in Node, e in Edge): nsp[efrom[e], y] >= nsp[eto[e], y] - len[e] <- built[e];
rule forall (y in Node, e in Edge): nsp[eto[e], y] >= nsp[efrom[e], y] - len[e] <- built[e];
constraint forall (p in Demand): nsp[dfrom[p], dto[p]] >= -demand[p];
"
    );
    let col = |f: fn(&(usize, usize, i64, i64)) -> i64| raw.edges.iter().map(f).collect::<Vec<_>>();
    let data = json!({
        "n": nodes,
        "m": raw.edges.len(),
        "k": raw.demands.len(),
        "efrom": col(|e| e.0 as i64),
        "eto": col(|e| e.1 as i64),
        "len": col(|e| e.2),
        "cost": col(|e| e.3),
        "dfrom": raw.demands.iter().map(|d| d.0).collect::<Vec<_>>(),
        "dto": raw.demands.iter().map(|d| d.1).collect::<Vec<_>>(),
        "demand": raw.demands.iter().map(|d| d.2).collect::<Vec<_>>(),
    });
    Ok(Instance { model, data: serde_json::to_string_pretty(&data).unwrap(), raw })
}

/// Cheapest set of edges meeting every demand, by trying every subset.
pub fn roadcon_brute_force(r: &RoadCon) -> Option<i64> {
    let m = r.edges.len();
    let mut best: Option<i64> = None;
    for mask in 0u32..(1 << m) {
        let built: Vec<(usize, usize, i64)> =
            (0..m).filter(|i| mask >> i & 1 == 1).map(|i| (r.edges[i].0, r.edges[i].1, r.edges[i].2)).collect();
        let d = floyd_warshall(r.nodes, &built);
        if r.demands.iter().all(|&(a, b, bound)| d[a][b].is_some_and(|x| x <= bound)) {
            let cost: i64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| r.edges[i].3).sum();
            best = Some(best.map_or(cost, |b| b.min(cost)));
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilPol {
    pub citizens: usize,
    pub policies: usize,
    pub target_citizen: usize,
    /// Per citizen: (friend, loss) slots.
    pub friends: Vec<Vec<(usize, i64)>>,
    /// Per citizen: (policy, gain) slots.
    pub effects: Vec<Vec<(usize, i64)>>,
    pub relevant_citizens: BTreeSet<usize>,
    pub relevant_policies: BTreeSet<usize>,
}

const SLOTS: usize = 2;
const HAPPY_MAX: i64 = 20;

/// Utilitarian policies: a citizen is at least as happy as a friend minus a
/// loss, and gains happiness from enacted policies. Only `c_r` citizens and
/// `p_r` policies matter to the target citizen.
pub fn utilpol(c: usize, p: usize, c_r: usize, p_r: usize, seed: u64) -> Result<Instance<UtilPol>, GenError> {
    check(c >= 1 && p >= 1, "utilpol needs citizens and policies")?;
    check((1..=c).contains(&c_r) && (1..=p).contains(&p_r), "relevant counts must be between 1 and the totals")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cs: Vec<usize> = (1..=c).collect();
    cs.shuffle(&mut rng);
    let rel_c: BTreeSet<usize> = cs[..c_r].iter().copied().collect();
    let target = cs[0];
    let mut ps: Vec<usize> = (1..=p).collect();
    ps.shuffle(&mut rng);
    let rel_p: BTreeSet<usize> = ps[..p_r].iter().copied().collect();
    let rel_c_v: Vec<usize> = rel_c.iter().copied().collect();
    let rel_p_v: Vec<usize> = rel_p.iter().copied().collect();
    let mut friends = Vec::new();
    let mut effects = Vec::new();
    for citizen in 1..=c {
        let relevant = rel_c.contains(&citizen);
        let f: Vec<(usize, i64)> = (0..SLOTS)
            .map(|_| {
                let who = if relevant { *rel_c_v.choose(&mut rng).unwrap() } else { rng.gen_range(1..=c) };
                (who, rng.gen_range(1..=3))
            })
            .collect();
        let e: Vec<(usize, i64)> = (0..SLOTS)
            .map(|_| {
                let pol = if relevant { *rel_p_v.choose(&mut rng).unwrap() } else { rng.gen_range(1..=p) };
                (pol, rng.gen_range(1..=HAPPY_MAX / 2))
            })
            .collect();
        friends.push(f);
        effects.push(e);
    }
    let goal = effects[target - 1].iter().map(|e| e.1).min().unwrap();
    let costs: Vec<i64> = (0..p).map(|_| rng.gen_range(1..=9)).collect();
    let raw = UtilPol {
        citizens: c,
        policies: p,
        target_citizen: target,
        friends,
        effects,
        relevant_citizens: rel_c,
        relevant_policies: rel_p,
    };
    let model = format!(
        "# utilitarian policies
set Citizen = 1..nc;
set Policy = 1..np;
set Slot = 1..{SLOTS};
param int nc;
param int np;
param int t;
param int goal;
param int friend[Citizen, Slot];
param int loss[Citizen, Slot];
param int pol[Citizen, Slot];
param int gain[Citizen, Slot];
param int cost[Policy];
std bool enact[Policy];
founded int hap[Citizen] in 0..{HAPPY_MAX};
minimize sum(p in Policy)(enact[p] * cost[p]);
rule forall (c in Citizen, s in Slot): hap[c] >= hap[friend[c, s]] - loss[c, s];
rule forall (c in Citizen, s in Slot): hap[c] >= gain[c, s] <- enact[pol[c, s]];
constraint hap[t] >= goal;
"
    );
    let table = |v: &Vec<Vec<(usize, i64)>>, first: bool| -> Vec<Vec<i64>> {
        v.iter().map(|row| row.iter().map(|&(a, b)| if first { a as i64 } else { b }).collect()).collect()
    };
    let data = json!({
        "nc": c,
        "np": p,
        "t": target,
        "goal": goal,
        "friend": table(&raw.friends, true),
        "loss": table(&raw.friends, false),
        "pol": table(&raw.effects, true),
        "gain": table(&raw.effects, false),
        "cost": costs,
    });
    Ok(Instance { model, data: serde_json::to_string_pretty(&data).unwrap(), raw })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanyCon {
    pub companies: usize,
    pub source: usize,
    pub dest: usize,
    /// Per company: (holder, stocks held) slots; unused slots hold 0 of itself.
    pub holders: Vec<Vec<(usize, i64)>>,
    pub relevant: BTreeSet<usize>,
}

/// Company controls: the source controls a company when its own purchases
/// plus the stocks held by companies it controls exceed half of the stock.
/// Only `c_r` companies can reach the destination through ownership.
pub fn companycon(c: usize, c_r: usize, seed: u64) -> Result<Instance<CompanyCon>, GenError> {
    check(c >= 2, "companycon needs at least two companies")?;
    check((1..=c).contains(&c_r), "relevant count must be between 1 and the total")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cs: Vec<usize> = (1..=c).collect();
    cs.shuffle(&mut rng);
    let dest = cs[0];
    let relevant: BTreeSet<usize> = cs[..c_r].iter().copied().collect();
    let source = *cs.iter().find(|&&x| x != dest).unwrap();
    let mut holders = Vec::new();
    for company in 1..=c {
        let pool: Vec<usize> = if relevant.contains(&company) {
            relevant.iter().copied().filter(|&x| x != company).collect()
        } else {
            (1..=c).filter(|&x| x != company).collect()
        };
        let mut left = 100i64;
        let row: Vec<(usize, i64)> = (0..SLOTS + 1)
            .map(|_| match pool.choose(&mut rng) {
                Some(&h) => {
                    let a = rng.gen_range(10..=40).min(left);
                    left -= a;
                    (h, a)
                }
                None => (company, 0),
            })
            .collect();
        holders.push(row);
    }
    let prices: Vec<i64> = (0..c).map(|_| rng.gen_range(1..=9)).collect();
    let raw = CompanyCon { companies: c, source, dest, holders, relevant };
    let width = SLOTS + 1;
    let model = format!(
        "# company controls
set Company = 1..n;
set Slot = 1..{width};
param int n;
param int src;
param int dest;
param int holder[Company, Slot];
param int amt[Company, Slot];
param int price[Company];
std int buy[Company] in 0..51;
founded bool ctl[Company];
founded int share[Company, Slot] in 0..100;
minimize sum(c in Company)(buy[c] * price[c]);
rule ctl[src] <- true;
rule forall (d in Company, j in Slot): share[d, j] >= amt[d, j] <- ctl[holder[d, j]];
rule forall (d in Company): ctl[d] <- buy[d] + sum(j in Slot)(share[d, j]) > 50;
constraint ctl[dest];
"
    );
    let data = json!({
        "n": c,
        "src": source,
        "dest": dest,
        "holder": raw.holders.iter().map(|r| r.iter().map(|x| x.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "amt": raw.holders.iter().map(|r| r.iter().map(|x| x.1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "price": prices,
    });
    Ok(Instance { model, data: serde_json::to_string_pretty(&data).unwrap(), raw })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_determinism() {
        assert_eq!(roadcon(6, 9, 2, 1).unwrap(), roadcon(6, 9, 2, 1).unwrap());
        assert_ne!(roadcon(6, 9, 2, 1).unwrap().data, roadcon(6, 9, 2, 2).unwrap().data);
        assert_eq!(utilpol(10, 10, 3, 3, 2).unwrap(), utilpol(10, 10, 3, 3, 2).unwrap());
        assert_eq!(companycon(20, 4, 7).unwrap(), companycon(20, 4, 7).unwrap());
    }

    #[test]
    fn roadcon_is_feasible_with_every_edge() {
        for seed in 0..5 {
            let r = roadcon(6, 9, 2, seed).unwrap().raw;
            assert_eq!(r.edges.len(), 9);
            assert!(roadcon_brute_force(&r).is_some());
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(roadcon(4, 7, 1, 0).is_err());
        assert!(roadcon(5, 2, 1, 0).is_err());
        assert!(utilpol(5, 5, 6, 1, 0).is_err());
        assert!(companycon(5, 0, 0).is_err());
    }

    #[test]
    fn floyd_warshall_small() {
        let d = floyd_warshall(3, &[(1, 2, 4), (2, 3, 1), (1, 3, 7)]);
        assert_eq!(d[1][3], Some(5));
        assert_eq!(d[3][1], Some(5));
        assert_eq!(floyd_warshall(2, &[])[1][2], None);
    }
}
