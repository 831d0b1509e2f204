//! Chains, the Noetherian property, heights, limits, seeds and finitary checks.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{Adj, Relation};
use crate::value::Value;

/// Default bound on chain exploration.
pub const DEFAULT_FUEL: usize = 10_000;

/// A non-empty sequence of elements, each related to the next.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Chain(pub Vec<Value>);

impl Chain {
    /// Number of steps.
    pub fn length(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn first(&self) -> &Value {
        &self.0[0]
    }

    pub fn last(&self) -> &Value {
        self.0.last().expect("chains are non-empty")
    }
}

impl std::fmt::Display for Chain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" → ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Noetherian,
    NotNoetherian,
    UnknownFuelExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Certificate,
    Bounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoetherianVerdict {
    pub status: Status,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Chain>,
}

impl NoetherianVerdict {
    pub fn is_noetherian(&self) -> bool {
        self.status == Status::Noetherian
    }
}

/// Decides whether `r` admits no infinite chain.
///
/// Relations over a finite, enumerable space are materialized and checked
/// exhaustively (a finite relation is Noetherian iff it has no cycle). Others
/// are explored from the space's roots, following at most `fuel` steps along
/// any chain and expanding at most `fuel` elements.
pub fn is_noetherian(r: &Relation, fuel: usize) -> NoetherianVerdict {
    if r.is_homogeneous() && r.space().is_finite() {
        if let Ok(adj) = r.adjacency() {
            return exhaustive(r, &adj);
        }
    }
    explore(r, fuel)
}

fn exhaustive(r: &Relation, adj: &Adj) -> NoetherianVerdict {
    match topological_order(adj) {
        Ok(_) => NoetherianVerdict { status: Status::Noetherian, method: Method::Exhaustive, witness: None },
        Err(cyclic) => {
            let values = r.space().values().expect("materialized space enumerates");
            let cycle = shortest_cycle(adj, &cyclic);
            NoetherianVerdict {
                status: Status::NotNoetherian,
                method: Method::Exhaustive,
                witness: Some(Chain(cycle.into_iter().map(|i| values[i as usize].clone()).collect())),
            }
        }
    }
}

/// Kahn's algorithm. On success returns the elements in an order where every
/// element precedes its successors; on failure returns the elements left on
/// or above a cycle.
fn topological_order(adj: &Adj) -> std::result::Result<Vec<u32>, Vec<u32>> {
    let n = adj.len();
    let mut indegree = vec![0usize; n];
    for row in adj {
        for &j in row {
            indegree[j as usize] += 1;
        }
    }
    let mut queue: VecDeque<u32> = (0..n as u32).filter(|&i| indegree[i as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &j in &adj[i as usize] {
            indegree[j as usize] -= 1;
            if indegree[j as usize] == 0 {
                queue.push_back(j);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n as u32).filter(|&i| indegree[i as usize] > 0).collect())
    }
}

/// The shortest cycle through any of `candidates`, as a closed walk
/// `v, ..., v`. Ties go to the canonically least start.
fn shortest_cycle(adj: &Adj, candidates: &[u32]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    let mut parent = vec![u32::MAX; adj.len()];
    for &start in candidates {
        if best.as_ref().is_some_and(|b| b.len() <= 2) {
            break;
        }
        parent.iter_mut().for_each(|p| *p = u32::MAX);
        let mut queue = VecDeque::from([(start, 0usize)]);
        let mut found = None;
        'bfs: while let Some((u, d)) = queue.pop_front() {
            // Any cycle closed from here has d + 1 steps; no better than the best.
            if best.as_ref().is_some_and(|b| d + 1 >= b.len() - 1) {
                break;
            }
            for &v in &adj[u as usize] {
                if v == start {
                    found = Some(u);
                    break 'bfs;
                }
                if parent[v as usize] == u32::MAX {
                    parent[v as usize] = u;
                    queue.push_back((v, d + 1));
                }
            }
        }
        if let Some(last) = found {
            let mut path = vec![last];
            let mut cur = last;
            while cur != start {
                cur = parent[cur as usize];
                path.push(cur);
            }
            path.reverse();
            path.push(start);
            if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                best = Some(path);
            }
        }
    }
    best.expect("a cyclic remainder contains a cycle")
}

/// Depth-first exploration for relations that cannot be enumerated.
fn explore(r: &Relation, fuel: usize) -> NoetherianVerdict {
    let unknown = |witness| NoetherianVerdict {
        status: Status::UnknownFuelExhausted,
        method: Method::Bounded,
        witness,
    };
    let Ok(roots) = r.source().roots() else {
        return unknown(None);
    };
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<Value, Mark> = HashMap::new();
    let mut expansions = 0usize;
    for root in roots {
        if marks.contains_key(&root) {
            continue;
        }
        // Path of (element, successors still to visit).
        let mut path: Vec<(Value, Vec<Value>)> = Vec::new();
        let succ = |v: &Value| -> Option<Vec<Value>> {
            let img = r.image(v).ok()?;
            Some(img.into_iter().rev().filter(|w| r.source().contains(w)).collect())
        };
        let Some(first) = succ(&root) else { return unknown(None) };
        marks.insert(root.clone(), Mark::Open);
        path.push((root, first));
        while let Some((_, pending)) = path.last_mut() {
            let Some(next) = pending.pop() else {
                let (v, _) = path.pop().expect("non-empty");
                marks.insert(v, Mark::Done);
                continue;
            };
            match marks.get(&next) {
                Some(Mark::Done) => continue,
                Some(Mark::Open) => {
                    let at = path.iter().position(|(v, _)| *v == next).expect("open elements are on the path");
                    let mut cycle: Vec<Value> = path[at..].iter().map(|(v, _)| v.clone()).collect();
                    cycle.push(next);
                    return NoetherianVerdict {
                        status: Status::NotNoetherian,
                        method: Method::Bounded,
                        witness: Some(Chain(cycle)),
                    };
                }
                None => {}
            }
            expansions += 1;
            if path.len() > fuel || expansions > fuel {
                let chain: Vec<Value> = path.iter().map(|(v, _)| v.clone()).take(fuel + 1).collect();
                return unknown(Some(Chain(chain)));
            }
            let Some(succs) = succ(&next) else { return unknown(None) };
            marks.insert(next.clone(), Mark::Open);
            path.push((next, succs));
        }
    }
    NoetherianVerdict { status: Status::Noetherian, method: Method::Bounded, witness: None }
}

/// A chain produced by [`chains_from`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainInfo {
    pub chain: Chain,
    /// The last element is a minimum.
    pub maximal: bool,
    /// The chain hit `max_len` while its last element still has successors.
    pub truncated: bool,
}

/// Every chain starting at `a` with at most `max_len` steps, prefixes
/// included, in canonical order.
pub fn chains_from(r: &Relation, a: &Value, max_len: usize) -> Result<Vec<ChainInfo>> {
    if !r.source().contains(a) {
        return Err(Error::ValueOutsideSpace(a.clone()));
    }
    let mut out = Vec::new();
    let mut stack = vec![vec![a.clone()]];
    while let Some(chain) = stack.pop() {
        let last = chain.last().expect("non-empty");
        let succ: Vec<Value> = r
            .image(last)?
            .into_iter()
            .filter(|v| r.source().contains(v))
            .collect();
        let steps = chain.len() - 1;
        let maximal = succ.is_empty();
        let truncated = !maximal && steps >= max_len;
        if !maximal && steps < max_len {
            for v in succ.into_iter().rev() {
                let mut next = chain.clone();
                next.push(v);
                stack.push(next);
            }
        }
        out.push(ChainInfo { chain: Chain(chain), maximal, truncated });
    }
    out.sort_by(|x, y| x.chain.cmp(&y.chain));
    Ok(out)
}

/// Longest-chain lengths for every element of a finite acyclic relation.
fn all_heights(adj: &Adj) -> Option<Vec<usize>> {
    let order = topological_order(adj).ok()?;
    let mut h = vec![0usize; adj.len()];
    for &i in order.iter().rev() {
        h[i as usize] = adj[i as usize].iter().map(|&j| h[j as usize] + 1).max().unwrap_or(0);
    }
    Some(h)
}

fn checked_heights(r: &Relation) -> Result<(std::sync::Arc<Adj>, Vec<usize>)> {
    if !r.is_homogeneous() {
        return Err(Error::SpaceMismatch);
    }
    let adj = r.adjacency()?;
    let h = all_heights(&adj).ok_or(Error::NotNoetherian)?;
    Ok((adj, h))
}

/// `M(a)`, the maximum length of a chain starting at `a`.
pub fn height(r: &Relation, a: &Value) -> Result<usize> {
    let i = r.source().index_of(a).ok_or_else(|| Error::ValueOutsideSpace(a.clone()))?;
    let (_, h) = checked_heights(r)?;
    Ok(h[i])
}

/// Elements with no successor.
pub fn minima(r: &Relation) -> Result<BTreeSet<Value>> {
    let domain = r.domain()?;
    Ok(r.source()
        .values()?
        .iter()
        .filter(|v| !domain.contains(v))
        .cloned()
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMode {
    /// `a` maps to the elements of `r^{M(a)}(a)`.
    Maxdepth,
    /// `a` maps to every minimum reachable from it.
    ReachableMinima,
}

/// The limit `r^·` of a Noetherian relation.
pub fn limit(r: &Relation, mode: LimitMode) -> Result<Relation> {
    let (adj, h) = checked_heights(r)?;
    let values = r.space().values()?;
    let mut pairs = Vec::new();
    for (i, a) in values.iter().enumerate() {
        for j in limit_indices(&adj, &h, i as u32, mode) {
            pairs.push((a.clone(), values[j as usize].clone()));
        }
    }
    Relation::from_pairs(r.space(), pairs)
}

/// `r^·(a)` without building the whole limit.
pub fn limit_image(r: &Relation, a: &Value, mode: LimitMode) -> Result<BTreeSet<Value>> {
    let i = r.source().index_of(a).ok_or_else(|| Error::ValueOutsideSpace(a.clone()))?;
    let (adj, h) = checked_heights(r)?;
    let values = r.space().values()?;
    Ok(limit_indices(&adj, &h, i as u32, mode)
        .into_iter()
        .map(|j| values[j as usize].clone())
        .collect())
}

fn limit_indices(adj: &Adj, h: &[usize], a: u32, mode: LimitMode) -> Vec<u32> {
    // Along a chain of maximal length every step lowers the height by exactly
    // one, so maxdepth follows only those steps.
    let follow = |u: u32, v: u32| match mode {
        LimitMode::Maxdepth => h[v as usize] + 1 == h[u as usize],
        LimitMode::ReachableMinima => true,
    };
    let mut seen = HashSet::from([a]);
    let mut queue = VecDeque::from([a]);
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        if adj[u as usize].is_empty() {
            out.push(u);
        }
        for &v in &adj[u as usize] {
            if follow(u, v) && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Outcome of checking whether one relation is a seed of another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedCheck {
    /// A pair of the candidate missing from the larger relation.
    pub pair_outside: Option<(Value, Value)>,
    /// The canonically greatest element in exactly one of the two domains.
    pub domain_mismatch: Option<Value>,
}

impl SeedCheck {
    pub fn holds(&self) -> bool {
        self.pair_outside.is_none() && self.domain_mismatch.is_none()
    }
}

/// Checks `r ⊆ s` and `domain(r) = domain(s)`, reporting witnesses.
pub fn seed_check(r: &Relation, s: &Relation) -> Result<SeedCheck> {
    if r.source() != s.source() || r.target() != s.target() {
        return Err(Error::SpaceMismatch);
    }
    let pair_outside = r.first_pair_outside(s)?;
    let dr = r.domain()?;
    let ds = s.domain()?;
    let domain_mismatch = dr.symmetric_difference(&ds).max().cloned();
    Ok(SeedCheck { pair_outside, domain_mismatch })
}

/// Whether `r` is a seed of `s`.
pub fn is_seed(r: &Relation, s: &Relation) -> Result<bool> {
    Ok(seed_check(r, s)?.holds())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Finitary {
    /// `None` when the question stayed open within the fuel.
    pub finitary: Option<bool>,
    pub bound: Option<usize>,
}

/// Whether `r*(a)` is reached by a finite union of powers.
///
/// The frontier `rⁱ(a)` is iterated. If it becomes empty at step `M + 1`, the
/// bound is `M` (the height of `a`). If a frontier repeats, the union has
/// stopped growing and the bound is the step at which it stabilized. Neither
/// within `fuel` steps gives an unknown verdict.
pub fn is_finitary(r: &Relation, a: &Value, fuel: usize) -> Result<Finitary> {
    if !r.source().contains(a) {
        return Err(Error::ValueOutsideSpace(a.clone()));
    }
    let mut frontier: BTreeSet<Value> = BTreeSet::from([a.clone()]);
    let mut union = frontier.clone();
    let mut stable_since = 0usize;
    let mut seen: HashSet<Vec<Value>> = HashSet::from([frontier.iter().cloned().collect()]);
    for step in 1..=fuel.saturating_add(1) {
        let next: BTreeSet<Value> = r
            .image_of_set(&frontier)?
            .into_iter()
            .filter(|v| r.source().contains(v))
            .collect();
        if next.is_empty() {
            return Ok(Finitary { finitary: Some(true), bound: Some(step - 1) });
        }
        let before = union.len();
        union.extend(next.iter().cloned());
        if union.len() > before {
            stable_since = step;
        }
        if !seen.insert(next.iter().cloned().collect()) {
            return Ok(Finitary { finitary: Some(true), bound: Some(stable_since) });
        }
        frontier = next;
    }
    Ok(Finitary { finitary: None, bound: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    fn greater(lo: i64, hi: i64) -> Relation {
        Relation::from_test(&Space::int_range(lo, hi), |a, b| a.as_int() > b.as_int())
            .materialize()
            .unwrap()
    }

    fn letters(pairs: &[(&str, &str)], nodes: &[&str]) -> Relation {
        let sp = Space::explicit(nodes.iter().map(|n| Value::node(*n))).unwrap();
        Relation::from_pairs(&sp, pairs.iter().map(|(a, b)| (Value::node(*a), Value::node(*b)))).unwrap()
    }

    fn abcd() -> Relation {
        letters(&[("a", "b"), ("a", "c"), ("c", "d")], &["a", "b", "c", "d"])
    }

    fn predecessor_on_integers() -> Relation {
        Relation::from_image(&Space::integers(), |a| vec![Value::Int(a.as_int().unwrap() - 1)])
    }

    #[test]
    fn noetherian_examples() {
        assert!(is_noetherian(&greater(0, 5), DEFAULT_FUEL).is_noetherian());
        let sp = Space::int_range(0, 3);
        let cyc = Relation::from_pairs(&sp, [(Value::Int(1), Value::Int(2)), (Value::Int(2), Value::Int(1))]).unwrap();
        let v = is_noetherian(&cyc, DEFAULT_FUEL);
        assert_eq!(v.status, Status::NotNoetherian);
        assert_eq!(v.witness.unwrap().0, vec![Value::Int(1), Value::Int(2), Value::Int(1)]);
        let v = is_noetherian(&predecessor_on_integers(), 1000);
        assert_eq!(v.status, Status::UnknownFuelExhausted);
        assert_eq!(v.witness.unwrap().length(), 1000);
    }

    #[test]
    fn shortest_cycle_is_reported() {
        let sp = Space::int_range(0, 5);
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 4)];
        let r = Relation::from_pairs(&sp, pairs.map(|(a, b)| (Value::Int(a), Value::Int(b)))).unwrap();
        let w = is_noetherian(&r, DEFAULT_FUEL).witness.unwrap();
        assert_eq!(w.0, vec![Value::Int(4), Value::Int(5), Value::Int(4)]);
    }

    #[test]
    fn bounded_exploration_of_closed_region() {
        let sp = Space::integers_from(vec![5]);
        let r = Relation::from_image(&sp, |a| {
            let a = a.as_int().unwrap();
            if a > 0 { vec![Value::Int(a - 1)] } else { vec![] }
        });
        let v = is_noetherian(&r, 100);
        assert_eq!((v.status, v.method), (Status::Noetherian, Method::Bounded));
        let loops = Relation::from_image(&sp, |a| vec![Value::Int((a.as_int().unwrap() + 1) % 3)]);
        assert_eq!(is_noetherian(&loops, 100).status, Status::NotNoetherian);
    }

    #[test]
    fn chains_examples() {
        let r = abcd();
        let got: Vec<String> = chains_from(&r, &Value::node("a"), 10)
            .unwrap()
            .iter()
            .map(|c| c.chain.to_string())
            .collect();
        assert_eq!(got, ["a", "a → b", "a → c", "a → c → d"]);
        let from_min = chains_from(&r, &Value::node("b"), 10).unwrap();
        assert_eq!(from_min.len(), 1);
        assert!(from_min[0].maximal);
        let g = chains_from(&greater(0, 3), &Value::Int(3), 10).unwrap();
        assert_eq!(g.len(), 8);
        let cut = chains_from(&greater(0, 3), &Value::Int(3), 1).unwrap();
        assert!(cut.iter().any(|c| c.truncated));
    }

    #[test]
    fn height_examples() {
        assert_eq!(height(&greater(0, 9), &Value::Int(7)).unwrap(), 7);
        assert_eq!(height(&greater(0, 9), &Value::Int(0)).unwrap(), 0);
        assert_eq!(height(&abcd(), &Value::node("a")).unwrap(), 2);
        let cyc = letters(&[("a", "b"), ("b", "a")], &["a", "b"]);
        assert!(matches!(height(&cyc, &Value::node("a")), Err(Error::NotNoetherian)));
    }

    #[test]
    fn minima_examples() {
        assert_eq!(minima(&greater(0, 5)).unwrap(), BTreeSet::from([Value::Int(0)]));
        let sp = Space::int_range(0, 2);
        assert_eq!(minima(&Relation::empty(&sp).unwrap()).unwrap().len(), 3);
        assert_eq!(
            minima(&abcd()).unwrap(),
            BTreeSet::from([Value::node("b"), Value::node("d")])
        );
    }

    #[test]
    fn limit_examples() {
        let sp = Space::int_range(0, 2);
        let succ = Relation::from_pairs(&sp, [(Value::Int(1), Value::Int(0)), (Value::Int(2), Value::Int(1))]).unwrap();
        let expect = Relation::from_pairs(
            &sp,
            [0, 1, 2].map(|a| (Value::Int(a), Value::Int(0))),
        )
        .unwrap();
        for mode in [LimitMode::Maxdepth, LimitMode::ReachableMinima] {
            assert_eq!(limit(&succ, mode).unwrap(), expect);
            assert_eq!(limit(&Relation::empty(&sp).unwrap(), mode).unwrap(), Relation::identity(&sp).unwrap());
        }
        let a = Value::node("a");
        assert_eq!(limit_image(&abcd(), &a, LimitMode::Maxdepth).unwrap(), BTreeSet::from([Value::node("d")]));
        assert_eq!(
            limit_image(&abcd(), &a, LimitMode::ReachableMinima).unwrap(),
            BTreeSet::from([Value::node("b"), Value::node("d")])
        );
    }

    #[test]
    fn seed_examples() {
        let sp = Space::int_range(0, 5);
        let succ = Relation::from_image(&sp, |a| match a.as_int().unwrap() {
            0 => vec![],
            n => vec![Value::Int(n - 1)],
        });
        assert!(is_seed(&succ, &greater(0, 5)).unwrap());
        assert!(is_seed(&greater(0, 5), &greater(0, 5)).unwrap());
        let nodes = ["a", "b", "e"];
        let r = letters(&[("a", "b")], &nodes);
        let s = letters(&[("a", "b"), ("a", "e")], &nodes);
        assert!(is_seed(&r, &s).unwrap());
        assert_ne!(
            limit(&r, LimitMode::ReachableMinima).unwrap(),
            limit(&s, LimitMode::ReachableMinima).unwrap()
        );
        let body = Relation::from_pairs(&Space::int_range(0, 3), [(Value::Int(2), Value::Int(1))]).unwrap();
        let check = seed_check(&body, &greater(0, 3)).unwrap();
        assert_eq!(check.domain_mismatch, Some(Value::Int(3)));
        assert!(matches!(is_seed(&body, &greater(0, 5)), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn finitary_examples() {
        let f = is_finitary(&greater(0, 8), &Value::Int(5), DEFAULT_FUEL).unwrap();
        assert_eq!(f, Finitary { finitary: Some(true), bound: Some(5) });
        let f = is_finitary(&greater(0, 8), &Value::Int(0), DEFAULT_FUEL).unwrap();
        assert_eq!(f.bound, Some(0));
        let f = is_finitary(&predecessor_on_integers(), &Value::Int(0), 100).unwrap();
        assert_eq!(f.finitary, None);
        let cyc = letters(&[("a", "b"), ("b", "c"), ("c", "b")], &["a", "b", "c"]);
        let f = is_finitary(&cyc, &Value::node("a"), 100).unwrap();
        assert_eq!(f, Finitary { finitary: Some(true), bound: Some(2) });
    }
}
