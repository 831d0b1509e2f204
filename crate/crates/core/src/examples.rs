//! Example loops: Euclid's gcd, sequential search, general search (interval
//! and interval-set models), partition and Lamsort.
//!
//! Each example is a [`LoopDef`] over a finite space. A single instance
//! serves every input that shares its state space (for gcd, all pairs with the
//! same gcd; for partition, all permutations of the same multiset), which is
//! how the exhaustive sweeps stay small.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::catalog::{named_relation, NamedFn, NamedRelation, NoetherianCert, Rule};
use crate::error::{Error, Result};
use crate::loopkit::{make_loop, oracles::gcd_of, Chooser, LoopDef, Oracle, VariantFn};
use crate::relation::{KeyFn, Relation};
use crate::space::{intervals_within, Space};
use crate::value::{Interval, Value};

/// Longest array accepted by the array examples.
pub const MAX_ARRAY_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    Gcd,
    SeqSearch,
    GeneralSearchInterval,
    GeneralSearchIntervalset,
    Partition,
    Lamsort,
}

impl ExampleName {
    pub const ALL: [ExampleName; 6] = [
        ExampleName::Gcd,
        ExampleName::SeqSearch,
        ExampleName::GeneralSearchInterval,
        ExampleName::GeneralSearchIntervalset,
        ExampleName::Partition,
        ExampleName::Lamsort,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Gcd => "gcd",
            ExampleName::SeqSearch => "seq_search",
            ExampleName::GeneralSearchInterval => "general_search_interval",
            ExampleName::GeneralSearchIntervalset => "general_search_intervalset",
            ExampleName::Partition => "partition",
            ExampleName::Lamsort => "lamsort",
        }
    }

    pub fn parse(name: &str) -> Option<ExampleName> {
        ExampleName::ALL.into_iter().find(|n| n.as_str() == name)
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExampleName::Gcd => "Euclid's subtraction gcd on pairs (m, n); order MAXINT",
            ExampleName::SeqSearch => "left-to-right search growing 1..i; order SUBINTERVAL",
            ExampleName::GeneralSearchInterval => "search shrinking an interval I to any strict subinterval; order SUPINTERVAL",
            ExampleName::GeneralSearchIntervalset => "search growing a set of x-free intervals; order INTERVALSUBSET",
            ExampleName::Partition => "Quicksort partition of t around a pivot; order SUPINTERVAL on a..b",
            ExampleName::Lamsort => "iterative Quicksort over a set of adjacent intervals; order INTERVALMAX",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GcdOrder {
    #[default]
    MaxInt,
    IntSum,
}

/// Parameters of a single example instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "example", rename_all = "snake_case")]
pub enum Params {
    Gcd { a: i64, b: i64, bound: Option<i64>, order: GcdOrder },
    SeqSearch { t: Vec<i64>, x: i64 },
    GeneralSearchInterval { t: Vec<i64>, x: i64, midpoint: bool },
    GeneralSearchIntervalset { t: Vec<i64>, x: i64, disjoint: bool },
    Partition { t: Vec<i64>, pivot: i64 },
    Lamsort { t: Vec<i64> },
}

impl Params {
    pub fn name(&self) -> ExampleName {
        match self {
            Params::Gcd { .. } => ExampleName::Gcd,
            Params::SeqSearch { .. } => ExampleName::SeqSearch,
            Params::GeneralSearchInterval { .. } => ExampleName::GeneralSearchInterval,
            Params::GeneralSearchIntervalset { .. } => ExampleName::GeneralSearchIntervalset,
            Params::Partition { .. } => ExampleName::Partition,
            Params::Lamsort { .. } => ExampleName::Lamsort,
        }
    }

    /// The loop input these parameters describe.
    pub fn input(&self) -> Value {
        match self {
            Params::Gcd { a, b, .. } => Value::int_pair(*a, *b),
            Params::SeqSearch { t, x }
            | Params::GeneralSearchInterval { t, x, .. }
            | Params::GeneralSearchIntervalset { t, x, .. } => search_input(t, *x),
            Params::Partition { t, .. } | Params::Lamsort { t } => Value::Seq(t.clone()),
        }
    }
}

/// A loop together with the inputs it is meant to be run on.
#[derive(Clone, Debug)]
pub struct ExampleInstance {
    pub name: ExampleName,
    pub lp: LoopDef,
    pub oracle: Oracle,
    pub variant: VariantFn,
    pub inputs: Vec<Value>,
}

impl ExampleInstance {
    /// Checks the instance's postcondition.
    pub fn oracle_check(&self, input: &Value, terminal: &Value) -> bool {
        self.oracle.check(&self.lp, input, terminal)
    }
}

/// Checks a named postcondition outside any loop.
pub fn oracle_check(oracle: &str, input: &Value, terminal: &Value) -> Result<bool> {
    use crate::loopkit::oracles as o;
    Ok(match Oracle::from_name(oracle)? {
        Oracle::Gcd => o::gcd(input, terminal),
        Oracle::SeqMembership => o::seq_membership(input, terminal),
        Oracle::IntervalMembership => o::interval_membership(input, terminal),
        Oracle::IntervalsetMembership => o::intervalset_membership(input, terminal),
        Oracle::PartitionSplit => o::partition_split(input, terminal),
        Oracle::SortedPermutation => o::sorted_permutation(input, terminal),
        Oracle::MinimumCharacterization => {
            return Err(Error::ParameterOutOfRange(
                "minimum_characterization needs a loop to evaluate against".into(),
            ))
        }
    })
}

pub fn search_input(t: &[i64], x: i64) -> Value {
    Value::Tuple(vec![Value::Seq(t.to_vec()), Value::Int(x)])
}

fn out_of_range(msg: impl Into<String>) -> Error {
    Error::ParameterOutOfRange(msg.into())
}

fn check_array(t: &[i64]) -> Result<()> {
    if t.len() > MAX_ARRAY_LEN {
        return Err(out_of_range(format!("arrays are limited to {MAX_ARRAY_LEN} elements")));
    }
    Ok(())
}

fn iv(lo: i64, hi: i64) -> Interval {
    Interval::new(lo, hi).expect("valid interval")
}

/// Builds the instance for one input.
pub fn instantiate(params: &Params) -> Result<ExampleInstance> {
    match params {
        Params::Gcd { a, b, bound, order } => {
            if *a < 1 || *b < 1 {
                return Err(out_of_range("gcd inputs must be positive"));
            }
            let bound = bound.unwrap_or((*a).max(*b));
            if *a > bound || *b > bound {
                return Err(out_of_range(format!("inputs exceed the bound {bound}")));
            }
            gcd_instance(gcd_of(*a, *b), bound, *order, vec![params.input()])
        }
        Params::SeqSearch { t, x } => {
            check_array(t)?;
            seq_search_instance(t, *x, vec![params.input()])
        }
        Params::GeneralSearchInterval { t, x, midpoint } => {
            check_array(t)?;
            general_search_interval_instance(t, *x, *midpoint, vec![params.input()])
        }
        Params::GeneralSearchIntervalset { t, x, disjoint } => {
            check_array(t)?;
            general_search_intervalset_instance(t, *x, *disjoint, vec![params.input()])
        }
        Params::Partition { t, pivot } => {
            check_array(t)?;
            partition_instance(t, 2 * pivot, vec![params.input()])
        }
        Params::Lamsort { t } => {
            check_array(t)?;
            lamsort_instance(t, vec![params.input()])
        }
    }
}

/// Explicit single-element or grouped input space with an intensional init.
fn init_relation(
    inputs: &[Value],
    space: &Space,
    f: impl Fn(&Value) -> Value + Send + Sync + 'static,
) -> Result<Relation> {
    let input_space = Space::explicit(inputs.iter().cloned())?;
    Relation::from_pairs_between(&input_space, space, inputs.iter().map(|i| (i.clone(), f(i))))
}

// ---------------------------------------------------------------- gcd

/// Pairs `(m, n)` in `1..bound` with `gcd(m, n) = g`; inputs are states.
pub fn gcd_instance(g: i64, bound: i64, order: GcdOrder, inputs: Vec<Value>) -> Result<ExampleInstance> {
    if g < 1 || bound < g {
        return Err(out_of_range("gcd family needs 1 <= g <= bound"));
    }
    let pairs = Space::pairs(Space::int_range(1, bound), Space::int_range(1, bound));
    let space = Space::filtered(pairs, format!("gcd={g}"), move |v| {
        v.as_int_pair().is_some_and(|(m, n)| gcd_of(m, n) == g)
    });
    let leaf = match order {
        GcdOrder::MaxInt => NamedRelation::MaxInt { lo: 0, hi: bound },
        GcdOrder::IntSum => NamedRelation::IntSum { lo: 0, hi: bound },
    };
    let order = named_relation(&leaf)?;
    let body = Relation::from_image(&space, |v| {
        let (m, n) = v.as_int_pair().expect("pair state");
        if m > n {
            vec![Value::int_pair(m - n, n)]
        } else if m < n {
            vec![Value::int_pair(m, n - m)]
        } else {
            vec![]
        }
    })
    .with_domain_hint(|v| v.as_int_pair().is_some_and(|(m, n)| m != n));
    let init = init_relation(&inputs, &space, Value::clone)?;
    Ok(ExampleInstance {
        name: ExampleName::Gcd,
        lp: make_loop(&space, &order, &init, &body, Some(Oracle::Gcd))?,
        oracle: Oracle::Gcd,
        variant: VariantFn::Named(NamedFn::Max),
        inputs,
    })
}

// ---------------------------------------------------------------- searches

fn prefix(i: i64) -> Value {
    Value::Interval(iv(1, i))
}

/// States `1..i` with `x` absent from `t[1..i]`; the order is SUBINTERVAL,
/// under which `1..i` is above `1..i+1`.
pub fn seq_search_instance(t: &[i64], x: i64, inputs: Vec<Value>) -> Result<ExampleInstance> {
    let n = t.len() as i64;
    let states = (0..=n).filter(|&i| !t[..i as usize].contains(&x)).map(prefix);
    let space = Space::explicit(states)?;
    let order = named_relation(&NamedRelation::SubInterval { lo: 1, hi: n })?;
    let arr = t.to_vec();
    // `t[i+1]` is only consulted when `i < n`.
    let step = move |v: &Value| -> Option<Value> {
        let i = v.as_interval()?.hi();
        (i < n && arr[i as usize] != x).then(|| prefix(i + 1))
    };
    let hint = step.clone();
    let body = Relation::from_image(&space, move |v| step(v).into_iter().collect())
        .with_domain_hint(move |v| hint(v).is_some());
    let init = init_relation(&inputs, &space, |_| prefix(0))?;
    let variant = VariantFn::Map(
        space
            .values()?
            .iter()
            .map(|v| (v.clone(), n - v.as_interval().expect("interval").hi()))
            .collect(),
    );
    Ok(ExampleInstance {
        name: ExampleName::SeqSearch,
        lp: make_loop(&space, &order, &init, &body, Some(Oracle::SeqMembership))?,
        oracle: Oracle::SeqMembership,
        variant,
        inputs,
    })
}

/// The binary-search choice: probe the midpoint and keep the half that can
/// still hold `x` (assumes `t` sorted; otherwise the least successor is used).
pub fn midpoint_chooser(t: &[i64], x: i64) -> Chooser {
    let t = t.to_vec();
    Arc::new(move |state, _succ| {
        let i = state.as_interval()?;
        if i.is_empty() {
            return None;
        }
        let mid = (i.lo() + i.hi()).div_euclid(2);
        let probe = t[(mid - 1) as usize];
        let next = if probe == x {
            iv(mid, mid)
        } else if probe < x {
            iv(mid + 1, i.hi())
        } else {
            iv(i.lo(), mid - 1)
        };
        Some(Value::Interval(next))
    })
}

/// Subintervals `I` of `1..n` with `(x ∈ t) = (x ∈ t[I])`; the body moves to
/// any strict subinterval that stays in the space.
pub fn general_search_interval_instance(
    t: &[i64],
    x: i64,
    midpoint: bool,
    inputs: Vec<Value>,
) -> Result<ExampleInstance> {
    let n = t.len() as i64;
    let found = |i: &Interval| i.points().any(|k| t[(k - 1) as usize] == x);
    let present = t.contains(&x);
    let members: Vec<Interval> = intervals_within(1, n).into_iter().filter(|i| found(i) == present).collect();
    let space = Space::explicit(members.iter().copied().map(Value::Interval))?;
    let order = named_relation(&NamedRelation::SupInterval { lo: 1, hi: n })?;
    let body = Relation::from_image(&space, move |v| {
        let i = v.as_interval().expect("interval state");
        members
            .iter()
            .filter(|j| i.strictly_contains(j))
            .map(|j| Value::Interval(*j))
            .collect()
    });
    let init = init_relation(&inputs, &space, move |_| Value::Interval(iv(1, n)))?;
    let mut lp = make_loop(&space, &order, &init, &body, Some(Oracle::IntervalMembership))?;
    if midpoint {
        lp = lp.with_policy(midpoint_chooser(t, x));
    }
    Ok(ExampleInstance {
        name: ExampleName::GeneralSearchInterval,
        lp,
        oracle: Oracle::IntervalMembership,
        variant: VariantFn::Named(NamedFn::Length),
        inputs,
    })
}

/// Sets of non-empty subintervals of `1..n` avoiding `x`. With `disjoint`,
/// members are pairwise disjoint, which keeps the space small; otherwise any
/// set of such intervals is a state. The body adds one new interval.
pub fn general_search_intervalset_instance(
    t: &[i64],
    x: i64,
    disjoint: bool,
    inputs: Vec<Value>,
) -> Result<ExampleInstance> {
    let n = t.len() as i64;
    let free: Vec<Interval> = intervals_within(1, n)
        .into_iter()
        .filter(|i| !i.is_empty() && i.points().all(|k| t[(k - 1) as usize] != x))
        .collect();
    let sets = if disjoint { disjoint_sets(&free) } else { all_sets(&free)? };
    let space = Space::explicit(sets.into_iter().map(Value::IntervalSet))?;
    let order = named_relation(&NamedRelation::IntervalSubset { lo: 1, hi: n })?;
    let candidates = free.clone();
    let body = Relation::from_image(&space, move |v| {
        let set = v.as_interval_set().expect("interval-set state");
        candidates
            .iter()
            .filter(|j| !set.contains(j) && (!disjoint || set.iter().all(|m| !m.overlaps(j))))
            .map(|j| {
                let mut next = set.clone();
                next.insert(*j);
                Value::IntervalSet(next)
            })
            .collect()
    });
    let init = init_relation(&inputs, &space, |_| Value::IntervalSet(BTreeSet::new()))?;
    let total = free.len() as i64;
    let variant = VariantFn::Map(
        space
            .values()?
            .iter()
            .map(|v| (v.clone(), total - v.as_interval_set().expect("set").len() as i64))
            .collect(),
    );
    Ok(ExampleInstance {
        name: ExampleName::GeneralSearchIntervalset,
        lp: make_loop(&space, &order, &init, &body, Some(Oracle::IntervalsetMembership))?,
        oracle: Oracle::IntervalsetMembership,
        variant,
        inputs,
    })
}

fn disjoint_sets(free: &[Interval]) -> Vec<BTreeSet<Interval>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(free: &[Interval], from: usize, current: &mut Vec<Interval>, out: &mut Vec<BTreeSet<Interval>>) {
        out.push(current.iter().copied().collect());
        for k in from..free.len() {
            if current.iter().all(|m| !m.overlaps(&free[k])) {
                current.push(free[k]);
                extend(free, k + 1, current, out);
                current.pop();
            }
        }
    }
    extend(free, 0, &mut current, &mut out);
    out
}

fn all_sets(free: &[Interval]) -> Result<Vec<BTreeSet<Interval>>> {
    let size = 1usize.checked_shl(free.len() as u32).unwrap_or(usize::MAX);
    let limit = crate::space::max_space();
    if free.len() >= usize::BITS as usize || size > limit {
        return Err(Error::SpaceTooLarge { size, limit });
    }
    Ok((0..size)
        .map(|mask| free.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, i)| *i).collect())
        .collect())
}

// ---------------------------------------------------------------- partition

/// One step of the partition body on `p` with `a..b` (1-based). The pivot
/// is given doubled so half-integer pivots stay exact.
pub fn partition_step(p: &[i64], a: i64, b: i64, pivot2: i64) -> Option<(Vec<i64>, i64, i64)> {
    if a > b {
        return None;
    }
    let (ta, tb) = (p[(a - 1) as usize], p[(b - 1) as usize]);
    if 2 * ta <= pivot2 {
        Some((p.to_vec(), a + 1, b))
    } else if 2 * tb >= pivot2 {
        Some((p.to_vec(), a, b - 1))
    } else {
        let mut q = p.to_vec();
        q.swap((a - 1) as usize, (b - 1) as usize);
        Some((q, a + 1, b - 1))
    }
}

/// Runs partition to completion on `p`; returns the array and the final `a`.
pub fn partition_pass(p: &[i64], pivot2: i64) -> (Vec<i64>, i64) {
    let (mut q, mut a, mut b) = (p.to_vec(), 1, p.len() as i64);
    while let Some((q2, a2, b2)) = partition_step(&q, a, b, pivot2) {
        (q, a, b) = (q2, a2, b2);
    }
    (q, a)
}

fn partition_state(p: Vec<i64>, a: i64, b: i64) -> Value {
    Value::Tuple(vec![Value::Seq(p), Value::Interval(iv(a, b))])
}

/// Every distinct permutation of `t`, in lexicographic order.
pub fn distinct_permutations(t: &[i64]) -> Vec<Vec<i64>> {
    let mut p = t.to_vec();
    p.sort_unstable();
    let mut out = vec![p.clone()];
    while let Some(k) = (1..p.len()).rev().find(|&k| p[k - 1] < p[k]) {
        let l = (k..p.len()).rev().find(|&l| p[l] > p[k - 1]).expect("a larger element exists");
        p.swap(k - 1, l);
        p[k..].reverse();
        out.push(p.clone());
    }
    out
}

/// States `<p, a..b>`: `p` a permutation of `t` with `p[1..a-1] ≤ pivot ≤ p[b+1..n]`.
pub fn partition_instance(t: &[i64], pivot2: i64, inputs: Vec<Value>) -> Result<ExampleInstance> {
    let n = t.len() as i64;
    let mut states = Vec::new();
    for p in distinct_permutations(t) {
        for i in intervals_within(1, n) {
            let left = &p[..(i.lo() - 1) as usize];
            let right = &p[i.hi().max(0) as usize..];
            if left.iter().all(|&v| 2 * v <= pivot2) && right.iter().all(|&v| 2 * v >= pivot2) {
                states.push(partition_state(p.clone(), i.lo(), i.hi()));
            }
        }
    }
    let space = Space::explicit(states)?;
    let order = projected_order(&space, 1, &NamedRelation::SupInterval { lo: 1, hi: n })?;
    let body = Relation::from_image(&space, move |v| {
        let p = v.component(0).and_then(Value::as_seq).expect("array");
        let i = v.component(1).and_then(Value::as_interval).expect("interval");
        partition_step(p, i.lo(), i.hi(), pivot2)
            .map(|(q, a, b)| partition_state(q, a, b))
            .into_iter()
            .collect()
    })
    .with_domain_hint(|v| v.component(1).and_then(Value::as_interval).is_some_and(|i| !i.is_empty()));
    let init = init_relation(&inputs, &space, move |v| {
        partition_state(v.as_seq().expect("array input").to_vec(), 1, n)
    })?;
    let variant = VariantFn::Map(
        space
            .values()?
            .iter()
            .map(|v| (v.clone(), v.component(1).and_then(Value::as_interval).expect("interval").len()))
            .collect(),
    );
    Ok(ExampleInstance {
        name: ExampleName::Partition,
        lp: make_loop(&space, &order, &init, &body, Some(Oracle::PartitionSplit))?,
        oracle: Oracle::PartitionSplit,
        variant,
        inputs,
    })
}

/// PROJECTION of a catalog leaf onto component `index` of the states.
fn projected_order(space: &Space, index: usize, leaf: &NamedRelation) -> Result<Relation> {
    let base = named_relation(leaf)?;
    let key: KeyFn = Arc::new(move |v| v.component(index).cloned());
    let cert = NoetherianCert::new(Rule::Projection, vec![base.cert().expect("catalog leaf").clone()]);
    Ok(Relation::induced(space, key, &base).with_cert(cert))
}

// ---------------------------------------------------------------- lamsort

fn lamsort_state(p: Vec<i64>, set: BTreeSet<Interval>) -> Value {
    Value::Tuple(vec![Value::Seq(p), Value::IntervalSet(set)])
}

/// Ways to cut `1..n` into consecutive non-empty intervals.
fn compositions(n: i64) -> Vec<BTreeSet<Interval>> {
    if n == 0 {
        return vec![BTreeSet::new()];
    }
    (0u64..1 << (n - 1))
        .map(|cuts| {
            let mut set = BTreeSet::new();
            let mut lo = 1;
            for k in 1..n {
                if cuts >> (k - 1) & 1 == 1 {
                    set.insert(iv(lo, k));
                    lo = k + 1;
                }
            }
            set.insert(iv(lo, n));
            set
        })
        .collect()
}

fn slice<'a>(p: &'a [i64], i: &Interval) -> &'a [i64] {
    &p[(i.lo() - 1) as usize..i.hi() as usize]
}

fn adjacent_sorted(p: &[i64], set: &BTreeSet<Interval>) -> bool {
    let parts: Vec<&Interval> = set.iter().collect();
    parts.windows(2).all(|w| {
        let left = slice(p, w[0]).iter().max();
        let right = slice(p, w[1]).iter().min();
        matches!((left, right), (Some(l), Some(r)) if l <= r)
    })
}

/// Splits interval `i` of state `(p, set)`: with `threshold`, by partitioning
/// `p[i]` around `threshold + 1/2`; without, by detaching its first position.
fn lamsort_split(p: &[i64], set: &BTreeSet<Interval>, i: Interval, threshold: Option<i64>) -> Value {
    let (q, a) = match threshold {
        Some(v) => {
            let (seg, a) = partition_pass(slice(p, &i), 2 * v + 1);
            let mut q = p.to_vec();
            q[(i.lo() - 1) as usize..i.hi() as usize].copy_from_slice(&seg);
            (q, i.lo() - 1 + a)
        }
        None => (p.to_vec(), i.lo() + 1),
    };
    let mut next = set.clone();
    next.remove(&i);
    next.insert(iv(i.lo(), a - 1));
    next.insert(iv(a, i.hi()));
    lamsort_state(q, next)
}

/// Thresholds that split `p[i]` into two non-empty sides; empty when the
/// interval is constant.
fn split_thresholds(p: &[i64], i: &Interval) -> Vec<i64> {
    let values: BTreeSet<i64> = slice(p, i).iter().copied().collect();
    let top = values.last().copied();
    values.into_iter().filter(|v| Some(*v) != top).collect()
}

fn lamsort_successors(p: &[i64], set: &BTreeSet<Interval>) -> Vec<Value> {
    let mut out = Vec::new();
    for i in set.iter().filter(|i| i.len() >= 2) {
        let thresholds = split_thresholds(p, i);
        if thresholds.is_empty() {
            out.push(lamsort_split(p, set, *i, None));
        }
        for v in thresholds {
            out.push(lamsort_split(p, set, *i, Some(v)));
        }
    }
    out
}

/// Single-mode choice: the leftmost longest interval, split at the least threshold.
pub fn lamsort_chooser() -> Chooser {
    Arc::new(|state, _succ| {
        let p = state.component(0)?.as_seq()?;
        let set = state.component(1)?.as_interval_set()?;
        let longest = set.iter().map(|i| i.len()).max()?;
        let i = *set.iter().find(|i| i.len() == longest)?;
        Some(lamsort_split(p, set, i, split_thresholds(p, &i).first().copied()))
    })
}

/// States `<p, IS>`: `p` a permutation of `t`, `IS` cuts `1..n` into adjacent
/// non-empty intervals with `p[I] ≤ p[I']` for neighbours.
pub fn lamsort_instance(t: &[i64], inputs: Vec<Value>) -> Result<ExampleInstance> {
    let n = t.len() as i64;
    let cuts = compositions(n);
    let mut states = Vec::new();
    for p in distinct_permutations(t) {
        for set in &cuts {
            if adjacent_sorted(&p, set) {
                states.push(lamsort_state(p.clone(), set.clone()));
            }
        }
    }
    let space = Space::explicit(states)?;
    let order = projected_order(&space, 1, &NamedRelation::IntervalMax { lo: 1, hi: n, profile: true })?;
    let body = Relation::from_image(&space, |v| {
        let p = v.component(0).and_then(Value::as_seq).expect("array");
        let set = v.component(1).and_then(Value::as_interval_set).expect("interval set");
        lamsort_successors(p, set)
    })
    .with_domain_hint(|v| {
        v.component(1)
            .and_then(Value::as_interval_set)
            .is_some_and(|s| s.iter().any(|i| i.len() >= 2))
    });
    let init = init_relation(&inputs, &space, move |v| {
        let whole = if n == 0 { BTreeSet::new() } else { BTreeSet::from([iv(1, n)]) };
        lamsort_state(v.as_seq().expect("array input").to_vec(), whole)
    })?;
    let variant = VariantFn::Map(
        space
            .values()?
            .iter()
            .map(|v| (v.clone(), n - v.component(1).and_then(Value::as_interval_set).expect("set").len() as i64))
            .collect(),
    );
    let lp = make_loop(&space, &order, &init, &body, Some(Oracle::SortedPermutation))?.with_policy(lamsort_chooser());
    Ok(ExampleInstance { name: ExampleName::Lamsort, lp, oracle: Oracle::SortedPermutation, variant, inputs })
}

// ---------------------------------------------------------------- sweeps

/// Bounds for an exhaustive sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepBounds {
    pub a_max: i64,
    pub b_max: i64,
    pub len_max: usize,
    pub val_max: i64,
    pub x_max: i64,
    pub pivot_max: i64,
}

impl SweepBounds {
    /// The standard sweep for an example: gcd over 1..30 squared, the searches
    /// over arrays of length up to 6 with values 0..3 and x in 0..4, partition
    /// with values and pivots 0..7, Lamsort up to length 5 with values 0..3.
    pub fn standard(name: ExampleName) -> Self {
        let base = SweepBounds { a_max: 30, b_max: 30, len_max: 6, val_max: 3, x_max: 4, pivot_max: 7 };
        match name {
            ExampleName::Partition => SweepBounds { val_max: 7, ..base },
            ExampleName::Lamsort => SweepBounds { len_max: 5, ..base },
            _ => base,
        }
    }
}

/// All arrays of length `0..=len_max` with entries in `0..=val_max`.
pub fn all_arrays(len_max: usize, val_max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len_max {
        layer = layer
            .iter()
            .flat_map(|a: &Vec<i64>| {
                (0..=val_max).map(move |v| {
                    let mut b = a.clone();
                    b.push(v);
                    b
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// One group of a sweep: inputs sharing a state space, built on demand.
#[derive(Clone, Debug)]
pub struct SweepGroup {
    kind: GroupKind,
    pub inputs: Vec<Value>,
}

#[derive(Clone, Debug)]
enum GroupKind {
    Gcd { g: i64, bound: i64 },
    Search { name: ExampleName, t: Vec<i64>, x: i64 },
    Partition { multiset: Vec<i64>, pivot2: i64 },
    Lamsort { multiset: Vec<i64> },
}

impl SweepGroup {
    pub fn instantiate(&self) -> Result<ExampleInstance> {
        let inputs = self.inputs.clone();
        match &self.kind {
            GroupKind::Gcd { g, bound } => gcd_instance(*g, *bound, GcdOrder::MaxInt, inputs),
            GroupKind::Search { name: ExampleName::SeqSearch, t, x } => seq_search_instance(t, *x, inputs),
            GroupKind::Search { name: ExampleName::GeneralSearchInterval, t, x } => {
                general_search_interval_instance(t, *x, false, inputs)
            }
            GroupKind::Search { t, x, .. } => general_search_intervalset_instance(t, *x, true, inputs),
            GroupKind::Partition { multiset, pivot2 } => partition_instance(multiset, *pivot2, inputs),
            GroupKind::Lamsort { multiset } => lamsort_instance(multiset, inputs),
        }
    }
}

/// Groups covering every input of the sweep. Inputs with the same state
/// space share one loop; groups are instantiated one at a time so large
/// sweeps stay within memory.
pub fn sweep(name: ExampleName, bounds: &SweepBounds) -> Result<Vec<SweepGroup>> {
    if bounds.len_max > MAX_ARRAY_LEN {
        return Err(out_of_range(format!("arrays are limited to {MAX_ARRAY_LEN} elements")));
    }
    match name {
        ExampleName::Gcd => {
            if bounds.a_max < 1 || bounds.b_max < 1 {
                return Err(out_of_range("gcd bounds must be positive"));
            }
            let bound = bounds.a_max.max(bounds.b_max);
            let mut groups: BTreeMap<i64, Vec<Value>> = BTreeMap::new();
            for a in 1..=bounds.a_max {
                for b in 1..=bounds.b_max {
                    groups.entry(gcd_of(a, b)).or_default().push(Value::int_pair(a, b));
                }
            }
            Ok(groups
                .into_iter()
                .map(|(g, inputs)| SweepGroup { kind: GroupKind::Gcd { g, bound }, inputs })
                .collect())
        }
        ExampleName::SeqSearch | ExampleName::GeneralSearchInterval | ExampleName::GeneralSearchIntervalset => {
            // The state space depends only on n and where x occurs.
            let mut groups: BTreeMap<(usize, Vec<bool>), SweepGroup> = BTreeMap::new();
            for t in all_arrays(bounds.len_max, bounds.val_max) {
                for x in 0..=bounds.x_max {
                    let mut mask: Vec<bool> = t.iter().map(|&v| v == x).collect();
                    if name == ExampleName::SeqSearch {
                        if let Some(k) = mask.iter().position(|&b| b) {
                            mask.iter_mut().skip(k + 1).for_each(|b| *b = false);
                        }
                    }
                    groups
                        .entry((t.len(), mask))
                        .or_insert_with(|| SweepGroup {
                            kind: GroupKind::Search { name, t: t.clone(), x },
                            inputs: Vec::new(),
                        })
                        .inputs
                        .push(search_input(&t, x));
                }
            }
            Ok(groups.into_values().collect())
        }
        ExampleName::Partition | ExampleName::Lamsort => {
            let mut groups: BTreeMap<Vec<i64>, Vec<Value>> = BTreeMap::new();
            for t in all_arrays(bounds.len_max, bounds.val_max) {
                let mut key = t.clone();
                key.sort_unstable();
                groups.entry(key).or_default().push(Value::Seq(t));
            }
            let mut out = Vec::new();
            for (multiset, inputs) in groups {
                if name == ExampleName::Lamsort {
                    out.push(SweepGroup { kind: GroupKind::Lamsort { multiset }, inputs });
                } else {
                    for pivot in 0..=bounds.pivot_max {
                        let kind = GroupKind::Partition { multiset: multiset.clone(), pivot2: 2 * pivot };
                        out.push(SweepGroup { kind, inputs: inputs.clone() });
                    }
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopkit::{variant_to_relation, verify, InputSample};

    #[test]
    fn gcd_run() {
        let inst = instantiate(&Params::Gcd { a: 12, b: 8, bound: Some(12), order: GcdOrder::MaxInt }).unwrap();
        let trace = inst.lp.run(&Value::int_pair(12, 8), 100).unwrap();
        assert_eq!(trace.states, vec![Value::int_pair(12, 8), Value::int_pair(4, 8), Value::int_pair(4, 4)]);
        assert!(inst.oracle_check(&Value::int_pair(12, 8), &trace.terminal));
        assert!(!inst.oracle_check(&Value::int_pair(12, 8), &Value::int_pair(5, 5)));
        let same = instantiate(&Params::Gcd { a: 5, b: 5, bound: None, order: GcdOrder::IntSum }).unwrap();
        assert_eq!(same.lp.run(&Value::int_pair(5, 5), 10).unwrap().steps, 0);
    }

    #[test]
    fn gcd_exit_condition_is_diagonal() {
        for g in 1..=6 {
            let inst = gcd_instance(g, 6, GcdOrder::MaxInt, vec![Value::int_pair(g, g)]).unwrap();
            let exit = inst.lp.exit_condition().unwrap();
            let diagonal: BTreeSet<Value> = inst
                .lp
                .space()
                .values()
                .unwrap()
                .iter()
                .filter(|v| matches!(v.as_int_pair(), Some((m, n)) if m == n))
                .cloned()
                .collect();
            assert_eq!(exit, diagonal);
        }
    }

    #[test]
    fn seq_search_runs() {
        let empty = instantiate(&Params::SeqSearch { t: vec![], x: 1 }).unwrap();
        let trace = empty.lp.run(&search_input(&[], 1), 10).unwrap();
        assert_eq!(trace.terminal, prefix(0));
        let inst = instantiate(&Params::SeqSearch { t: vec![5, 7, 9], x: 7 }).unwrap();
        let input = search_input(&[5, 7, 9], 7);
        assert_eq!(inst.lp.run(&input, 10).unwrap().terminal, prefix(1));
        let (_, terminal) = inst.lp.closure_images_at(&input, 100).unwrap();
        assert_eq!(terminal, BTreeSet::from([prefix(1)]));
    }

    #[test]
    fn binary_search_path() {
        let inst = instantiate(&Params::GeneralSearchInterval { t: vec![1, 3, 5, 7], x: 5, midpoint: true }).unwrap();
        let trace = inst.lp.run(&search_input(&[1, 3, 5, 7], 5), 10).unwrap();
        let got: Vec<String> = trace.states.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, ["1..4", "3..4", "3..3"]);
    }

    #[test]
    fn partition_example() {
        let inst = instantiate(&Params::Partition { t: vec![6, 2, 8, 4], pivot: 5 }).unwrap();
        let input = Value::Seq(vec![6, 2, 8, 4]);
        let trace = inst.lp.run(&input, 100).unwrap();
        assert_eq!(trace.terminal, partition_state(vec![4, 2, 8, 6], 3, 2));
        assert!(inst.oracle_check(&input, &trace.terminal));
    }

    #[test]
    fn lamsort_sorts() {
        let inst = instantiate(&Params::Lamsort { t: vec![3, 1, 2] }).unwrap();
        let input = Value::Seq(vec![3, 1, 2]);
        let trace = inst.lp.run(&input, 100).unwrap();
        assert_eq!(trace.terminal.component(0), Some(&Value::Seq(vec![1, 2, 3])));
        let all = inst.lp.run_all(&input, 1000).unwrap();
        assert!(all.terminals.iter().all(|t| inst.oracle_check(&input, t)));
        let report = verify(&inst.lp, &InputSample::All, 10_000);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn lamsort_longest_interval_is_not_a_variant() {
        let inst = instantiate(&Params::Lamsort { t: vec![1, 2, 3, 4] }).unwrap();
        let space = inst.lp.space();
        let longest = VariantFn::Map(
            space
                .values()
                .unwrap()
                .iter()
                .map(|v| {
                    let set = v.component(1).unwrap();
                    (v.clone(), NamedFn::MaxIntervalLength.apply(set).unwrap().as_int().unwrap())
                })
                .collect(),
        );
        let by_longest = variant_to_relation(&longest, space).unwrap();
        let stalled = inst.lp.body().first_pair_outside(&by_longest).unwrap();
        let (from, _) = stalled.expect("a split that keeps the longest interval");
        let set = from.component(1).and_then(Value::as_interval_set).unwrap();
        assert!(set.iter().filter(|i| i.len() == 2).count() >= 2, "{from}");

        let counted = variant_to_relation(&inst.variant, space).unwrap();
        assert_eq!(inst.lp.body().first_pair_outside(&counted).unwrap(), None);
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(distinct_permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(distinct_permutations(&[]).len(), 1);
        assert_eq!(distinct_permutations(&[3, 2, 1, 0]).len(), 24);
    }

    #[test]
    fn oracle_names() {
        assert!(oracle_check("sorted_permutation", &Value::Seq(vec![3, 1, 2]), &Value::Seq(vec![1, 2, 3])).unwrap());
        assert!(matches!(oracle_check("nope", &Value::Int(0), &Value::Int(0)), Err(Error::UnknownOracle(_))));
    }
}
