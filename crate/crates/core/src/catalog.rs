//! Catalog of Noetherian relations and constructors.
//!
//! [`build`] turns a [`CatalogExpr`] into a [`Relation`] together with a
//! [`NoetherianCert`] recording which rule justifies it. Rules whose general
//! claim is not established are marked [`Trust::Claimed`]; their output is
//! re-checked exhaustively by [`certify`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noether::{is_noetherian, Method, NoetherianVerdict, Status, DEFAULT_FUEL};
use crate::relation::{KeyFn, Relation};
use crate::space::Space;
use crate::value::Value;

/// Largest base set accepted by SUPSET/SUBSET.
pub const MAX_POWERSET_BASE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "COMPOSE")]
    Compose,
    #[serde(rename = "CLOSURE")]
    Closure,
    #[serde(rename = "SUBREL")]
    Subrel,
    #[serde(rename = "RESTRICT")]
    Restrict,
    #[serde(rename = "INDUCED")]
    Induced,
    #[serde(rename = "PROJECTION")]
    Projection,
    #[serde(rename = "INVERSE")]
    Inverse,
    #[serde(rename = "ACYCLIC")]
    Acyclic,
    #[serde(rename = "ACYCLIC'", alias = "ACYCLIC′")]
    AcyclicInverse,
    #[serde(rename = "PARENT")]
    Parent,
    #[serde(rename = "ANCESTOR")]
    Ancestor,
    #[serde(rename = "CHILD")]
    Child,
    #[serde(rename = "DESCENDANT")]
    Descendant,
    #[serde(rename = "SUPSET")]
    Supset,
    #[serde(rename = "SUBSET")]
    Subset,
    #[serde(rename = "SUCCESSOR")]
    Successor,
    #[serde(rename = "INTGREATER")]
    IntGreater,
    #[serde(rename = "PREDECESSOR")]
    Predecessor,
    #[serde(rename = "INTLESSER")]
    IntLesser,
    #[serde(rename = "INTDIFF")]
    IntDiff,
    #[serde(rename = "INTSUM")]
    IntSum,
    #[serde(rename = "MAXINT")]
    MaxInt,
    #[serde(rename = "MININT")]
    MinInt,
    #[serde(rename = "SUPINTERVAL")]
    SupInterval,
    #[serde(rename = "SUBINTERVAL")]
    SubInterval,
    #[serde(rename = "INTERVAL")]
    Interval,
    #[serde(rename = "INTERVAL'", alias = "INTERVAL′")]
    IntervalInverse,
    #[serde(rename = "INTERVALSUPSET")]
    IntervalSupset,
    #[serde(rename = "INTERVALSUBSET")]
    IntervalSubset,
    #[serde(rename = "INTERVALMAX")]
    IntervalMax,
    #[serde(rename = "EXHAUSTIVE")]
    Exhaustive,
}

impl Rule {
    /// Rules whose general statement is not established; relations built with
    /// them are re-checked before being trusted.
    pub fn is_claimed(self) -> bool {
        matches!(self, Rule::Compose | Rule::Parent | Rule::Ancestor)
    }

    /// Leaf rules that define strict orders.
    pub fn defines_order(self) -> bool {
        matches!(
            self,
            Rule::Ancestor
                | Rule::Descendant
                | Rule::Supset
                | Rule::Subset
                | Rule::IntGreater
                | Rule::IntLesser
                | Rule::IntDiff
                | Rule::IntSum
                | Rule::MaxInt
                | Rule::MinInt
                | Rule::SupInterval
                | Rule::SubInterval
                | Rule::Interval
                | Rule::IntervalInverse
                | Rule::IntervalSupset
                | Rule::IntervalSubset
                | Rule::IntervalMax
        )
    }

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trust {
    Sound,
    Claimed,
}

/// Why a relation is Noetherian: the rule applied and the certificates of
/// its premises.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoetherianCert {
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<NoetherianCert>,
    pub trust: Trust,
}

impl NoetherianCert {
    pub fn leaf(rule: Rule) -> Self {
        NoetherianCert::new(rule, Vec::new())
    }

    /// Whether the certified relation is a strict order: closures always are,
    /// inverses and induced relations are when their base is.
    pub fn defines_order(&self) -> bool {
        match self.rule {
            Rule::Closure => true,
            Rule::Inverse | Rule::Induced | Rule::Projection => self.premises.iter().all(NoetherianCert::defines_order),
            rule => rule.defines_order(),
        }
    }

    /// A certificate is claimed if its rule or any premise is.
    pub fn new(rule: Rule, premises: Vec<NoetherianCert>) -> Self {
        let claimed = rule.is_claimed() || premises.iter().any(|p| p.trust == Trust::Claimed);
        NoetherianCert {
            rule,
            premises,
            trust: if claimed { Trust::Claimed } else { Trust::Sound },
        }
    }
}

/// A description of a finite space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceExpr {
    IntRange { lo: i64, hi: i64 },
    Explicit { values: Vec<Value> },
    Product { of: Vec<SpaceExpr> },
    IntervalsOf { lo: i64, hi: i64 },
    IntervalSetsOf { lo: i64, hi: i64 },
    Powerset { base: Vec<Value> },
}

impl SpaceExpr {
    pub fn to_space(&self) -> Result<Space> {
        Ok(match self {
            SpaceExpr::IntRange { lo, hi } => Space::int_range(*lo, *hi),
            SpaceExpr::Explicit { values } => Space::explicit(values.iter().cloned())?,
            SpaceExpr::Product { of } => {
                if of.len() < 2 {
                    return Err(Error::MalformedExpr("a product needs at least two factors".into()));
                }
                Space::product(of.iter().map(SpaceExpr::to_space).collect::<Result<_>>()?)
            }
            SpaceExpr::IntervalsOf { lo, hi } => Space::intervals_of(*lo, *hi),
            SpaceExpr::IntervalSetsOf { lo, hi } => Space::interval_sets_of(*lo, *hi),
            SpaceExpr::Powerset { base } => {
                check_powerset_base(base.len())?;
                Space::powerset(base.iter().cloned())
            }
        })
    }
}

fn check_powerset_base(len: usize) -> Result<()> {
    if len > MAX_POWERSET_BASE {
        return Err(Error::ParameterOutOfRange(format!(
            "powerset base has {len} elements, at most {MAX_POWERSET_BASE} allowed"
        )));
    }
    Ok(())
}

/// Functions available to INDUCED.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedFn {
    Max,
    Min,
    Sum,
    AbsDiff,
    /// Number of elements of an interval, sequence or tuple.
    Length,
    /// `|hi - lo|` of an interval.
    IntervalWidth,
    /// Longest member of an interval set (0 for the empty set).
    MaxIntervalLength,
    /// Number of members of an interval set or tuple.
    Cardinality,
    /// Distance to the root in a forest given as `[child, parent]` pairs.
    Depth { parent_of: Vec<(Value, Value)> },
    /// A component of a pair or tuple.
    Component(usize),
}

impl NamedFn {
    pub fn apply(&self, v: &Value) -> Option<Value> {
        let int = |i: i64| Some(Value::Int(i));
        match self {
            NamedFn::Max => v.as_int_pair().and_then(|(m, n)| int(m.max(n))),
            NamedFn::Min => v.as_int_pair().and_then(|(m, n)| int(m.min(n))),
            NamedFn::Sum => v.as_int_pair().and_then(|(m, n)| int(m + n)),
            NamedFn::AbsDiff => v.as_int_pair().and_then(|(m, n)| int((m - n).abs())),
            NamedFn::Length => match v {
                Value::Interval(iv) => int(iv.len()),
                Value::Seq(s) => int(s.len() as i64),
                Value::Tuple(t) => int(t.len() as i64),
                _ => None,
            },
            NamedFn::IntervalWidth => v.as_interval().and_then(|iv| int((iv.hi() - iv.lo()).abs())),
            NamedFn::MaxIntervalLength => v
                .as_interval_set()
                .and_then(|s| int(s.iter().map(|iv| iv.len()).max().unwrap_or(0))),
            NamedFn::Cardinality => match v {
                Value::IntervalSet(s) => int(s.len() as i64),
                Value::Tuple(t) => int(t.len() as i64),
                _ => None,
            },
            NamedFn::Depth { parent_of } => {
                let parents: BTreeMap<&Value, &Value> = parent_of.iter().map(|(c, p)| (c, p)).collect();
                let mut depth = 0i64;
                let mut cur = v;
                while let Some(p) = parents.get(cur) {
                    depth += 1;
                    if depth as usize > parents.len() {
                        return None;
                    }
                    cur = p;
                }
                int(depth)
            }
            NamedFn::Component(k) => v.component(*k).cloned(),
        }
    }
}

/// Leaf relations of the catalog with their domain parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum NamedRelation {
    #[serde(rename = "SUCCESSOR")]
    Successor { lo: i64, hi: i64 },
    #[serde(rename = "INTGREATER")]
    IntGreater { lo: i64, hi: i64 },
    #[serde(rename = "PREDECESSOR")]
    Predecessor { lo: i64, hi: i64 },
    #[serde(rename = "INTLESSER")]
    IntLesser { lo: i64, hi: i64 },
    #[serde(rename = "INTDIFF")]
    IntDiff { lo: i64, hi: i64 },
    #[serde(rename = "INTSUM")]
    IntSum { lo: i64, hi: i64 },
    #[serde(rename = "MAXINT")]
    MaxInt { lo: i64, hi: i64 },
    #[serde(rename = "MININT")]
    MinInt { lo: i64, hi: i64 },
    #[serde(rename = "SUPINTERVAL")]
    SupInterval { lo: i64, hi: i64 },
    #[serde(rename = "SUBINTERVAL")]
    SubInterval { lo: i64, hi: i64 },
    #[serde(rename = "INTERVAL")]
    Interval { lo: i64, hi: i64 },
    #[serde(rename = "INTERVAL'", alias = "INTERVAL′")]
    IntervalInverse { lo: i64, hi: i64 },
    #[serde(rename = "INTERVALSUPSET")]
    IntervalSupset { lo: i64, hi: i64 },
    #[serde(rename = "INTERVALSUBSET")]
    IntervalSubset { lo: i64, hi: i64 },
    /// With `profile`, interval sets are compared by their descending list of
    /// member lengths (lexicographically) instead of by the longest member only.
    #[serde(rename = "INTERVALMAX")]
    IntervalMax {
        lo: i64,
        hi: i64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        profile: bool,
    },
    #[serde(rename = "SUPSET")]
    Supset { base: Vec<Value> },
    #[serde(rename = "SUBSET")]
    Subset { base: Vec<Value> },
    #[serde(rename = "ACYCLIC")]
    Acyclic { nodes: Vec<Value>, edges: Vec<(Value, Value)> },
    #[serde(rename = "ACYCLIC'", alias = "ACYCLIC′")]
    AcyclicInverse { nodes: Vec<Value>, edges: Vec<(Value, Value)> },
    #[serde(rename = "PARENT")]
    Parent { nodes: Vec<Value>, parent_of: Vec<(Value, Value)> },
    #[serde(rename = "ANCESTOR")]
    Ancestor { nodes: Vec<Value>, parent_of: Vec<(Value, Value)> },
    #[serde(rename = "CHILD")]
    Child { nodes: Vec<Value>, parent_of: Vec<(Value, Value)> },
    #[serde(rename = "DESCENDANT")]
    Descendant { nodes: Vec<Value>, parent_of: Vec<(Value, Value)> },
}

/// A catalog expression: leaves name concrete relations, internal nodes
/// apply constructors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogExpr {
    /// Explicit pairs over the ambient space.
    Extensional { pairs: Vec<(Value, Value)> },
    Named {
        #[serde(flatten)]
        relation: NamedRelation,
    },
    Closure { of: Box<CatalogExpr> },
    Inverse { of: Box<CatalogExpr> },
    Compose { left: Box<CatalogExpr>, right: Box<CatalogExpr> },
    Restrict { to: Vec<Value>, of: Box<CatalogExpr> },
    Subrel { pairs: Vec<(Value, Value)>, of: Box<CatalogExpr> },
    Induced {
        #[serde(rename = "fn")]
        func: NamedFn,
        base: Box<CatalogExpr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        over: Option<SpaceExpr>,
    },
    Projection {
        index: usize,
        base: Box<CatalogExpr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        over: Option<SpaceExpr>,
    },
}

impl CatalogExpr {
    pub fn named(relation: NamedRelation) -> Self {
        CatalogExpr::Named { relation }
    }

    pub fn closure(of: CatalogExpr) -> Self {
        CatalogExpr::Closure { of: Box::new(of) }
    }

    pub fn inverse(of: CatalogExpr) -> Self {
        CatalogExpr::Inverse { of: Box::new(of) }
    }

    pub fn compose(left: CatalogExpr, right: CatalogExpr) -> Self {
        CatalogExpr::Compose { left: Box::new(left), right: Box::new(right) }
    }

    pub fn restrict(to: Vec<Value>, of: CatalogExpr) -> Self {
        CatalogExpr::Restrict { to, of: Box::new(of) }
    }

    pub fn subrel(pairs: Vec<(Value, Value)>, of: CatalogExpr) -> Self {
        CatalogExpr::Subrel { pairs, of: Box::new(of) }
    }

    pub fn induced(func: NamedFn, base: CatalogExpr, over: Option<SpaceExpr>) -> Self {
        CatalogExpr::Induced { func, base: Box::new(base), over }
    }

    pub fn projection(index: usize, base: CatalogExpr, over: Option<SpaceExpr>) -> Self {
        CatalogExpr::Projection { index, base: Box::new(base), over }
    }
}

/// Builds a relation from an expression that needs no ambient space.
pub fn build(expr: &CatalogExpr) -> Result<Relation> {
    build_in(expr, None)
}

/// Builds a relation; extensional leaves and INDUCED/PROJECTION nodes without
/// an explicit `over` use `ambient`.
pub fn build_in(expr: &CatalogExpr, ambient: Option<&Space>) -> Result<Relation> {
    let need_ambient = || {
        ambient
            .cloned()
            .ok_or_else(|| Error::MalformedExpr("no space given for this node".into()))
    };
    let with = |r: Relation, rule: Rule, premises: Vec<Option<&NoetherianCert>>| -> Relation {
        match premises.into_iter().collect::<Option<Vec<_>>>() {
            Some(ps) => r.with_cert(NoetherianCert::new(rule, ps.into_iter().cloned().collect())),
            None => r,
        }
    };
    match expr {
        CatalogExpr::Extensional { pairs } => {
            let r = Relation::from_pairs(&need_ambient()?, pairs.iter().cloned())?;
            Ok(match is_noetherian(&r, DEFAULT_FUEL).status {
                Status::Noetherian => r.with_cert(NoetherianCert::leaf(Rule::Exhaustive)),
                _ => r,
            })
        }
        CatalogExpr::Named { relation } => {
            let r = named_relation(relation)?;
            r.space().values()?;
            Ok(r)
        }
        CatalogExpr::Closure { of } => {
            let base = build_in(of, ambient)?;
            let (plus, _) = base.closures()?;
            Ok(with(plus, Rule::Closure, vec![base.cert()]))
        }
        CatalogExpr::Inverse { of } => {
            let base = build_in(of, ambient)?;
            let inv = base.materialize()?.inverse()?;
            Ok(with(inv, Rule::Inverse, vec![base.cert()]))
        }
        CatalogExpr::Compose { left, right } => {
            let l = build_in(left, ambient)?;
            let r = build_in(right, ambient)?;
            let c = l.compose(&r)?;
            Ok(with(c, Rule::Compose, vec![l.cert(), r.cert()]))
        }
        CatalogExpr::Restrict { to, of } => {
            let base = build_in(of, ambient)?;
            let set: BTreeSet<Value> = to.iter().cloned().collect();
            let r = base.restrict(&set)?;
            Ok(with(r, Rule::Restrict, vec![base.cert()]))
        }
        CatalogExpr::Subrel { pairs, of } => {
            let base = build_in(of, ambient)?;
            for (a, b) in pairs {
                if !base.contains(a, b)? {
                    return Err(Error::MalformedExpr(format!(
                        "subrel pair [{a}, {b}] is not in the base relation"
                    )));
                }
            }
            let r = Relation::from_pairs(base.space(), pairs.iter().cloned())?;
            Ok(with(r, Rule::Subrel, vec![base.cert()]))
        }
        CatalogExpr::Induced { func, base, over } => {
            let over = match over {
                Some(s) => s.to_space()?,
                None => need_ambient()?,
            };
            let base = build_in(base, None)?;
            let func = func.clone();
            let key: KeyFn = Arc::new(move |v| func.apply(v));
            let r = Relation::induced(&over, key, &base);
            Ok(with(r, Rule::Induced, vec![base.cert()]))
        }
        CatalogExpr::Projection { index, base, over } => {
            let over = match over {
                Some(s) => s.to_space()?,
                None => need_ambient()?,
            };
            let base = build_in(base, None)?;
            let k = *index;
            let key: KeyFn = Arc::new(move |v| v.component(k).cloned());
            let r = Relation::induced(&over, key, &base);
            Ok(with(r, Rule::Projection, vec![base.cert()]))
        }
    }
}

fn natural_window(lo: i64) -> Result<()> {
    if lo < 0 {
        return Err(Error::ParameterOutOfRange(format!(
            "relation is defined on natural integers, window starts at {lo}"
        )));
    }
    Ok(())
}

fn int_of(v: &Value) -> i64 {
    v.as_int().expect("integer space")
}

fn pair_of(v: &Value) -> (i64, i64) {
    v.as_int_pair().expect("integer pair space")
}

fn interval_of(v: &Value) -> crate::value::Interval {
    v.as_interval().expect("interval space")
}

fn set_of(v: &Value) -> &BTreeSet<crate::value::Interval> {
    v.as_interval_set().expect("interval-set space")
}

/// Descending list of member lengths.
pub fn length_profile(set: &BTreeSet<crate::value::Interval>) -> Vec<i64> {
    let mut ls: Vec<i64> = set.iter().map(|iv| iv.len()).collect();
    ls.sort_unstable_by(|a, b| b.cmp(a));
    ls
}

fn tuple_set(v: &Value) -> BTreeSet<&Value> {
    match v {
        Value::Tuple(items) => items.iter().collect(),
        _ => BTreeSet::new(),
    }
}

fn forest(nodes: &[Value], parent_of: &[(Value, Value)]) -> Result<(Space, Vec<(Value, Value)>)> {
    let space = Space::explicit(nodes.iter().cloned())?;
    let mut parents: BTreeMap<&Value, &Value> = BTreeMap::new();
    for (c, p) in parent_of {
        if !space.contains(c) || !space.contains(p) {
            return Err(Error::MalformedExpr(format!("[{c}, {p}] mentions an unknown node")));
        }
        if parents.insert(c, p).is_some() {
            return Err(Error::MalformedExpr(format!("node {c} has two parents")));
        }
    }
    for start in parents.keys() {
        let mut cur = *start;
        for _ in 0..=parents.len() {
            match parents.get(cur) {
                Some(p) => cur = p,
                None => break,
            }
        }
        if parents.contains_key(cur) {
            return Err(Error::MalformedExpr(format!("parent links from {start} loop")));
        }
    }
    Ok((space, parent_of.to_vec()))
}

fn acyclic_graph(nodes: &[Value], edges: &[(Value, Value)]) -> Result<Relation> {
    let space = Space::explicit(nodes.iter().cloned())?;
    let r = Relation::from_pairs(&space, edges.iter().cloned())?;
    if !is_noetherian(&r, DEFAULT_FUEL).is_noetherian() {
        return Err(Error::MalformedExpr("graph has a cycle".into()));
    }
    Ok(r)
}

/// A catalog leaf without enumerating its space; [`build`] additionally
/// checks the space against the size cap.
pub fn named_relation(named: &NamedRelation) -> Result<Relation> {
    use NamedRelation as N;
    let ints = |lo: i64, hi: i64| Space::int_range(lo, hi);
    let int_pairs = |lo: i64, hi: i64| Space::pairs(ints(lo, hi), ints(lo, hi));
    let (r, rule) = match named {
        N::Successor { lo, hi } => {
            natural_window(*lo)?;
            (Relation::from_test(&ints(*lo, *hi), |a, b| int_of(a) == int_of(b) + 1), Rule::Successor)
        }
        N::IntGreater { lo, hi } => {
            natural_window(*lo)?;
            (Relation::from_test(&ints(*lo, *hi), |a, b| int_of(a) > int_of(b)), Rule::IntGreater)
        }
        N::Predecessor { lo, hi } => (
            Relation::from_test(&ints(*lo, *hi), |a, b| int_of(a) == int_of(b) - 1),
            Rule::Predecessor,
        ),
        N::IntLesser { lo, hi } => (
            Relation::from_test(&ints(*lo, *hi), |a, b| int_of(a) < int_of(b)),
            Rule::IntLesser,
        ),
        N::IntDiff { lo, hi } => (
            Relation::from_test(&int_pairs(*lo, *hi), |a, b| {
                let ((m, n), (m2, n2)) = (pair_of(a), pair_of(b));
                (m - n).abs() > (m2 - n2).abs()
            }),
            Rule::IntDiff,
        ),
        N::IntSum { lo, hi } => {
            natural_window(*lo)?;
            (
                Relation::from_test(&int_pairs(*lo, *hi), |a, b| {
                    let ((m, n), (m2, n2)) = (pair_of(a), pair_of(b));
                    m + n > m2 + n2
                }),
                Rule::IntSum,
            )
        }
        N::MaxInt { lo, hi } => {
            natural_window(*lo)?;
            (
                Relation::from_test(&int_pairs(*lo, *hi), |a, b| {
                    let ((m, n), (m2, n2)) = (pair_of(a), pair_of(b));
                    m.max(n) > m2.max(n2)
                }),
                Rule::MaxInt,
            )
        }
        N::MinInt { lo, hi } => {
            natural_window(*lo)?;
            (
                Relation::from_test(&int_pairs(*lo, *hi), |a, b| {
                    let ((m, n), (m2, n2)) = (pair_of(a), pair_of(b));
                    m.min(n) > m2.min(n2)
                }),
                Rule::MinInt,
            )
        }
        N::SupInterval { lo, hi } => (
            Relation::from_test(&Space::intervals_of(*lo, *hi), |a, b| {
                interval_of(a).strictly_contains(&interval_of(b))
            }),
            Rule::SupInterval,
        ),
        N::SubInterval { lo, hi } => (
            Relation::from_test(&Space::intervals_of(*lo, *hi), |a, b| {
                interval_of(b).strictly_contains(&interval_of(a))
            }),
            Rule::SubInterval,
        ),
        N::Interval { lo, hi } => (
            Relation::from_test(&Space::intervals_of(*lo, *hi), |a, b| {
                interval_of(a).len() > interval_of(b).len()
            }),
            Rule::Interval,
        ),
        N::IntervalInverse { lo, hi } => {
            let base = named_relation(&N::Interval { lo: *lo, hi: *hi })?;
            let inv = base.materialize()?.inverse()?;
            return Ok(inv.with_cert(NoetherianCert::new(
                Rule::IntervalInverse,
                vec![base.cert().expect("leaf certified").clone()],
            )));
        }
        N::IntervalSupset { lo, hi } => (
            Relation::from_test(&Space::interval_sets_of(*lo, *hi), |a, b| {
                let (x, y) = (set_of(a), set_of(b));
                x.len() > y.len() && y.is_subset(x)
            }),
            Rule::IntervalSupset,
        ),
        N::IntervalSubset { lo, hi } => (
            Relation::from_test(&Space::interval_sets_of(*lo, *hi), |a, b| {
                let (x, y) = (set_of(a), set_of(b));
                x.len() < y.len() && x.is_subset(y)
            }),
            Rule::IntervalSubset,
        ),
        N::IntervalMax { lo, hi, profile } => {
            let space = Space::interval_sets_of(*lo, *hi);
            let r = if *profile {
                Relation::from_test(&space, |a, b| length_profile(set_of(a)) > length_profile(set_of(b)))
            } else {
                let longest = |v: &Value| set_of(v).iter().map(|iv| iv.len()).max().unwrap_or(0);
                Relation::from_test(&space, move |a, b| longest(a) > longest(b))
            };
            (r, Rule::IntervalMax)
        }
        N::Supset { base } => {
            check_powerset_base(base.len())?;
            (
                Relation::from_test(&Space::powerset(base.iter().cloned()), |a, b| {
                    let (x, y) = (tuple_set(a), tuple_set(b));
                    x.len() > y.len() && y.is_subset(&x)
                }),
                Rule::Supset,
            )
        }
        N::Subset { base } => {
            check_powerset_base(base.len())?;
            (
                Relation::from_test(&Space::powerset(base.iter().cloned()), |a, b| {
                    let (x, y) = (tuple_set(a), tuple_set(b));
                    x.len() < y.len() && x.is_subset(&y)
                }),
                Rule::Subset,
            )
        }
        N::Acyclic { nodes, edges } => (acyclic_graph(nodes, edges)?, Rule::Acyclic),
        N::AcyclicInverse { nodes, edges } => {
            let flipped: Vec<_> = edges.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
            (acyclic_graph(nodes, &flipped)?, Rule::AcyclicInverse)
        }
        N::Parent { nodes, parent_of } => {
            let (space, links) = forest(nodes, parent_of)?;
            (Relation::from_pairs(&space, links.into_iter().map(|(c, p)| (p, c)))?, Rule::Parent)
        }
        N::Child { nodes, parent_of } => {
            let (space, links) = forest(nodes, parent_of)?;
            (Relation::from_pairs(&space, links)?, Rule::Child)
        }
        N::Ancestor { nodes, parent_of } => {
            let parent = named_relation(&N::Parent { nodes: nodes.clone(), parent_of: parent_of.clone() })?;
            let (plus, _) = parent.closures()?;
            (plus, Rule::Ancestor)
        }
        N::Descendant { nodes, parent_of } => {
            let child = named_relation(&N::Child { nodes: nodes.clone(), parent_of: parent_of.clone() })?;
            let (plus, _) = child.closures()?;
            (plus, Rule::Descendant)
        }
    };
    Ok(r.with_cert(NoetherianCert::leaf(rule)))
}

/// Outcome of [`certify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub verdict: NoetherianVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cert: Option<NoetherianCert>,
    /// A claimed certificate was refuted by the exhaustive check.
    pub discrepancy: bool,
}

/// Trusts sound certificates; checks everything else.
pub fn certify(r: &Relation) -> Certification {
    certify_with_fuel(r, DEFAULT_FUEL)
}

pub fn certify_with_fuel(r: &Relation, fuel: usize) -> Certification {
    let cert = r.cert().cloned();
    if let Some(c) = &cert {
        if c.trust == Trust::Sound {
            return Certification {
                verdict: NoetherianVerdict { status: Status::Noetherian, method: Method::Certificate, witness: None },
                cert,
                discrepancy: false,
            };
        }
    }
    let verdict = is_noetherian(r, fuel);
    let discrepancy = cert.is_some() && verdict.status == Status::NotNoetherian;
    Certification { verdict, cert, discrepancy }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(r: NamedRelation) -> CatalogExpr {
        CatalogExpr::named(r)
    }

    #[test]
    fn closure_of_successor_is_intgreater() {
        let succ = named(NamedRelation::Successor { lo: 0, hi: 5 });
        let gt = build(&named(NamedRelation::IntGreater { lo: 0, hi: 5 })).unwrap();
        let closed = build(&CatalogExpr::closure(succ)).unwrap();
        assert_eq!(closed, gt.materialize().unwrap());
        assert_eq!(closed.cert().unwrap().rule, Rule::Closure);
    }

    #[test]
    fn inverse_of_intgreater_is_intlesser() {
        let inv = build(&CatalogExpr::inverse(named(NamedRelation::IntGreater { lo: 0, hi: 5 }))).unwrap();
        let lt = build(&named(NamedRelation::IntLesser { lo: 0, hi: 5 })).unwrap();
        assert_eq!(inv, lt.materialize().unwrap());
    }

    #[test]
    fn subrel_is_certified_sound() {
        let e = CatalogExpr::subrel(
            vec![(Value::Int(3), Value::Int(1))],
            named(NamedRelation::IntGreater { lo: 0, hi: 5 }),
        );
        let c = certify(&build(&e).unwrap());
        assert_eq!((c.verdict.status, c.verdict.method), (Status::Noetherian, Method::Certificate));
        let bad = CatalogExpr::subrel(
            vec![(Value::Int(1), Value::Int(3))],
            named(NamedRelation::IntGreater { lo: 0, hi: 5 }),
        );
        assert!(matches!(build(&bad), Err(Error::MalformedExpr(_))));
    }

    #[test]
    fn claimed_compose_is_rechecked() {
        let nodes = vec![Value::node("a"), Value::node("b")];
        let ab = named(NamedRelation::Acyclic {
            nodes: nodes.clone(),
            edges: vec![(Value::node("a"), Value::node("b"))],
        });
        let ba = named(NamedRelation::Acyclic {
            nodes,
            edges: vec![(Value::node("b"), Value::node("a"))],
        });
        let r = build(&CatalogExpr::compose(ab, ba)).unwrap();
        assert_eq!(r.cert().unwrap().trust, Trust::Claimed);
        let c = certify(&r);
        assert_eq!(c.verdict.status, Status::NotNoetherian);
        assert!(c.discrepancy);
    }

    #[test]
    fn plain_acyclic_relation_is_checked_exhaustively() {
        let sp = Space::int_range(0, 3);
        let r = Relation::from_pairs(&sp, [(Value::Int(3), Value::Int(0))]).unwrap();
        let c = certify(&r);
        assert_eq!((c.verdict.status, c.verdict.method), (Status::Noetherian, Method::Exhaustive));
    }

    #[test]
    fn maxint_agrees_with_induced_max() {
        let over = SpaceExpr::Product {
            of: vec![SpaceExpr::IntRange { lo: 0, hi: 9 }, SpaceExpr::IntRange { lo: 0, hi: 9 }],
        };
        let induced = build(&CatalogExpr::induced(
            NamedFn::Max,
            named(NamedRelation::IntGreater { lo: 0, hi: 9 }),
            Some(over),
        ))
        .unwrap();
        let direct = build(&named(NamedRelation::MaxInt { lo: 0, hi: 9 })).unwrap();
        assert_eq!(induced.materialize().unwrap(), direct.materialize().unwrap());
    }

    #[test]
    fn parameters_are_validated() {
        assert!(matches!(
            build(&named(NamedRelation::IntGreater { lo: -1, hi: 3 })),
            Err(Error::ParameterOutOfRange(_))
        ));
        let big = (0..11).map(Value::Int).collect();
        assert!(matches!(
            build(&named(NamedRelation::Supset { base: big })),
            Err(Error::ParameterOutOfRange(_))
        ));
        let cyclic = NamedRelation::Child {
            nodes: vec![Value::node("a"), Value::node("b")],
            parent_of: vec![(Value::node("a"), Value::node("b")), (Value::node("b"), Value::node("a"))],
        };
        assert!(build(&named(cyclic)).is_err());
    }

    #[test]
    fn expression_json_round_trip() {
        let e = CatalogExpr::projection(
            1,
            CatalogExpr::closure(named(NamedRelation::IntervalMax { lo: 1, hi: 3, profile: true })),
            None,
        );
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"projection","index":1,"base":{"kind":"closure","of":{"kind":"named","name":"INTERVALMAX","lo":1,"hi":3,"profile":true}}}"#
        );
        assert_eq!(serde_json::from_str::<CatalogExpr>(&s).unwrap(), e);
        let primed: CatalogExpr =
            serde_json::from_str(r#"{"kind":"named","name":"INTERVAL′","lo":1,"hi":2}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&primed).unwrap(),
            r#"{"kind":"named","name":"INTERVAL'","lo":1,"hi":2}"#
        );
    }
}
