//! Finite, enumerable state spaces.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::value::{Interval, Value};

/// Default cap on the number of elements any space may enumerate.
pub const DEFAULT_MAX_SPACE: usize = 100_000;

static MAX_SPACE: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_SPACE);

/// Sets the process-wide enumeration cap.
pub fn set_max_space(limit: usize) {
    MAX_SPACE.store(limit, Ordering::Relaxed);
}

pub fn max_space() -> usize {
    MAX_SPACE.load(Ordering::Relaxed)
}

type MemberFn = Arc<dyn Fn(&Value) -> bool + Send + Sync>;

/// How a space was described.
#[derive(Clone)]
pub enum SpaceKind {
    IntRange { lo: i64, hi: i64 },
    Explicit,
    /// Two factors produce `Pair` values, three or more produce `Tuple` values.
    Product(Vec<Space>),
    /// All subintervals of `lo..hi`, including the empty interval at every
    /// position `lo..=hi+1`.
    IntervalsOf { lo: i64, hi: i64 },
    /// All finite sets of non-empty subintervals of `lo..hi`.
    IntervalSetsOf { lo: i64, hi: i64 },
    /// All subsets of a base set, each represented as a sorted `Tuple`.
    Powerset(Vec<Value>),
    Filtered { base: Space, predicate: String },
    /// All integers. Not enumerable; exploration starts from the anchors.
    Integers { anchors: Vec<i64> },
}

struct Inner {
    kind: SpaceKind,
    member: Option<MemberFn>,
    values: OnceLock<Vec<Value>>,
    index: OnceLock<HashMap<Value, u32>>,
}

/// A set of [`Value`]s with a stable canonical enumeration.
#[derive(Clone)]
pub struct Space(Arc<Inner>);

impl Space {
    fn from_kind(kind: SpaceKind, member: Option<MemberFn>) -> Self {
        Space(Arc::new(Inner {
            kind,
            member,
            values: OnceLock::new(),
            index: OnceLock::new(),
        }))
    }

    pub fn int_range(lo: i64, hi: i64) -> Self {
        Space::from_kind(SpaceKind::IntRange { lo, hi }, None)
    }

    /// A space holding exactly the given values (duplicates are dropped).
    pub fn explicit(values: impl IntoIterator<Item = Value>) -> Result<Self> {
        let set: BTreeSet<Value> = values.into_iter().collect();
        check_size(set.len())?;
        let space = Space::from_kind(SpaceKind::Explicit, None);
        let _ = space.0.values.set(set.into_iter().collect());
        Ok(space)
    }

    pub fn product(factors: Vec<Space>) -> Self {
        Space::from_kind(SpaceKind::Product(factors), None)
    }

    pub fn pairs(a: Space, b: Space) -> Self {
        Space::product(vec![a, b])
    }

    pub fn intervals_of(lo: i64, hi: i64) -> Self {
        Space::from_kind(SpaceKind::IntervalsOf { lo, hi }, None)
    }

    pub fn interval_sets_of(lo: i64, hi: i64) -> Self {
        Space::from_kind(SpaceKind::IntervalSetsOf { lo, hi }, None)
    }

    pub fn powerset(base: impl IntoIterator<Item = Value>) -> Self {
        let base: BTreeSet<Value> = base.into_iter().collect();
        Space::from_kind(SpaceKind::Powerset(base.into_iter().collect()), None)
    }

    /// The elements of `base` satisfying `predicate`; `id` names the predicate.
    pub fn filtered(
        base: Space,
        id: impl Into<String>,
        predicate: impl Fn(&Value) -> bool + Send + Sync + 'static,
    ) -> Self {
        Space::from_kind(
            SpaceKind::Filtered { base, predicate: id.into() },
            Some(Arc::new(predicate)),
        )
    }

    /// All integers, explored from `0`.
    pub fn integers() -> Self {
        Space::integers_from(vec![0])
    }

    pub fn integers_from(anchors: Vec<i64>) -> Self {
        Space::from_kind(SpaceKind::Integers { anchors }, None)
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.0.kind
    }

    pub fn is_finite(&self) -> bool {
        match &self.0.kind {
            SpaceKind::Integers { .. } => false,
            SpaceKind::Product(fs) => fs.iter().all(Space::is_finite),
            SpaceKind::Filtered { base, .. } => base.is_finite(),
            _ => true,
        }
    }

    /// Number of elements the enumeration would produce, saturating.
    fn predicted_size(&self) -> Option<usize> {
        let pow2 = |k: i64| -> usize {
            if k >= 63 {
                usize::MAX
            } else {
                1usize << k.max(0)
            }
        };
        Some(match &self.0.kind {
            SpaceKind::IntRange { lo, hi } => (hi - lo + 1).max(0) as usize,
            SpaceKind::Explicit => self.0.values.get().map_or(0, Vec::len),
            SpaceKind::Product(fs) => {
                let mut n = 1usize;
                for f in fs {
                    n = n.saturating_mul(f.predicted_size()?);
                }
                n
            }
            SpaceKind::IntervalsOf { lo, hi } => {
                let k = (hi - lo + 1).max(0);
                (k * (k + 1) / 2 + k + 1) as usize
            }
            SpaceKind::IntervalSetsOf { lo, hi } => {
                let k = (hi - lo + 1).max(0);
                pow2(k * (k + 1) / 2)
            }
            SpaceKind::Powerset(base) => pow2(base.len() as i64),
            SpaceKind::Filtered { base, .. } => base.predicted_size()?,
            SpaceKind::Integers { .. } => return None,
        })
    }

    /// The canonical enumeration.
    pub fn values(&self) -> Result<&[Value]> {
        if let Some(vs) = self.0.values.get() {
            return Ok(vs);
        }
        let predicted = self.predicted_size().ok_or(Error::Unbounded)?;
        check_size(predicted)?;
        let mut vs = self.enumerate()?;
        vs.sort();
        vs.dedup();
        Ok(self.0.values.get_or_init(|| vs))
    }

    pub fn len(&self) -> Result<usize> {
        self.values().map(<[Value]>::len)
    }

    pub fn is_empty(&self) -> Result<bool> {
        self.len().map(|n| n == 0)
    }

    fn enumerate(&self) -> Result<Vec<Value>> {
        Ok(match &self.0.kind {
            SpaceKind::IntRange { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
            SpaceKind::Explicit => unreachable!("explicit spaces are enumerated on construction"),
            SpaceKind::Product(fs) => {
                let mut rows: Vec<Vec<Value>> = vec![Vec::new()];
                for f in fs {
                    let vs = f.values()?;
                    rows = rows
                        .into_iter()
                        .flat_map(|row| {
                            vs.iter().map(move |v| {
                                let mut r = row.clone();
                                r.push(v.clone());
                                r
                            })
                        })
                        .collect();
                }
                rows.into_iter().map(|row| pack_product(fs.len(), row)).collect()
            }
            SpaceKind::IntervalsOf { lo, hi } => intervals_within(*lo, *hi)
                .into_iter()
                .map(Value::Interval)
                .collect(),
            SpaceKind::IntervalSetsOf { lo, hi } => {
                let members: Vec<Interval> = intervals_within(*lo, *hi)
                    .into_iter()
                    .filter(|iv| !iv.is_empty())
                    .collect();
                subsets(&members)
                    .into_iter()
                    .map(|s| Value::IntervalSet(s.into_iter().collect()))
                    .collect()
            }
            SpaceKind::Powerset(base) => subsets(base).into_iter().map(Value::Tuple).collect(),
            SpaceKind::Filtered { base, .. } => {
                let keep = self.0.member.as_ref().expect("filtered space has a predicate");
                base.values()?.iter().filter(|v| keep(v)).cloned().collect()
            }
            SpaceKind::Integers { .. } => return Err(Error::Unbounded),
        })
    }

    /// Membership test; agrees exactly with the enumeration.
    pub fn contains(&self, v: &Value) -> bool {
        match &self.0.kind {
            SpaceKind::IntRange { lo, hi } => matches!(v, Value::Int(i) if lo <= i && i <= hi),
            SpaceKind::Explicit => self.index_map().is_some_and(|m| m.contains_key(v)),
            SpaceKind::Product(fs) => match (fs.len(), v) {
                (2, Value::Pair(a, b)) => fs[0].contains(a) && fs[1].contains(b),
                (n, Value::Tuple(items)) if n != 2 && items.len() == n => {
                    fs.iter().zip(items).all(|(f, x)| f.contains(x))
                }
                _ => false,
            },
            SpaceKind::IntervalsOf { lo, hi } => match v {
                Value::Interval(iv) => iv.lo() >= *lo && iv.hi() <= *hi,
                _ => false,
            },
            SpaceKind::IntervalSetsOf { lo, hi } => match v {
                Value::IntervalSet(s) => s
                    .iter()
                    .all(|iv| !iv.is_empty() && iv.lo() >= *lo && iv.hi() <= *hi),
                _ => false,
            },
            SpaceKind::Powerset(base) => match v {
                Value::Tuple(items) => {
                    items.windows(2).all(|w| w[0] < w[1])
                        && items.iter().all(|x| base.binary_search(x).is_ok())
                }
                _ => false,
            },
            SpaceKind::Filtered { base, .. } => {
                base.contains(v) && self.0.member.as_ref().is_some_and(|p| p(v))
            }
            SpaceKind::Integers { .. } => matches!(v, Value::Int(_)),
        }
    }

    fn index_map(&self) -> Option<&HashMap<Value, u32>> {
        if let Some(m) = self.0.index.get() {
            return Some(m);
        }
        let vs = self.values().ok()?;
        Some(self.0.index.get_or_init(|| {
            vs.iter()
                .enumerate()
                .map(|(k, v)| (v.clone(), k as u32))
                .collect()
        }))
    }

    /// Position of `v` in the canonical enumeration.
    pub fn index_of(&self, v: &Value) -> Option<usize> {
        match &self.0.kind {
            SpaceKind::IntRange { lo, hi } => match v {
                Value::Int(i) if lo <= i && i <= hi => Some((i - lo) as usize),
                _ => None,
            },
            _ => self.index_map()?.get(v).map(|&k| k as usize),
        }
    }

    /// Starting points for exploring relations over this space: every element
    /// when finite, the declared anchors otherwise.
    pub fn roots(&self) -> Result<Vec<Value>> {
        match &self.0.kind {
            SpaceKind::Integers { anchors } => Ok(anchors.iter().copied().map(Value::Int).collect()),
            _ => Ok(self.values()?.to_vec()),
        }
    }

    pub fn ptr_eq(&self, other: &Space) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Every element of `self` belongs to `other`.
    pub fn is_subspace_of(&self, other: &Space) -> Result<bool> {
        if self.ptr_eq(other) {
            return Ok(true);
        }
        Ok(self.values()?.iter().all(|v| other.contains(v)))
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Space) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        match (&self.0.kind, &other.0.kind) {
            (SpaceKind::IntRange { lo: a, hi: b }, SpaceKind::IntRange { lo: c, hi: d })
            | (SpaceKind::IntervalsOf { lo: a, hi: b }, SpaceKind::IntervalsOf { lo: c, hi: d })
            | (
                SpaceKind::IntervalSetsOf { lo: a, hi: b },
                SpaceKind::IntervalSetsOf { lo: c, hi: d },
            ) if (a, b) == (c, d) => return true,
            (SpaceKind::Integers { .. }, SpaceKind::Integers { .. }) => return true,
            (SpaceKind::Integers { .. }, _) | (_, SpaceKind::Integers { .. }) => return false,
            _ => {}
        }
        match (self.values(), other.values()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            SpaceKind::IntRange { lo, hi } => write!(f, "int_range({lo}, {hi})"),
            SpaceKind::Explicit => write!(f, "explicit({} values)", self.0.values.get().map_or(0, Vec::len)),
            SpaceKind::Product(fs) => f.debug_tuple("product").field(fs).finish(),
            SpaceKind::IntervalsOf { lo, hi } => write!(f, "intervals_of({lo}, {hi})"),
            SpaceKind::IntervalSetsOf { lo, hi } => write!(f, "interval_sets_of({lo}, {hi})"),
            SpaceKind::Powerset(base) => write!(f, "powerset({} values)", base.len()),
            SpaceKind::Filtered { base, predicate } => write!(f, "filtered({base:?}, {predicate})"),
            SpaceKind::Integers { .. } => f.write_str("integers"),
        }
    }
}

fn check_size(size: usize) -> Result<()> {
    let limit = max_space();
    if size > limit {
        return Err(Error::SpaceTooLarge { size, limit });
    }
    Ok(())
}

pub(crate) fn pack_product(arity: usize, mut row: Vec<Value>) -> Value {
    if arity == 2 {
        let b = row.pop().expect("two components");
        let a = row.pop().expect("two components");
        Value::pair(a, b)
    } else {
        Value::Tuple(row)
    }
}

/// Every subinterval of `lo..hi`, empty ones included at each position.
pub fn intervals_within(lo: i64, hi: i64) -> Vec<Interval> {
    let mut out = Vec::new();
    for a in lo..=hi.saturating_add(1) {
        for b in (a - 1)..=hi {
            out.push(Interval::new(a, b).expect("a <= b + 1 by construction"));
        }
    }
    out
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(1 << items.len().min(20));
    for mask in 0u64..(1u64 << items.len()) {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agrees(space: &Space) {
        let vs = space.values().unwrap();
        let mut sorted = vs.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, vs, "enumeration is sorted and duplicate-free");
        for (k, v) in vs.iter().enumerate() {
            assert!(space.contains(v), "{v} enumerated but not a member");
            assert_eq!(space.index_of(v), Some(k));
        }
    }

    #[test]
    fn enumerations_agree_with_membership() {
        agrees(&Space::int_range(-2, 3));
        agrees(&Space::pairs(Space::int_range(0, 2), Space::int_range(1, 3)));
        agrees(&Space::product(vec![Space::int_range(0, 1); 3]));
        agrees(&Space::intervals_of(1, 4));
        agrees(&Space::interval_sets_of(1, 3));
        agrees(&Space::powerset([Value::int(1), Value::int(5), Value::node("a")]));
        agrees(&Space::filtered(Space::int_range(0, 9), "even", |v| v.as_int().unwrap() % 2 == 0));
        agrees(&Space::explicit([Value::int(3), Value::int(1), Value::int(3)]).unwrap());
    }

    #[test]
    fn sizes() {
        assert_eq!(Space::intervals_of(1, 3).len().unwrap(), 6 + 4);
        assert_eq!(Space::intervals_of(1, 0).len().unwrap(), 1);
        assert_eq!(Space::interval_sets_of(1, 3).len().unwrap(), 64);
        assert_eq!(Space::powerset((0..4).map(Value::int)).len().unwrap(), 16);
    }

    #[test]
    fn non_members_rejected() {
        let s = Space::intervals_of(1, 3);
        assert!(!s.contains(&Value::interval(0, 2).unwrap()));
        assert!(s.contains(&Value::interval(4, 3).unwrap()));
        assert!(!s.contains(&Value::interval(5, 4).unwrap()));
        assert!(!Space::int_range(0, 3).contains(&Value::int_pair(0, 0)));
    }

    #[test]
    fn too_large_is_an_error() {
        let s = Space::interval_sets_of(1, 8);
        assert!(matches!(s.values(), Err(Error::SpaceTooLarge { .. })));
        assert!(matches!(Space::integers().values(), Err(Error::Unbounded)));
    }

    #[test]
    fn equality() {
        assert_eq!(Space::int_range(0, 3), Space::int_range(0, 3));
        assert_eq!(Space::int_range(0, 2), Space::explicit((0..3).map(Value::int)).unwrap());
        assert_ne!(Space::int_range(0, 3), Space::int_range(0, 4));
    }
}
