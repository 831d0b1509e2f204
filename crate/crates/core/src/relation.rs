//! Finite relation algebra.
//!
//! A [`Relation`] relates elements of a source space to elements of a target
//! space; most operators require the two to coincide. Relations are either
//! extensional (an explicit pair set) or intensional (an image function, a
//! membership test, or a relation induced through a key function). Intensional
//! relations are materialized to pair sets on demand; every equality check
//! happens on the extensional form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::catalog::NoetherianCert;
use crate::error::{Error, Result};
use crate::space::Space;
use crate::value::Value;

/// Successor lists indexed by source position; each list is sorted target positions.
pub(crate) type Adj = Vec<Vec<u32>>;

pub type ImageFn = Arc<dyn Fn(&Value) -> Vec<Value> + Send + Sync>;
pub type TestFn = Arc<dyn Fn(&Value, &Value) -> bool + Send + Sync>;
pub type KeyFn = Arc<dyn Fn(&Value) -> Option<Value> + Send + Sync>;
type DomainFn = Arc<dyn Fn(&Value) -> bool + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Pairs(Arc<Adj>),
    Image { image: ImageFn, domain: Option<DomainFn> },
    Test(TestFn),
    /// `[a, b]` holds iff `base` relates `key(a)` to `key(b)`.
    Induced { key: KeyFn, base: Relation },
}

struct Inner {
    source: Space,
    target: Space,
    repr: Repr,
    cert: Option<NoetherianCert>,
    adj: OnceLock<Arc<Adj>>,
    target_keys: OnceLock<Vec<Value>>,
}

/// A relation between two spaces, optionally carrying a Noetherian certificate.
#[derive(Clone)]
pub struct Relation(Arc<Inner>);

/// Structural flags of a homogeneous relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub acyclic: bool,
    pub irreflexive: bool,
    pub transitive: bool,
    pub asymmetric: bool,
    pub order: bool,
    pub function: bool,
}

impl Relation {
    fn build(source: Space, target: Space, repr: Repr) -> Self {
        Relation(Arc::new(Inner {
            source,
            target,
            repr,
            cert: None,
            adj: OnceLock::new(),
            target_keys: OnceLock::new(),
        }))
    }

    fn from_adj(source: Space, target: Space, adj: Adj) -> Self {
        Relation::build(source, target, Repr::Pairs(Arc::new(adj)))
    }

    /// An extensional relation on `space`.
    pub fn from_pairs(space: &Space, pairs: impl IntoIterator<Item = (Value, Value)>) -> Result<Self> {
        Relation::from_pairs_between(space, space, pairs)
    }

    pub fn from_pairs_between(
        source: &Space,
        target: &Space,
        pairs: impl IntoIterator<Item = (Value, Value)>,
    ) -> Result<Self> {
        let mut adj: Adj = vec![Vec::new(); source.len()?];
        target.len()?;
        for (a, b) in pairs {
            let i = source.index_of(&a).ok_or(Error::ValueOutsideSpace(a))?;
            let j = target.index_of(&b).ok_or(Error::ValueOutsideSpace(b))?;
            adj[i].push(j as u32);
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Relation::from_adj(source.clone(), target.clone(), adj))
    }

    /// An intensional relation on `space` given by a finite image function.
    pub fn from_image(
        space: &Space,
        image: impl Fn(&Value) -> Vec<Value> + Send + Sync + 'static,
    ) -> Self {
        Relation::from_image_between(space, space, image)
    }

    pub fn from_image_between(
        source: &Space,
        target: &Space,
        image: impl Fn(&Value) -> Vec<Value> + Send + Sync + 'static,
    ) -> Self {
        Relation::build(
            source.clone(),
            target.clone(),
            Repr::Image { image: Arc::new(image), domain: None },
        )
    }

    /// Attaches a domain predicate to an image-function relation. The hint must
    /// agree with "the image is non-empty".
    pub fn with_domain_hint(&self, hint: impl Fn(&Value) -> bool + Send + Sync + 'static) -> Self {
        match &self.0.repr {
            Repr::Image { image, .. } => {
                let mut r = Relation::build(
                    self.source().clone(),
                    self.target().clone(),
                    Repr::Image { image: image.clone(), domain: Some(Arc::new(hint)) },
                );
                Arc::get_mut(&mut r.0).expect("fresh").cert = self.0.cert.clone();
                r
            }
            _ => self.clone(),
        }
    }

    /// An intensional relation on `space` given by a membership test.
    pub fn from_test(space: &Space, test: impl Fn(&Value, &Value) -> bool + Send + Sync + 'static) -> Self {
        Relation::build(space.clone(), space.clone(), Repr::Test(Arc::new(test)))
    }

    /// The relation on `over` relating `a` to `b` iff `base` relates `key(a)` to
    /// `key(b)`. Elements whose key is undefined or outside `base` are unrelated.
    pub fn induced(over: &Space, key: KeyFn, base: &Relation) -> Self {
        Relation::build(
            over.clone(),
            over.clone(),
            Repr::Induced { key, base: base.clone() },
        )
    }

    pub fn empty(space: &Space) -> Result<Self> {
        Ok(Relation::from_adj(space.clone(), space.clone(), vec![Vec::new(); space.len()?]))
    }

    /// `Id[X]`.
    pub fn identity(space: &Space) -> Result<Self> {
        let adj = (0..space.len()? as u32).map(|i| vec![i]).collect();
        Ok(Relation::from_adj(space.clone(), space.clone(), adj))
    }

    /// The identity restricted to a subset of `space`.
    pub fn identity_on(space: &Space, subset: &BTreeSet<Value>) -> Result<Self> {
        Relation::from_pairs(space, subset.iter().map(|v| (v.clone(), v.clone())))
    }

    pub fn with_cert(&self, cert: NoetherianCert) -> Self {
        Relation(Arc::new(Inner {
            source: self.0.source.clone(),
            target: self.0.target.clone(),
            repr: self.0.repr.clone(),
            cert: Some(cert),
            adj: self.0.adj.clone(),
            target_keys: self.0.target_keys.clone(),
        }))
    }

    pub fn source(&self) -> &Space {
        &self.0.source
    }

    pub fn target(&self) -> &Space {
        &self.0.target
    }

    /// The space of a homogeneous relation.
    pub fn space(&self) -> &Space {
        &self.0.source
    }

    pub fn cert(&self) -> Option<&NoetherianCert> {
        self.0.cert.as_ref()
    }

    pub fn is_extensional(&self) -> bool {
        matches!(self.0.repr, Repr::Pairs(_))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.source() == self.target()
    }

    fn require_homogeneous(&self) -> Result<()> {
        if self.is_homogeneous() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Membership of `[a, b]` without erroring on foreign values.
    pub(crate) fn holds(&self, a: &Value, b: &Value) -> bool {
        if !self.source().contains(a) || !self.target().contains(b) {
            return false;
        }
        match &self.0.repr {
            Repr::Pairs(adj) => match (self.source().index_of(a), self.target().index_of(b)) {
                (Some(i), Some(j)) => adj[i].binary_search(&(j as u32)).is_ok(),
                _ => false,
            },
            Repr::Image { image, .. } => image(a).contains(b),
            Repr::Test(test) => test(a, b),
            Repr::Induced { key, base } => match (key(a), key(b)) {
                (Some(ka), Some(kb)) => base.holds(&ka, &kb),
                _ => false,
            },
        }
    }

    /// Whether `[a, b]` belongs to the relation.
    pub fn contains(&self, a: &Value, b: &Value) -> Result<bool> {
        if !self.source().contains(a) {
            return Err(Error::ValueOutsideSpace(a.clone()));
        }
        Ok(self.holds(a, b))
    }

    fn check_image(&self, a: &Value, out: &[Value]) -> Result<()> {
        match out.iter().find(|b| !self.target().contains(b)) {
            Some(_) => Err(Error::ImageEscapesSpace(a.clone())),
            None => Ok(()),
        }
    }

    /// `r(a)`: every `a'` with `[a, a']` in the relation.
    pub fn image(&self, a: &Value) -> Result<BTreeSet<Value>> {
        if !self.source().contains(a) {
            return Err(Error::ValueOutsideSpace(a.clone()));
        }
        match &self.0.repr {
            Repr::Image { image, .. } => {
                let out = image(a);
                self.check_image(a, &out)?;
                Ok(out.into_iter().collect())
            }
            _ => {
                let cached = match &self.0.repr {
                    Repr::Pairs(adj) => Some(adj),
                    _ => self.0.adj.get(),
                };
                if let Some(adj) = cached {
                    let i = self.source().index_of(a).expect("member");
                    let tv = self.target().values()?;
                    return Ok(adj[i].iter().map(|&j| tv[j as usize].clone()).collect());
                }
                let tv = self.target().values()?;
                Ok(tv.iter().filter(|b| self.holds(a, b)).cloned().collect())
            }
        }
    }

    /// Whether `a` has at least one successor.
    pub fn in_domain(&self, a: &Value) -> Result<bool> {
        if !self.source().contains(a) {
            return Err(Error::ValueOutsideSpace(a.clone()));
        }
        if let Some(adj) = self.0.adj.get() {
            let i = self.source().index_of(a).expect("member");
            return Ok(!adj[i].is_empty());
        }
        match &self.0.repr {
            Repr::Pairs(adj) => Ok(!adj[self.source().index_of(a).expect("member")].is_empty()),
            Repr::Image { image, domain } => match domain {
                Some(hint) => Ok(hint(a)),
                None => Ok(!image(a).is_empty()),
            },
            Repr::Test(test) => Ok(self.target().values()?.iter().any(|b| test(a, b))),
            Repr::Induced { key, base } => {
                let Some(ka) = key(a) else { return Ok(false) };
                Ok(self.target_keys()?.iter().any(|kb| base.holds(&ka, kb)))
            }
        }
    }

    fn target_keys(&self) -> Result<&[Value]> {
        if let Some(ks) = self.0.target_keys.get() {
            return Ok(ks);
        }
        let Repr::Induced { key, .. } = &self.0.repr else {
            return Ok(&[]);
        };
        let ks: BTreeSet<Value> = self.target().values()?.iter().filter_map(|v| key(v)).collect();
        Ok(self.0.target_keys.get_or_init(|| ks.into_iter().collect()))
    }

    /// The extensional successor lists, computed once.
    pub(crate) fn adjacency(&self) -> Result<Arc<Adj>> {
        if let Repr::Pairs(adj) = &self.0.repr {
            return Ok(adj.clone());
        }
        if let Some(adj) = self.0.adj.get() {
            return Ok(adj.clone());
        }
        let adj = Arc::new(self.compute_adjacency()?);
        Ok(self.0.adj.get_or_init(|| adj).clone())
    }

    fn compute_adjacency(&self) -> Result<Adj> {
        let sv = self.source().values()?;
        let tv = self.target().values()?;
        let mut adj: Adj = Vec::with_capacity(sv.len());
        match &self.0.repr {
            Repr::Pairs(adj) => return Ok(adj.as_ref().clone()),
            Repr::Image { image, .. } => {
                for a in sv {
                    let out = image(a);
                    let mut row = Vec::with_capacity(out.len());
                    for b in &out {
                        let j = self
                            .target()
                            .index_of(b)
                            .ok_or_else(|| Error::ImageEscapesSpace(a.clone()))?;
                        row.push(j as u32);
                    }
                    row.sort_unstable();
                    row.dedup();
                    adj.push(row);
                }
            }
            Repr::Test(test) => {
                for a in sv {
                    adj.push(
                        tv.iter()
                            .enumerate()
                            .filter(|(_, b)| test(a, b))
                            .map(|(j, _)| j as u32)
                            .collect(),
                    );
                }
            }
            Repr::Induced { key, base } => {
                let mut groups: HashMap<Value, Vec<u32>> = HashMap::new();
                for (j, b) in tv.iter().enumerate() {
                    if let Some(k) = key(b) {
                        groups.entry(k).or_default().push(j as u32);
                    }
                }
                let mut keys: Vec<&Value> = groups.keys().collect();
                keys.sort();
                let mut memo: HashMap<Value, Arc<Vec<u32>>> = HashMap::new();
                for a in sv {
                    let Some(ka) = key(a) else {
                        adj.push(Vec::new());
                        continue;
                    };
                    if let Some(row) = memo.get(&ka) {
                        adj.push(row.as_ref().clone());
                        continue;
                    }
                    let mut row: Vec<u32> = keys
                        .iter()
                        .filter(|kb| base.holds(&ka, kb))
                        .flat_map(|kb| groups[*kb].iter().copied())
                        .collect();
                    row.sort_unstable();
                    memo.insert(ka, Arc::new(row.clone()));
                    adj.push(row);
                }
            }
        }
        Ok(adj)
    }

    /// The extensional form of this relation (certificate preserved).
    pub fn materialize(&self) -> Result<Relation> {
        if self.is_extensional() {
            return Ok(self.clone());
        }
        let adj = self.adjacency()?;
        let mut r = Relation::build(
            self.source().clone(),
            self.target().clone(),
            Repr::Pairs(adj),
        );
        Arc::get_mut(&mut r.0).expect("fresh").cert = self.0.cert.clone();
        Ok(r)
    }

    /// All pairs in canonical order.
    pub fn pairs(&self) -> Result<Vec<(Value, Value)>> {
        let adj = self.adjacency()?;
        let sv = self.source().values()?;
        let tv = self.target().values()?;
        let mut out = Vec::new();
        for (i, row) in adj.iter().enumerate() {
            for &j in row {
                out.push((sv[i].clone(), tv[j as usize].clone()));
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> Result<usize> {
        Ok(self.adjacency()?.iter().map(Vec::len).sum())
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.adjacency()?.iter().all(Vec::is_empty))
    }

    /// The domain as a set; uses key grouping for induced relations so the
    /// full pair set is never built.
    pub fn domain(&self) -> Result<BTreeSet<Value>> {
        let sv = self.source().values()?;
        if let (Repr::Induced { key, base }, None) = (&self.0.repr, self.0.adj.get()) {
            let tk = self.target_keys()?;
            let mut memo: HashMap<Value, bool> = HashMap::new();
            let mut out = BTreeSet::new();
            for a in sv {
                let Some(ka) = key(a) else { continue };
                let hit = *memo
                    .entry(ka.clone())
                    .or_insert_with(|| tk.iter().any(|kb| base.holds(&ka, kb)));
                if hit {
                    out.insert(a.clone());
                }
            }
            return Ok(out);
        }
        if let (Repr::Image { domain: Some(hint), .. }, None) = (&self.0.repr, self.0.adj.get()) {
            return Ok(sv.iter().filter(|a| hint(a)).cloned().collect());
        }
        let adj = self.adjacency()?;
        Ok(sv
            .iter()
            .zip(adj.iter())
            .filter(|(_, row)| !row.is_empty())
            .map(|(a, _)| a.clone())
            .collect())
    }

    /// `(domain, range)`.
    pub fn domain_range(&self) -> Result<(BTreeSet<Value>, BTreeSet<Value>)> {
        let domain = self.domain()?;
        let adj = self.adjacency()?;
        let tv = self.target().values()?;
        let mut hit = vec![false; tv.len()];
        for row in adj.iter() {
            for &j in row {
                hit[j as usize] = true;
            }
        }
        let range = tv
            .iter()
            .zip(hit)
            .filter(|(_, h)| *h)
            .map(|(v, _)| v.clone())
            .collect();
        Ok((domain, range))
    }

    /// Pair-set equality (spaces must match too).
    pub fn equals(&self, other: &Relation) -> Result<bool> {
        if self.source() != other.source() || self.target() != other.target() {
            return Ok(false);
        }
        Ok(*self.adjacency()? == *other.adjacency()?)
    }

    /// Pair-set inclusion.
    pub fn is_subset_of(&self, other: &Relation) -> Result<bool> {
        Ok(self.first_pair_outside(other)?.is_none())
    }

    /// A pair of `self` missing from `other`, checked with `other`'s
    /// membership test so `other` is never materialized.
    pub fn first_pair_outside(&self, other: &Relation) -> Result<Option<(Value, Value)>> {
        let adj = self.adjacency()?;
        let sv = self.source().values()?;
        let tv = self.target().values()?;
        for (i, row) in adj.iter().enumerate() {
            for &j in row {
                let (a, b) = (&sv[i], &tv[j as usize]);
                if !other.holds(a, b) {
                    return Ok(Some((a.clone(), b.clone())));
                }
            }
        }
        Ok(None)
    }

    /// The same relation viewed over a subspace: only pairs with both ends in
    /// `sub` survive. Keeps the representation lazy.
    pub fn on_subspace(&self, sub: &Space) -> Result<Relation> {
        self.require_homogeneous()?;
        if let Some(v) = sub.values()?.iter().find(|v| !self.source().contains(v)) {
            return Err(Error::ValueOutsideSpace(v.clone()));
        }
        let repr = match &self.0.repr {
            Repr::Pairs(_) => {
                let me = self.clone();
                let sub_vals = sub.values()?;
                let mut adj: Adj = Vec::with_capacity(sub_vals.len());
                for a in sub_vals {
                    let row: Vec<u32> = me
                        .image(a)?
                        .iter()
                        .filter_map(|b| sub.index_of(b).map(|j| j as u32))
                        .collect();
                    adj.push(row);
                }
                Repr::Pairs(Arc::new(adj))
            }
            Repr::Image { image, domain } => {
                let image = image.clone();
                let keep = sub.clone();
                let restricted: ImageFn =
                    Arc::new(move |a| image(a).into_iter().filter(|b| keep.contains(b)).collect());
                // A hint for the full relation is no longer exact on the subspace.
                let _ = domain;
                Repr::Image { image: restricted, domain: None }
            }
            Repr::Test(test) => Repr::Test(test.clone()),
            Repr::Induced { key, base } => Repr::Induced { key: key.clone(), base: base.clone() },
        };
        let mut r = Relation::build(sub.clone(), sub.clone(), repr);
        Arc::get_mut(&mut r.0).expect("fresh").cert = self.0.cert.clone();
        Ok(r)
    }

    /// The same pairs with a different (containing) target space.
    pub fn retarget(&self, target: &Space) -> Result<Relation> {
        let pairs = self.pairs()?;
        Relation::from_pairs_between(self.source(), target, pairs)
    }

    /// `r⁻¹`.
    pub fn inverse(&self) -> Result<Relation> {
        let Repr::Pairs(adj) = &self.0.repr else {
            return Err(Error::RequiresExtensional);
        };
        let mut inv: Adj = vec![Vec::new(); self.target().len()?];
        for (i, row) in adj.iter().enumerate() {
            for &j in row {
                inv[j as usize].push(i as u32);
            }
        }
        Ok(Relation::from_adj(self.target().clone(), self.source().clone(), inv))
    }

    /// `r ; s`: pairs `[a, c]` with some `b` such that `[a, b] ∈ r` and `[b, c] ∈ s`.
    pub fn compose(&self, s: &Relation) -> Result<Relation> {
        if self.target() != s.source() {
            return Err(Error::SpaceMismatch);
        }
        let r_adj = self.adjacency()?;
        let s_adj = s.adjacency()?;
        let width = s.target().len()?;
        let adj = compose_rows(&r_adj, &s_adj, width);
        Ok(Relation::from_adj(self.source().clone(), s.target().clone(), adj))
    }

    /// `C : r`, the pairs of `r` whose first element lies in `c`.
    pub fn restrict(&self, c: &BTreeSet<Value>) -> Result<Relation> {
        if let Some(v) = c.iter().find(|v| !self.source().contains(v)) {
            return Err(Error::ValueOutsideSpace((*v).clone()));
        }
        let adj = self.adjacency()?;
        let sv = self.source().values()?;
        let out = sv
            .iter()
            .zip(adj.iter())
            .map(|(a, row)| if c.contains(a) { row.clone() } else { Vec::new() })
            .collect();
        Ok(Relation::from_adj(self.source().clone(), self.target().clone(), out))
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        if self.source() != other.source() || self.target() != other.target() {
            return Err(Error::SpaceMismatch);
        }
        let a = self.adjacency()?;
        let b = other.adjacency()?;
        let adj = a.iter().zip(b.iter()).map(|(x, y)| merge(x, y)).collect();
        Ok(Relation::from_adj(self.source().clone(), self.target().clone(), adj))
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        if self.source() != other.source() || self.target() != other.target() {
            return Err(Error::SpaceMismatch);
        }
        let a = self.adjacency()?;
        let b = other.adjacency()?;
        let adj = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| x.iter().copied().filter(|j| y.binary_search(j).is_ok()).collect())
            .collect();
        Ok(Relation::from_adj(self.source().clone(), self.target().clone(), adj))
    }

    /// `rⁿ` with `r⁰ = Id[X]` and `rⁿ⁺¹ = r ; rⁿ`.
    pub fn power(&self, n: usize) -> Result<Relation> {
        self.require_homogeneous()?;
        let mut acc = Relation::identity(self.space())?;
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `(r⁺, r*)`. `r⁺` is the union of the positive powers, accumulated until
    /// a new power adds nothing; on a space of `N` elements that happens within
    /// `N` rounds.
    pub fn closures(&self) -> Result<(Relation, Relation)> {
        self.require_homogeneous()?;
        let r = self.adjacency()?;
        let width = self.space().len()?;
        let mut plus: Adj = r.as_ref().clone();
        // Pairs first reached by the latest power.
        let mut fresh: Adj = plus.clone();
        while fresh.iter().any(|row| !row.is_empty()) {
            let next = compose_rows(&r, &fresh, width);
            let mut any = false;
            for (i, row) in next.into_iter().enumerate() {
                let new: Vec<u32> = row
                    .into_iter()
                    .filter(|j| plus[i].binary_search(j).is_err())
                    .collect();
                any |= !new.is_empty();
                plus[i] = merge(&plus[i], &new);
                fresh[i] = new;
            }
            if !any {
                break;
            }
        }
        let star: Adj = plus
            .iter()
            .enumerate()
            .map(|(i, row)| merge(row, &[i as u32]))
            .collect();
        let sp = self.space().clone();
        Ok((
            Relation::from_adj(sp.clone(), sp.clone(), plus),
            Relation::from_adj(sp.clone(), sp, star),
        ))
    }

    pub fn classify(&self) -> Result<Classification> {
        self.require_homogeneous()?;
        let adj = self.adjacency()?;
        let (plus, _) = self.closures()?;
        let plus_adj = plus.adjacency()?;
        let has = |a: &Adj, i: usize, j: u32| a[i].binary_search(&j).is_ok();
        let acyclic = (0..plus_adj.len()).all(|i| !has(&plus_adj, i, i as u32));
        let irreflexive = (0..adj.len()).all(|i| !has(&adj, i, i as u32));
        let asymmetric = adj
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|&j| !has(&adj, j as usize, i as u32)));
        let two_step = self.compose(self)?;
        let transitive = two_step.is_subset_of(&self.materialize()?)?;
        let function = adj.iter().all(|row| row.len() <= 1);
        Ok(Classification {
            acyclic,
            irreflexive,
            transitive,
            asymmetric,
            order: irreflexive && transitive,
            function,
        })
    }

    /// Image of a whole set under the relation.
    pub fn image_of_set<'a>(&self, set: impl IntoIterator<Item = &'a Value>) -> Result<BTreeSet<Value>> {
        let mut out = BTreeSet::new();
        for a in set {
            out.extend(self.image(a)?);
        }
        Ok(out)
    }
}

fn compose_rows(r: &Adj, s: &Adj, width: usize) -> Adj {
    let mut mark = vec![false; width];
    let mut out: Adj = Vec::with_capacity(r.len());
    for row in r {
        let mut acc = Vec::new();
        for &b in row {
            for &c in &s[b as usize] {
                if !mark[c as usize] {
                    mark[c as usize] = true;
                    acc.push(c);
                }
            }
        }
        for &c in &acc {
            mark[c as usize] = false;
        }
        acc.sort_unstable();
        out.push(acc);
    }
    out
}

fn merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl PartialEq for Relation {
    fn eq(&self, other: &Relation) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pairs() {
            Ok(pairs) if pairs.len() <= 64 => {
                f.write_str("{")?;
                for (k, (a, b)) in pairs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "[{a}, {b}]")?;
                }
                f.write_str("}")
            }
            Ok(pairs) => write!(f, "Relation({} pairs over {:?})", pairs.len(), self.source()),
            Err(_) => write!(f, "Relation(intensional over {:?})", self.source()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> BTreeSet<Value> {
        xs.iter().copied().map(Value::Int).collect()
    }

    fn rel(space: &Space, pairs: &[(i64, i64)]) -> Relation {
        Relation::from_pairs(space, pairs.iter().map(|&(a, b)| (Value::Int(a), Value::Int(b)))).unwrap()
    }

    fn greater(lo: i64, hi: i64) -> Relation {
        let sp = Space::int_range(lo, hi);
        let mut pairs = Vec::new();
        for a in lo..=hi {
            for b in lo..a {
                pairs.push((a, b));
            }
        }
        rel(&sp, &pairs)
    }

    #[test]
    fn image_examples() {
        let sp = Space::int_range(0, 2);
        let r = rel(&sp, &[(2, 1), (1, 0)]);
        assert_eq!(r.image(&Value::Int(2)).unwrap(), ints(&[1]));
        assert_eq!(r.image(&Value::Int(0)).unwrap(), ints(&[]));
        assert_eq!(greater(0, 3).image(&Value::Int(3)).unwrap(), ints(&[0, 1, 2]));
        assert!(matches!(r.image(&Value::Int(7)), Err(Error::ValueOutsideSpace(_))));
    }

    #[test]
    fn domain_range_examples() {
        let sp = Space::int_range(0, 2);
        let r = rel(&sp, &[(2, 1), (1, 0)]);
        assert_eq!(r.domain_range().unwrap(), (ints(&[1, 2]), ints(&[0, 1])));
        let e = Relation::empty(&sp).unwrap();
        assert_eq!(e.domain_range().unwrap(), (ints(&[]), ints(&[])));
        assert_eq!(
            greater(0, 4).domain_range().unwrap(),
            (ints(&[1, 2, 3, 4]), ints(&[0, 1, 2, 3]))
        );
    }

    #[test]
    fn inverse_examples() {
        let sp = Space::int_range(0, 2);
        let r = rel(&sp, &[(2, 1), (1, 0)]);
        assert_eq!(r.inverse().unwrap(), rel(&sp, &[(1, 2), (0, 1)]));
        let sp3 = Space::int_range(0, 3);
        let lesser = Relation::from_test(&sp3, |a, b| a.as_int() < b.as_int());
        assert_eq!(greater(0, 3).inverse().unwrap(), lesser.materialize().unwrap());
        assert!(matches!(lesser.inverse(), Err(Error::RequiresExtensional)));
    }

    #[test]
    fn compose_examples() {
        let sp = Space::explicit(["a", "b", "c"].map(Value::node)).unwrap();
        let n = Value::node;
        let r = Relation::from_pairs(&sp, [(n("a"), n("b"))]).unwrap();
        let s = Relation::from_pairs(&sp, [(n("b"), n("c"))]).unwrap();
        assert_eq!(r.compose(&s).unwrap(), Relation::from_pairs(&sp, [(n("a"), n("c"))]).unwrap());
        let back = Relation::from_pairs(&sp, [(n("b"), n("a"))]).unwrap();
        assert_eq!(r.compose(&back).unwrap(), Relation::from_pairs(&sp, [(n("a"), n("a"))]).unwrap());
        assert!(matches!(r.compose(&greater(0, 2)), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn restrict_examples() {
        let sp = Space::int_range(0, 2);
        let r = rel(&sp, &[(2, 1), (1, 0)]);
        assert_eq!(r.restrict(&ints(&[1])).unwrap(), rel(&sp, &[(1, 0)]));
        assert_eq!(r.restrict(&ints(&[])).unwrap(), Relation::empty(&sp).unwrap());
        assert!(matches!(r.restrict(&ints(&[9])), Err(Error::ValueOutsideSpace(_))));
    }

    #[test]
    fn power_examples() {
        let sp = Space::int_range(0, 2);
        let r = rel(&sp, &[(2, 1), (1, 0)]);
        assert_eq!(r.power(0).unwrap(), Relation::identity(&sp).unwrap());
        assert_eq!(r.power(2).unwrap(), rel(&sp, &[(2, 0)]));
        let sq = greater(0, 5).power(2).unwrap();
        let sp5 = Space::int_range(0, 5);
        let mut expect = Vec::new();
        for a in 0..=5 {
            for b in 0..=5 {
                if a >= b + 2 {
                    expect.push((a, b));
                }
            }
        }
        assert_eq!(sq, rel(&sp5, &expect));
    }

    #[test]
    fn closure_examples() {
        let sp = Space::int_range(0, 5);
        let succ = rel(&sp, &[(1, 0), (2, 1), (3, 2), (4, 3), (5, 4)]);
        let (plus, star) = succ.closures().unwrap();
        assert_eq!(plus, greater(0, 5));
        assert_eq!(star, greater(0, 5).union(&Relation::identity(&sp).unwrap()).unwrap());
        let (p0, s0) = Relation::empty(&sp).unwrap().closures().unwrap();
        assert!(p0.is_empty().unwrap());
        assert_eq!(s0, Relation::identity(&sp).unwrap());
        let abc = Space::explicit(["a", "b", "c"].map(Value::node)).unwrap();
        let n = Value::node;
        let r = Relation::from_pairs(&abc, [(n("a"), n("b")), (n("b"), n("c"))]).unwrap();
        let expect =
            Relation::from_pairs(&abc, [(n("a"), n("b")), (n("b"), n("c")), (n("a"), n("c"))]).unwrap();
        assert_eq!(r.closures().unwrap().0, expect);
    }

    #[test]
    fn classify_examples() {
        let c = greater(0, 3).classify().unwrap();
        assert_eq!(
            c,
            Classification {
                acyclic: true,
                irreflexive: true,
                transitive: true,
                asymmetric: true,
                order: true,
                function: false
            }
        );
        let sp = Space::int_range(0, 5);
        assert!(!rel(&sp, &[(1, 2), (2, 1)]).classify().unwrap().acyclic);
        let succ = rel(&sp, &[(1, 0), (2, 1), (3, 2), (4, 3), (5, 4)]).classify().unwrap();
        assert!(!succ.order && !succ.transitive && succ.function);
    }

    #[test]
    fn intensional_forms_agree() {
        let sp = Space::int_range(0, 4);
        let by_image = Relation::from_image(&sp, |a| {
            let a = a.as_int().unwrap();
            (0..a).map(Value::Int).collect()
        });
        let by_test = Relation::from_test(&sp, |a, b| a.as_int() > b.as_int());
        let id = Relation::identity(&Space::int_range(0, 4)).unwrap();
        let by_key = Relation::induced(&sp, Arc::new(|v: &Value| Some(v.clone())), &greater(0, 4));
        assert_eq!(by_image.materialize().unwrap(), greater(0, 4));
        assert_eq!(by_test.materialize().unwrap(), greater(0, 4));
        assert_eq!(by_key.materialize().unwrap(), greater(0, 4));
        assert_eq!(by_key.domain().unwrap(), ints(&[1, 2, 3, 4]));
        assert!(!id.equals(&greater(0, 4)).unwrap());
    }

    #[test]
    fn image_escaping_target_is_rejected() {
        let sp = Space::int_range(0, 2);
        let r = Relation::from_image(&sp, |a| vec![Value::Int(a.as_int().unwrap() + 1)]);
        assert!(matches!(r.image(&Value::Int(2)), Err(Error::ImageEscapesSpace(_))));
        assert!(r.materialize().is_err());
    }

    #[test]
    fn subspace_view() {
        let sub = Space::explicit([1, 3, 4].map(Value::Int)).unwrap();
        let g = Relation::from_test(&Space::int_range(0, 5), |a, b| a.as_int() > b.as_int());
        let view = g.on_subspace(&sub).unwrap();
        assert_eq!(view.image(&Value::Int(4)).unwrap(), ints(&[1, 3]));
        assert_eq!(view.domain().unwrap(), ints(&[3, 4]));
    }
}
