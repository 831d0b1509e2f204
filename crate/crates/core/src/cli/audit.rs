//! Property tests of contested claims: composition of Noetherian relations,
//! limit equality for seed pairs and the star identity under maxdepth.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::files::RelationFile;
use crate::error::Result;
use crate::noether::{is_noetherian, limit_image, LimitMode, Status, DEFAULT_FUEL};
use crate::relation::Relation;
use crate::space::Space;
use crate::value::{format_set, Value};

pub const DEFAULT_SAMPLES: usize = 1000;
/// Largest space drawn by the sampler.
pub const MAX_SAMPLE_SPACE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// The composition of two Noetherian relations is Noetherian.
    ComposeNoetherian,
    /// A seed of a Noetherian relation has the same limit.
    LimitSubsetTheorem,
    /// `(r*)^· = r^·` with the maxdepth limit (`r*` evaluated through `r⁺`).
    MaxdepthStarIdentity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// A fixed regression input.
    Fixture,
    /// Random instances.
    Sampled,
    /// Random instances with `s = r⁺`.
    PlusClosure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    ValidatedOnSample,
    CounterexampleFound,
}

/// Data refuting a claim; every relation can be fed back to `noet check`
/// or `noet seed`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    pub r: RelationFile,
    pub s: RelationFile,
    /// `r ; s` for composition findings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composed: Option<RelationFile>,
    /// Element where the two limits differ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<LimitMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_image: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_image: Option<Vec<Value>>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditFinding {
    pub claim: Claim,
    pub case: Case,
    /// Limit modes compared, for limit claims.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<LimitMode>,
    pub status: AuditStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub sample_size: usize,
    pub random_seed: u64,
}

/// Elements `0..n` and a relation drawn from a random strict order: each
/// pair descending in a random ranking is kept with probability `density`.
pub fn random_noetherian(rng: &mut impl Rng, n: usize, density: f64) -> (Space, Vec<usize>, Relation) {
    let space = Space::int_range(0, n as i64 - 1);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rank[a] > rank[b] && rng.random_bool(density) {
                pairs.push((Value::Int(a as i64), Value::Int(b as i64)));
            }
        }
    }
    let r = Relation::from_pairs(&space, pairs).expect("pairs lie in the space");
    (space, rank, r)
}

/// A Noetherian `s` and a seed `r` of it: `r` is drawn first, then `s` adds
/// descending pairs leaving elements of `r`'s domain, so domains agree.
pub fn random_seed_pair(rng: &mut impl Rng, n: usize) -> Result<(Relation, Relation)> {
    let (space, rank, r) = random_noetherian(rng, n, 0.4);
    let domain = r.domain()?;
    let mut pairs = r.pairs()?;
    for a in &domain {
        let ia = a.as_int().expect("integer space") as usize;
        for ib in 0..n {
            if rank[ia] > rank[ib] && rng.random_bool(0.3) {
                pairs.push((a.clone(), Value::Int(ib as i64)));
            }
        }
    }
    let s = Relation::from_pairs(&space, pairs)?;
    Ok((r, s))
}

fn size(rng: &mut impl Rng) -> usize {
    rng.random_range(1..=MAX_SAMPLE_SPACE)
}

/// Runs every audit with the given seed and per-case sample count.
pub fn audit(seed: u64, samples: usize) -> Result<Vec<AuditFinding>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let both = vec![LimitMode::ReachableMinima, LimitMode::Maxdepth];
    let finding = |claim, case, modes: Vec<LimitMode>, cx: Option<Counterexample>, n| AuditFinding {
        claim,
        case,
        modes,
        status: if cx.is_some() { AuditStatus::CounterexampleFound } else { AuditStatus::ValidatedOnSample },
        counterexample: cx,
        sample_size: n,
        random_seed: seed,
    };
    let mut out = Vec::new();

    let (r, s) = compose_fixture()?;
    out.push(finding(Claim::ComposeNoetherian, Case::Fixture, vec![], compose_check(&r, &s)?, 1));
    let mut cx = None;
    for _ in 0..samples {
        let n = size(&mut rng);
        let (_, _, r) = random_noetherian(&mut rng, n, 0.4);
        let (_, _, s) = random_noetherian(&mut rng, n, 0.4);
        if cx.is_none() {
            cx = compose_check(&r, &s)?;
        }
    }
    out.push(finding(Claim::ComposeNoetherian, Case::Sampled, vec![], cx, samples));

    let (r, s) = limit_subset_fixture()?;
    out.push(finding(Claim::LimitSubsetTheorem, Case::Fixture, both.clone(), limits_check(&r, &s, &r, &s, &both)?, 1));
    let mut cx = None;
    for _ in 0..samples {
        let n = size(&mut rng);
        let (r, s) = random_seed_pair(&mut rng, n)?;
        if cx.is_none() {
            cx = limits_check(&r, &s, &r, &s, &both)?;
        }
    }
    out.push(finding(Claim::LimitSubsetTheorem, Case::Sampled, both.clone(), cx, samples));
    let minima = vec![LimitMode::ReachableMinima];
    let mut cx = None;
    for _ in 0..samples {
        let n = size(&mut rng);
        let (_, _, r) = random_noetherian(&mut rng, n, 0.4);
        let (plus, _) = r.closures()?;
        if cx.is_none() {
            cx = limits_check(&r, &plus, &r, &plus, &minima)?;
        }
    }
    out.push(finding(Claim::LimitSubsetTheorem, Case::PlusClosure, minima, cx, samples));

    let maxdepth = vec![LimitMode::Maxdepth];
    let mut cx = None;
    for _ in 0..samples {
        let n = size(&mut rng);
        let (_, _, r) = random_noetherian(&mut rng, n, 0.4);
        let (plus, star) = r.closures()?;
        if cx.is_none() {
            // `star` is reported; its limit is that of `plus`, the reflexive
            // steps never lowering the height.
            cx = limits_check(&r, &star, &r, &plus, &maxdepth)?;
        }
    }
    out.push(finding(Claim::MaxdepthStarIdentity, Case::Sampled, maxdepth, cx, samples));
    Ok(out)
}

fn nodes(names: &[&str]) -> Space {
    Space::explicit(names.iter().map(|n| Value::node(*n))).expect("small space")
}

fn node_pairs(pairs: &[(&str, &str)]) -> Vec<(Value, Value)> {
    pairs.iter().map(|(a, b)| (Value::node(*a), Value::node(*b))).collect()
}

/// `{[a, b]}` and `{[b, a]}`: each Noetherian, their composition `{[a, a]}` is not.
pub fn compose_fixture() -> Result<(Relation, Relation)> {
    let sp = nodes(&["a", "b"]);
    Ok((
        Relation::from_pairs(&sp, node_pairs(&[("a", "b")]))?,
        Relation::from_pairs(&sp, node_pairs(&[("b", "a")]))?,
    ))
}

/// `r = {[a, b]}` is a seed of `s = {[a, b], [a, e]}`, yet the limits differ at `a`.
pub fn limit_subset_fixture() -> Result<(Relation, Relation)> {
    let sp = nodes(&["a", "b", "e"]);
    Ok((
        Relation::from_pairs(&sp, node_pairs(&[("a", "b")]))?,
        Relation::from_pairs(&sp, node_pairs(&[("a", "b"), ("a", "e")]))?,
    ))
}

fn compose_check(r: &Relation, s: &Relation) -> Result<Option<Counterexample>> {
    let c = r.compose(s)?;
    let verdict = is_noetherian(&c, DEFAULT_FUEL);
    if verdict.status != Status::NotNoetherian {
        return Ok(None);
    }
    let cycle = verdict.witness.map(|w| w.to_string()).unwrap_or_default();
    Ok(Some(Counterexample {
        r: RelationFile::from_relation(r)?,
        s: RelationFile::from_relation(s)?,
        composed: Some(RelationFile::from_relation(&c)?),
        at: None,
        mode: None,
        r_image: None,
        s_image: None,
        note: format!("both operands are Noetherian; the composition has the cycle {cycle}"),
    }))
}

/// Compares `limit(lr)` with `limit(ls)` pointwise; `r` and `s` are the
/// relations reported.
fn limits_check(
    r: &Relation,
    s: &Relation,
    lr: &Relation,
    ls: &Relation,
    modes: &[LimitMode],
) -> Result<Option<Counterexample>> {
    for &mode in modes {
        for a in r.space().values()? {
            let ri = limit_image(lr, a, mode)?;
            let si = limit_image(ls, a, mode)?;
            if ri != si {
                return Ok(Some(Counterexample {
                    r: RelationFile::from_relation(r)?,
                    s: RelationFile::from_relation(s)?,
                    composed: None,
                    at: Some(a.clone()),
                    mode: Some(mode),
                    note: format!("at {a} the limits are {} and {}", format_set(&ri), format_set(&si)),
                    r_image: Some(ri.into_iter().collect()),
                    s_image: Some(si.into_iter().collect()),
                }));
            }
        }
    }
    Ok(None)
}

/// Re-derives a counterexample's verdict from its serialized relations.
pub fn recheck(claim: Claim, cx: &Counterexample) -> Result<bool> {
    let r = cx.r.build()?;
    let s = cx.s.build()?;
    Ok(match claim {
        Claim::ComposeNoetherian => is_noetherian(&r.compose(&s)?, DEFAULT_FUEL).status == Status::NotNoetherian,
        Claim::LimitSubsetTheorem | Claim::MaxdepthStarIdentity => {
            let (Some(a), Some(mode)) = (&cx.at, cx.mode) else { return Ok(false) };
            let ls = if claim == Claim::MaxdepthStarIdentity { r.closures()?.0 } else { s };
            let ri: BTreeSet<Value> = limit_image(&r, a, mode)?;
            ri != limit_image(&ls, a, mode)?
        }
    })
}
