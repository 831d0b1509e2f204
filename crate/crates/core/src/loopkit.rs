//! Loops built from a state space, a Noetherian order, an initialization and
//! a body that is a seed of the order.
//!
//! A loop applies the initialization, then the body for as long as the state
//! stays in the body's domain. Its meaning can be computed three ways, all of
//! which must agree: by running it, by the closure formula
//! `init ; (C′ : body)*` restricted to exit states, and by `init ; limit(body)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, certify_with_fuel, NamedFn, NamedRelation, NoetherianCert, Rule, Trust};
use crate::error::{Error, Result};
use crate::noether::{limit, seed_check, Chain, LimitMode, Status, DEFAULT_FUEL};
use crate::relation::{KeyFn, Relation};
use crate::space::Space;
use crate::value::Value;

/// Structural defects found while assembling a loop.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("state space is empty")]
    EmptySpace,
    #[error("initialization maps {input} to {state}, outside the state space")]
    InitEscapesSpace { input: Value, state: Value },
    #[error("body step [{0}, {1}] is not in the order")]
    BodyNotSubsetOfOrder(Value, Value),
    #[error("{0} is in the domain of exactly one of the body and the order")]
    DomainMismatch(Value),
    #[error("order is not Noetherian{}", .0.as_ref().map(|c| format!(", chain: {c}")).unwrap_or_default())]
    OrderNotNoetherian(Option<Chain>),
}

/// Built-in postconditions, evaluated on an input and a terminal state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    /// Input `(a, b)`, terminal `(m, n)` with `m = n = gcd(a, b)`.
    Gcd,
    /// Input `<t, x>`, terminal `1..i`: `(x ∈ t) = (i ≠ n)`.
    SeqMembership,
    /// Input `<t, x>`, terminal interval `I`: `(x ∈ t) = (I ≠ ∅)`.
    IntervalMembership,
    /// Input `<t, x>`, terminal interval set `IS`: `(x ∈ t) = (∪IS ≠ 1..n)`.
    IntervalsetMembership,
    /// Input `t`, terminal `<p, a..b>`: `p` is a permutation of `t` and
    /// `p[1..a-1] ≤ p[a..n]`.
    PartitionSplit,
    /// Input `t`, terminal `<p, ...>`: `p` is a sorted permutation of `t`.
    SortedPermutation,
    /// The terminal state is a minimum of the loop's order.
    MinimumCharacterization,
}

impl Oracle {
    pub const ALL: [Oracle; 7] = [
        Oracle::Gcd,
        Oracle::SeqMembership,
        Oracle::IntervalMembership,
        Oracle::IntervalsetMembership,
        Oracle::PartitionSplit,
        Oracle::SortedPermutation,
        Oracle::MinimumCharacterization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Oracle::Gcd => "gcd",
            Oracle::SeqMembership => "seq_membership",
            Oracle::IntervalMembership => "interval_membership",
            Oracle::IntervalsetMembership => "intervalset_membership",
            Oracle::PartitionSplit => "partition_split",
            Oracle::SortedPermutation => "sorted_permutation",
            Oracle::MinimumCharacterization => "minimum_characterization",
        }
    }

    pub fn from_name(name: &str) -> Result<Oracle> {
        Oracle::ALL
            .into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::UnknownOracle(name.to_owned()))
    }

    /// Evaluates the postcondition. Ill-shaped values fail the check.
    pub fn check(self, lp: &LoopDef, input: &Value, terminal: &Value) -> bool {
        match self {
            Oracle::Gcd => oracles::gcd(input, terminal),
            Oracle::SeqMembership => oracles::seq_membership(input, terminal),
            Oracle::IntervalMembership => oracles::interval_membership(input, terminal),
            Oracle::IntervalsetMembership => oracles::intervalset_membership(input, terminal),
            Oracle::PartitionSplit => oracles::partition_split(input, terminal),
            Oracle::SortedPermutation => oracles::sorted_permutation(input, terminal),
            Oracle::MinimumCharacterization => {
                lp.space.contains(terminal) && matches!(lp.order.in_domain(terminal), Ok(false))
            }
        }
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Postcondition predicates, independent of the loops they check.
pub mod oracles {
    use crate::value::Value;

    fn euclid(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }

    fn search_input(input: &Value) -> Option<(&[i64], i64)> {
        Some((input.component(0)?.as_seq()?, input.component(1)?.as_int()?))
    }

    fn is_permutation(a: &[i64], b: &[i64]) -> bool {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        x.sort_unstable();
        y.sort_unstable();
        x == y
    }

    fn array_of(v: &Value) -> Option<&[i64]> {
        match v {
            Value::Seq(s) => Some(s),
            _ => v.component(0)?.as_seq(),
        }
    }

    pub fn gcd(input: &Value, terminal: &Value) -> bool {
        let (Some((a, b)), Some((m, n))) = (input.as_int_pair(), terminal.as_int_pair()) else {
            return false;
        };
        let g = euclid(a, b);
        m == g && n == g
    }

    pub fn seq_membership(input: &Value, terminal: &Value) -> bool {
        let (Some((t, x)), Some(iv)) = (search_input(input), terminal.as_interval()) else {
            return false;
        };
        t.contains(&x) == (iv.hi() != t.len() as i64)
    }

    pub fn interval_membership(input: &Value, terminal: &Value) -> bool {
        let (Some((t, x)), Some(iv)) = (search_input(input), terminal.as_interval()) else {
            return false;
        };
        t.contains(&x) == !iv.is_empty()
    }

    pub fn intervalset_membership(input: &Value, terminal: &Value) -> bool {
        let (Some((t, x)), Some(set)) = (search_input(input), terminal.as_interval_set()) else {
            return false;
        };
        let n = t.len() as i64;
        let covered: std::collections::BTreeSet<i64> = set.iter().flat_map(|iv| iv.points()).collect();
        let covers_all = covered == (1..=n).collect();
        t.contains(&x) == !covers_all
    }

    pub fn partition_split(input: &Value, terminal: &Value) -> bool {
        let (Some(t), Some(p), Some(iv)) = (
            input.as_seq(),
            terminal.component(0).and_then(Value::as_seq),
            terminal.component(1).and_then(Value::as_interval),
        ) else {
            return false;
        };
        let a = iv.lo();
        if a < 1 || a - 1 > p.len() as i64 || !is_permutation(t, p) {
            return false;
        }
        let (left, right) = p.split_at((a - 1) as usize);
        left.iter().all(|l| right.iter().all(|r| l <= r))
    }

    pub fn sorted_permutation(input: &Value, terminal: &Value) -> bool {
        let (Some(t), Some(p)) = (input.as_seq(), array_of(terminal)) else {
            return false;
        };
        p.windows(2).all(|w| w[0] <= w[1]) && is_permutation(t, p)
    }

    pub fn gcd_of(a: i64, b: i64) -> i64 {
        euclid(a, b)
    }
}

/// Picks a successor in single-mode runs; `None` falls back to the least one.
pub type Chooser = Arc<dyn Fn(&Value, &BTreeSet<Value>) -> Option<Value> + Send + Sync>;

/// A loop: state space, order, initialization, body and optional postcondition.
#[derive(Clone)]
pub struct LoopDef {
    space: Space,
    order: Relation,
    init: Relation,
    body: Relation,
    postcondition: Option<Oracle>,
    policy: Option<Chooser>,
}

impl fmt::Debug for LoopDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoopDef")
            .field("space", &self.space)
            .field("postcondition", &self.postcondition)
            .finish_non_exhaustive()
    }
}

/// Assembles a loop, checking that the space is non-empty, the initialization
/// lands in it, the order is Noetherian and the body is a seed of the order.
/// An order over a larger space is restricted to the state space.
pub fn make_loop(
    space: &Space,
    order: &Relation,
    init: &Relation,
    body: &Relation,
    postcondition: Option<Oracle>,
) -> Result<LoopDef> {
    let lp = LoopDef::unchecked(space, order, init, body, postcondition)?;
    lp.validate(DEFAULT_FUEL)?;
    Ok(lp)
}

impl LoopDef {
    /// Assembles a loop without checking the loop obligations; [`verify`]
    /// reports on them.
    pub fn unchecked(
        space: &Space,
        order: &Relation,
        init: &Relation,
        body: &Relation,
        postcondition: Option<Oracle>,
    ) -> Result<LoopDef> {
        if body.source() != space || body.target() != space {
            return Err(Error::SpaceMismatch);
        }
        let order = if order.space() == space {
            order.clone()
        } else {
            let restricted = order.on_subspace(space)?;
            match order.cert() {
                Some(c) => restricted.with_cert(NoetherianCert::new(Rule::Restrict, vec![c.clone()])),
                None => restricted,
            }
        };
        Ok(LoopDef {
            space: space.clone(),
            order,
            init: init.clone(),
            body: body.clone(),
            postcondition,
            policy: None,
        })
    }

    /// Sets the successor choice used by single-mode runs.
    pub fn with_policy(mut self, policy: Chooser) -> Self {
        self.policy = Some(policy);
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn order(&self) -> &Relation {
        &self.order
    }

    pub fn init(&self) -> &Relation {
        &self.init
    }

    pub fn body(&self) -> &Relation {
        &self.body
    }

    pub fn postcondition(&self) -> Option<Oracle> {
        self.postcondition
    }

    pub fn input_space(&self) -> &Space {
        self.init.source()
    }

    fn validate(&self, fuel: usize) -> Result<()> {
        if self.space.is_empty()? {
            return Err(LoopError::EmptySpace.into());
        }
        if let Some((input, state)) = self.init_escape()? {
            return Err(LoopError::InitEscapesSpace { input, state }.into());
        }
        let cert = certify_with_fuel(&self.order, fuel);
        if cert.verdict.status != Status::Noetherian {
            return Err(LoopError::OrderNotNoetherian(cert.verdict.witness).into());
        }
        let seed = seed_check(&self.body, &self.order)?;
        if let Some((a, b)) = seed.pair_outside {
            return Err(LoopError::BodyNotSubsetOfOrder(a, b).into());
        }
        if let Some(v) = seed.domain_mismatch {
            return Err(LoopError::DomainMismatch(v).into());
        }
        Ok(())
    }

    fn init_escape(&self) -> Result<Option<(Value, Value)>> {
        for a in self.init.source().values()? {
            for b in self.init.image(a)? {
                if !self.space.contains(&b) {
                    return Ok(Some((a.clone(), b)));
                }
            }
        }
        Ok(None)
    }

    /// `C = X \ domain(body)`.
    pub fn exit_condition(&self) -> Result<BTreeSet<Value>> {
        let domain = self.body.domain()?;
        Ok(self
            .space
            .values()?
            .iter()
            .filter(|v| !domain.contains(v))
            .cloned()
            .collect())
    }

    fn initial_states(&self, input: &Value) -> Result<BTreeSet<Value>> {
        if !self.init.source().contains(input) {
            return Err(Error::InputOutsideSpace(input.clone()));
        }
        let states = self.init.image(input)?;
        if states.is_empty() {
            return Err(Error::InputOutsideSpace(input.clone()));
        }
        if let Some(s) = states.iter().find(|s| !self.space.contains(s)) {
            return Err(LoopError::InitEscapesSpace { input: input.clone(), state: s.clone() }.into());
        }
        Ok(states)
    }

    /// One execution: the least initial state, then the policy's choice (or the
    /// least successor) until the body no longer applies.
    pub fn run(&self, input: &Value, fuel: usize) -> Result<ExecTrace> {
        let init = self.initial_states(input)?;
        let mut state = init.into_iter().next().expect("non-empty");
        let mut states = vec![state.clone()];
        loop {
            let succ = self.body.image(&state)?;
            if succ.is_empty() {
                break;
            }
            if states.len() > fuel {
                return Err(Error::FuelExhausted { steps: states.len() - 1, partial: states });
            }
            let next = self
                .policy
                .as_ref()
                .and_then(|p| p(&state, &succ))
                .filter(|v| succ.contains(v))
                .unwrap_or_else(|| succ.into_iter().next().expect("non-empty"));
            states.push(next.clone());
            state = next;
        }
        Ok(ExecTrace { input: input.clone(), steps: states.len() - 1, terminal: state, states })
    }

    /// Every state reachable from the input's initial states, capped by `fuel`.
    fn reachable(&self, input: &Value, fuel: usize) -> Result<(BTreeSet<Value>, Vec<Value>)> {
        let init = self.initial_states(input)?;
        let mut seen: BTreeSet<Value> = init.clone();
        let mut queue: VecDeque<Value> = init.iter().cloned().collect();
        while let Some(s) = queue.pop_front() {
            for t in self.body.image(&s)? {
                if seen.insert(t.clone()) {
                    if seen.len() > fuel {
                        return Err(Error::FuelExhausted { steps: seen.len(), partial: seen.into_iter().collect() });
                    }
                    queue.push_back(t);
                }
            }
        }
        Ok((init, seen.into_iter().collect()))
    }

    /// Explores every resolution of the body's nondeterminism.
    pub fn run_all(&self, input: &Value, fuel: usize) -> Result<AllRuns> {
        let (init, region) = self.reachable(input, fuel)?;
        let index: HashMap<&Value, usize> = region.iter().enumerate().map(|(k, v)| (v, k)).collect();
        let mut succ: Vec<Vec<usize>> = Vec::with_capacity(region.len());
        for s in &region {
            succ.push(self.body.image(s)?.iter().map(|t| index[t]).collect());
        }
        // Longest path to a terminal, by iterative post-order.
        let mut depth: Vec<Option<usize>> = vec![None; region.len()];
        for start in 0..region.len() {
            let mut stack = vec![(start, 0usize)];
            while let Some((u, k)) = stack.pop() {
                if depth[u].is_some() {
                    continue;
                }
                if k < succ[u].len() {
                    stack.push((u, k + 1));
                    let v = succ[u][k];
                    if depth[v].is_none() {
                        if stack.iter().any(|&(w, _)| w == v) {
                            return Err(LoopError::OrderNotNoetherian(None).into());
                        }
                        stack.push((v, 0));
                    }
                } else {
                    depth[u] = Some(succ[u].iter().map(|&v| depth[v].expect("visited") + 1).max().unwrap_or(0));
                }
            }
        }
        let terminals = region
            .iter()
            .zip(&succ)
            .filter(|(_, s)| s.is_empty())
            .map(|(v, _)| v.clone())
            .collect();
        let max_steps = init.iter().map(|s| depth[index[s]].expect("visited")).max().unwrap_or(0);
        Ok(AllRuns { input: input.clone(), terminals, max_steps, states_explored: region.len() })
    }

    fn region_relations(&self, input: &Value, fuel: usize) -> Result<(Space, Relation, Relation)> {
        let (init, region) = self.reachable(input, fuel)?;
        let sub = Space::explicit(region)?;
        let body = self.body.on_subspace(&sub)?.materialize()?;
        let from = Space::explicit([input.clone()])?;
        let init = Relation::from_pairs_between(&from, &sub, init.into_iter().map(|s| (input.clone(), s)))?;
        Ok((sub, body, init))
    }

    /// `(init ; (C′ : body)*)(input)` and its exit-state part, computed on the
    /// region reachable from `input`.
    pub fn closure_images_at(&self, input: &Value, fuel: usize) -> Result<(BTreeSet<Value>, BTreeSet<Value>)> {
        let (sub, body, init) = self.region_relations(input, fuel)?;
        let (full, terminal) = closure_denotation(&sub, &body, &init)?;
        Ok((full.image(input)?, terminal.image(input)?))
    }

    /// `(init ; body^·)(input)` on the region reachable from `input`.
    pub fn limit_image_at(&self, input: &Value, fuel: usize) -> Result<BTreeSet<Value>> {
        let (_, body, init) = self.region_relations(input, fuel)?;
        init.compose(&limit(&body, LimitMode::ReachableMinima)?)?.image(input)
    }

    /// The closure denotation over the whole space: `(full, terminal)`.
    pub fn denotation_closure(&self) -> Result<(Relation, Relation)> {
        let init = self.init_into_space()?;
        closure_denotation(&self.space, &self.body.materialize()?, &init)
    }

    /// `init ; body^·` over the whole space.
    pub fn denotation_limit(&self) -> Result<Relation> {
        let init = self.init_into_space()?;
        init.compose(&limit(&self.body.materialize()?, LimitMode::ReachableMinima)?)
    }

    fn init_into_space(&self) -> Result<Relation> {
        if self.init.target() == &self.space {
            self.init.materialize()
        } else {
            self.init.retarget(&self.space)
        }
    }
}

fn closure_denotation(space: &Space, body: &Relation, init: &Relation) -> Result<(Relation, Relation)> {
    let domain = body.domain()?;
    let exit: BTreeSet<Value> = space.values()?.iter().filter(|v| !domain.contains(v)).cloned().collect();
    let (_, star) = body.restrict(&domain)?.closures()?;
    let full = init.compose(&star)?;
    let terminal = full.compose(&Relation::identity_on(space, &exit)?)?;
    Ok((full, terminal))
}

/// A single execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExecTrace {
    pub input: Value,
    pub states: Vec<Value>,
    pub terminal: Value,
    pub steps: usize,
}

/// The outcome of exploring every resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllRuns {
    pub input: Value,
    pub terminals: BTreeSet<Value>,
    pub max_steps: usize,
    pub states_explored: usize,
}

/// Which inputs [`verify`] runs.
#[derive(Clone, Debug)]
pub enum InputSample {
    All,
    Values(Vec<Value>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Obligation {
    pub name: &'static str,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Obligation {
    fn pass(name: &'static str) -> Self {
        Obligation { name, outcome: Outcome::Pass, witness: None, detail: None }
    }

    fn fail(name: &'static str, detail: impl Into<String>, witness: Option<serde_json::Value>) -> Self {
        Obligation { name, outcome: Outcome::Fail, witness, detail: Some(detail.into()) }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        Obligation { name, outcome: Outcome::Skipped, witness: None, detail: Some(detail.into()) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationStats {
    pub inputs_sampled: usize,
    pub terminals_checked: usize,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub obligations: Vec<Obligation>,
    pub stats: VerificationStats,
}

impl VerificationReport {
    pub fn obligation(&self, name: &str) -> Option<&Obligation> {
        self.obligations.iter().find(|o| o.name == name)
    }

    /// Combines reports over disjoint input samples of related loops.
    pub fn merge(reports: impl IntoIterator<Item = VerificationReport>) -> VerificationReport {
        let mut out: Option<VerificationReport> = None;
        for r in reports {
            let Some(acc) = out.as_mut() else {
                out = Some(r);
                continue;
            };
            acc.passed &= r.passed;
            acc.stats.inputs_sampled += r.stats.inputs_sampled;
            acc.stats.terminals_checked += r.stats.terminals_checked;
            acc.stats.max_steps = acc.stats.max_steps.max(r.stats.max_steps);
            for (mine, theirs) in acc.obligations.iter_mut().zip(r.obligations) {
                let rank = |o: Outcome| match o {
                    Outcome::Fail => 2,
                    Outcome::Pass => 1,
                    Outcome::Skipped => 0,
                };
                if rank(theirs.outcome) > rank(mine.outcome) {
                    *mine = theirs;
                }
            }
        }
        out.unwrap_or(VerificationReport { passed: true, obligations: Vec::new(), stats: Default::default() })
    }
}

fn json(v: impl Serialize) -> Option<serde_json::Value> {
    serde_json::to_value(v).ok()
}

/// Evaluates every loop obligation; failures become report entries.
pub fn verify(lp: &LoopDef, inputs: &InputSample, fuel: usize) -> VerificationReport {
    let mut obligations = Vec::new();
    let mut stats = VerificationStats::default();

    let nonempty = matches!(lp.space.is_empty(), Ok(false));
    obligations.push(match lp.space.is_empty() {
        Ok(false) => Obligation::pass("space_nonempty"),
        Ok(true) => Obligation::fail("space_nonempty", "state space is empty", None),
        Err(e) => Obligation::fail("space_nonempty", e.to_string(), None),
    });
    obligations.push(match lp.init_escape() {
        Ok(None) => Obligation::pass("init_range"),
        Ok(Some((a, b))) => Obligation::fail("init_range", format!("{a} initializes to {b}, outside the space"), json((a, b))),
        Err(e) => Obligation::fail("init_range", e.to_string(), None),
    });
    let cert = certify_with_fuel(&lp.order, fuel);
    obligations.push(if cert.verdict.status == Status::Noetherian {
        Obligation::pass("order_noetherian")
    } else {
        let detail = match &cert.verdict.witness {
            Some(c) => format!("order is not Noetherian, chain: {c}"),
            None => "order could not be shown Noetherian".to_owned(),
        };
        Obligation::fail("order_noetherian", detail, json(&cert.verdict.witness))
    });
    obligations.push(match seed_check(&lp.body, &lp.order) {
        Ok(s) if s.holds() => Obligation::pass("body_is_seed"),
        Ok(s) => match (s.pair_outside, s.domain_mismatch) {
            (Some((a, b)), _) => Obligation::fail("body_is_seed", format!("body step [{a}, {b}] is not in the order"), json((a, b))),
            (None, Some(v)) => Obligation::fail(
                "body_is_seed",
                format!("{v} is in the domain of exactly one of the body and the order"),
                json(v),
            ),
            (None, None) => unreachable!("a failing seed check has a witness"),
        },
        Err(e) => Obligation::fail("body_is_seed", e.to_string(), None),
    });
    obligations.push(match lp.exit_condition() {
        Ok(c) if !c.is_empty() => Obligation::pass("exit_nonempty"),
        Ok(_) => Obligation::fail("exit_nonempty", "every state is in the body's domain", None),
        Err(e) => Obligation::fail("exit_nonempty", e.to_string(), None),
    });

    let sample: Result<Vec<Value>> = match inputs {
        InputSample::All => lp.input_space().values().map(<[Value]>::to_vec),
        InputSample::Values(vs) => Ok(vs.clone()),
    };
    let (post, agree) = match (nonempty, sample) {
        (false, _) => (
            Obligation::skipped("postcondition_at_minima", "empty state space"),
            Obligation::skipped("denotation_agreement", "empty state space"),
        ),
        (true, Err(e)) => (
            Obligation::fail("postcondition_at_minima", e.to_string(), None),
            Obligation::fail("denotation_agreement", e.to_string(), None),
        ),
        (true, Ok(sample)) => check_runs(lp, &sample, fuel, &mut stats),
    };
    obligations.push(post);
    obligations.push(agree);
    let passed = obligations.iter().all(|o| o.outcome != Outcome::Fail);
    VerificationReport { passed, obligations, stats }
}

fn check_runs(
    lp: &LoopDef,
    sample: &[Value],
    fuel: usize,
    stats: &mut VerificationStats,
) -> (Obligation, Obligation) {
    let mut post: Option<Obligation> = None;
    let mut agree: Option<Obligation> = None;
    // Whole-space denotations when the space is enumerable; otherwise each
    // input is evaluated on the region it reaches.
    let whole = (|| -> Result<(Relation, Relation)> {
        let (_, terminal) = lp.denotation_closure()?;
        Ok((terminal, lp.denotation_limit()?))
    })()
    .ok();
    for input in sample {
        stats.inputs_sampled += 1;
        let runs = match lp.run_all(input, fuel) {
            Ok(r) => r,
            Err(e) => {
                let o = Obligation::fail("postcondition_at_minima", format!("running on {input}: {e}"), json(input));
                post.get_or_insert(o);
                continue;
            }
        };
        stats.max_steps = stats.max_steps.max(runs.max_steps);
        stats.terminals_checked += runs.terminals.len();
        if post.is_none() {
            for t in &runs.terminals {
                let at_minimum = matches!(lp.order.in_domain(t), Ok(false));
                let holds = lp.postcondition.is_none_or(|o| o.check(lp, input, t));
                if !at_minimum || !holds {
                    let what = if at_minimum { "postcondition fails" } else { "terminal is not a minimum of the order" };
                    post = Some(Obligation::fail(
                        "postcondition_at_minima",
                        format!("{what} for input {input} at terminal {t}"),
                        json((input, t)),
                    ));
                    break;
                }
            }
        }
        if agree.is_none() {
            let (closure, lim) = match &whole {
                Some((c, l)) => (c.image(input), l.image(input)),
                None => (lp.closure_images_at(input, fuel).map(|(_, t)| t), lp.limit_image_at(input, fuel)),
            };
            match (closure, lim) {
                (Ok(c), Ok(l)) if c == runs.terminals && l == runs.terminals => {}
                (Ok(c), Ok(l)) => {
                    agree = Some(Obligation::fail(
                        "denotation_agreement",
                        format!(
                            "input {input}: runs end in {}, closure gives {}, limit gives {}",
                            crate::value::format_set(&runs.terminals),
                            crate::value::format_set(&c),
                            crate::value::format_set(&l)
                        ),
                        json(input),
                    ))
                }
                (Err(e), _) | (_, Err(e)) => {
                    agree = Some(Obligation::fail("denotation_agreement", format!("input {input}: {e}"), json(input)))
                }
            }
        }
    }
    let post = post.unwrap_or_else(|| match lp.postcondition {
        Some(_) => Obligation::pass("postcondition_at_minima"),
        None => Obligation {
            detail: Some("no postcondition; terminals checked against the order's minima".into()),
            ..Obligation::pass("postcondition_at_minima")
        },
    });
    (post, agree.unwrap_or_else(|| Obligation::pass("denotation_agreement")))
}

/// A classical variant: a natural-number measure on states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantFn {
    Named(NamedFn),
    Map(Vec<(Value, i64)>),
}

type Eval = Arc<dyn Fn(&Value) -> Option<i64> + Send + Sync>;

/// `{ [a, a'] | f(a) > f(a') }` over `space`, certified as INDUCED over INTGREATER.
pub fn variant_to_relation(f: &VariantFn, space: &Space) -> Result<Relation> {
    let eval: Eval = match f {
        VariantFn::Named(named) => {
            let named = named.clone();
            Arc::new(move |v| named.apply(v).and_then(|x| x.as_int()))
        }
        VariantFn::Map(entries) => {
            let map: BTreeMap<Value, i64> = entries.iter().cloned().collect();
            Arc::new(move |v| map.get(v).copied())
        }
    };
    let mut top = 0;
    for v in space.values()? {
        match eval(v) {
            None => return Err(Error::NonTotalFunction(v.clone())),
            Some(k) if k < 0 => return Err(Error::NegativeVariantValue(v.clone())),
            Some(k) => top = top.max(k),
        }
    }
    let base = catalog::build(&catalog::CatalogExpr::named(NamedRelation::IntGreater { lo: 0, hi: top }))?;
    let key: KeyFn = Arc::new(move |v| eval(v).map(Value::Int));
    let cert = NoetherianCert::new(Rule::Induced, vec![base.cert().expect("catalog leaf").clone()]);
    debug_assert_eq!(cert.trust, Trust::Sound);
    Ok(Relation::induced(space, key, &base).with_cert(cert))
}
