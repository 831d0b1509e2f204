//! The `noet` command line: argument parsing, dispatch and report rendering.

pub mod audit;
pub mod files;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{certify_with_fuel, NoetherianCert};
use crate::error::{Error, Result};
use crate::examples::{self, ExampleName, GcdOrder, Params, SweepBounds};
use crate::loopkit::{verify, InputSample, LoopDef, Oracle, Outcome, VerificationReport};
use crate::noether::{self, LimitMode, Status, DEFAULT_FUEL};
use crate::relation::Relation;
use crate::space::{set_max_space, DEFAULT_MAX_SPACE};
use crate::value::{format_set, Value};

use audit::{AuditFinding, AuditStatus, DEFAULT_SAMPLES};
use files::{canonical_json, read_json, LoopFile, RelationFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable overriding the default audit seed.
pub const SEED_ENV: &str = "NOET_SEED";

#[derive(Debug, Parser)]
#[command(name = "noet", version, about = "Loops as limits of Noetherian relations")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Step budget for exploration and runs.
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    pub fuel: usize,
    /// Largest space that may be enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SPACE)]
    pub max_space: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a relation is Noetherian.
    Check { file: PathBuf },
    /// The limit of a relation, at one element or everywhere.
    Limit {
        file: PathBuf,
        #[arg(long)]
        from: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Minima)]
        mode: ModeArg,
    },
    /// Longest-chain height, at one element or everywhere.
    Height {
        file: PathBuf,
        #[arg(long)]
        from: Option<String>,
    },
    /// Whether the first relation is a seed of the second.
    Seed { r: PathBuf, s: PathBuf },
    /// Execute a loop file or an example on one input.
    Run {
        /// Example name or loop file.
        target: String,
        #[arg(long)]
        input: String,
        /// Print every state.
        #[arg(long)]
        trace: bool,
        /// Explore every resolution of the body's nondeterminism.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        example: ExampleArgs,
    },
    /// Check every loop obligation over an example's sweep or a loop file's inputs.
    Verify {
        /// Example name or loop file.
        target: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Describe the built-in examples.
    Examples {
        #[arg(long)]
        list: bool,
    },
    /// Property-test the contested claims.
    Audit {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Maxdepth,
    Minima,
}

impl From<ModeArg> for LimitMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Maxdepth => LimitMode::Maxdepth,
            ModeArg::Minima => LimitMode::ReachableMinima,
        }
    }
}

/// Per-example parameters that are not part of the input.
#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// Partition pivot.
    #[arg(long)]
    pub pivot: Option<i64>,
    /// Upper bound of the gcd state space (defaults to max(a, b)).
    #[arg(long)]
    pub bound: Option<i64>,
    /// Order for gcd.
    #[arg(long, value_enum, default_value_t = GcdOrderArg::Maxint)]
    pub gcd_order: GcdOrderArg,
    /// Binary-search choice for general_search_interval.
    #[arg(long)]
    pub midpoint: bool,
    /// Let interval sets hold overlapping intervals.
    #[arg(long)]
    pub overlapping: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GcdOrderArg {
    Maxint,
    Intsum,
}

/// Sweep bounds; unset flags take the example's standard value.
#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub a_max: Option<i64>,
    #[arg(long)]
    pub b_max: Option<i64>,
    #[arg(long)]
    pub len_max: Option<usize>,
    #[arg(long)]
    pub val_max: Option<i64>,
    #[arg(long)]
    pub x_max: Option<i64>,
    #[arg(long)]
    pub pivot_max: Option<i64>,
}

impl BoundArgs {
    fn apply(&self, name: ExampleName) -> SweepBounds {
        let d = SweepBounds::standard(name);
        SweepBounds {
            a_max: self.a_max.unwrap_or(d.a_max),
            b_max: self.b_max.unwrap_or(d.b_max),
            len_max: self.len_max.unwrap_or(d.len_max),
            val_max: self.val_max.unwrap_or(d.val_max),
            x_max: self.x_max.unwrap_or(d.x_max),
            pivot_max: self.pivot_max.unwrap_or(d.pivot_max),
        }
    }
}

/// A rendered command result.
struct Report {
    code: i32,
    text: String,
    json: serde_json::Value,
}

impl Report {
    fn new(code: i32, text: String, json: serde_json::Value) -> Self {
        Report { code, text, json }
    }
}

/// Parses `args` (program name first), runs the command and writes the report
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    set_max_space(cli.max_space);
    match dispatch(&cli) {
        Ok(report) => {
            let body = if cli.json { canonical_json(&report.json) } else { report.text };
            let _ = out.write_all(body.as_bytes());
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

/// Failing loop obligations and non-Noetherian inputs are checked properties;
/// everything else is malformed input or an exceeded limit.
fn error_code(e: &Error) -> i32 {
    match e {
        Error::NotNoetherian | Error::Loop(_) => EXIT_FAIL,
        _ => EXIT_ERROR,
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check { file } => check(file, cli.fuel),
        Command::Limit { file, from, mode } => limit(file, from.as_deref(), (*mode).into(), cli.fuel),
        Command::Height { file, from } => height(file, from.as_deref(), cli.fuel),
        Command::Seed { r, s } => seed(r, s),
        Command::Run { target, input, trace, all, example } => {
            run_loop(target, &input.parse()?, *trace, *all, example, cli.fuel)
        }
        Command::Verify { target, bounds } => verify_target(target, bounds, cli.fuel),
        Command::Examples { .. } => Ok(list_examples()),
        Command::Audit { seed, samples } => {
            let seed = match seed {
                Some(s) => *s,
                None => seed_from_env()?,
            };
            run_audit(seed, *samples)
        }
    }
}

fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::ParameterOutOfRange(format!("{SEED_ENV}={v:?} is not a natural number"))),
        Err(_) => Ok(0),
    }
}

fn json_of(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// `RULE(PREMISE, ...)`.
pub fn cert_string(c: &NoetherianCert) -> String {
    let mut s = c.rule.name();
    if !c.premises.is_empty() {
        let inner: Vec<String> = c.premises.iter().map(cert_string).collect();
        let _ = write!(s, "({})", inner.join(", "));
    }
    s
}

fn check(file: &Path, fuel: usize) -> Result<Report> {
    let r = read_json::<RelationFile>(file)?.build()?;
    let c = certify_with_fuel(&r, fuel);
    let v = &c.verdict;
    let method = json_of(v.method).as_str().unwrap_or_default().to_owned();
    let mut text = match (v.status, &c.cert) {
        (Status::Noetherian, Some(cert)) if v.method == noether::Method::Certificate => {
            format!("noetherian (certificate {})\n", cert_string(cert))
        }
        (Status::Noetherian, _) => format!("noetherian ({method})\n"),
        _ => failed_verdict_text(v),
    };
    if c.discrepancy {
        let cert = c.cert.as_ref().map(cert_string).unwrap_or_default();
        let _ = writeln!(text, "claimed certificate {cert} is refuted");
    }
    let code = match v.status {
        Status::Noetherian => EXIT_OK,
        Status::NotNoetherian => EXIT_FAIL,
        Status::UnknownFuelExhausted => EXIT_ERROR,
    };
    let json = json!({
        "command": "check",
        "status": v.status,
        "method": v.method,
        "witness": v.witness,
        "cert": c.cert,
        "discrepancy": c.discrepancy,
    });
    Ok(Report::new(code, text, json))
}

fn failed_verdict_text(v: &noether::NoetherianVerdict) -> String {
    match (v.status, &v.witness) {
        (Status::NotNoetherian, Some(w)) if w.first() == w.last() && w.length() > 0 => {
            format!("not Noetherian, cycle: {w}\n")
        }
        (Status::NotNoetherian, Some(w)) => format!("not Noetherian, chain: {w}\n"),
        (Status::UnknownFuelExhausted, Some(w)) => format!("unknown: fuel exhausted, longest chain explored: {w}\n"),
        (Status::UnknownFuelExhausted, None) => "unknown: fuel exhausted\n".to_owned(),
        _ => "not Noetherian\n".to_owned(),
    }
}

/// A failing report when `r` is not known to be Noetherian.
fn require_noetherian(command: &str, r: &Relation, fuel: usize) -> Option<Report> {
    let v = certify_with_fuel(r, fuel).verdict;
    let code = match v.status {
        Status::Noetherian => return None,
        Status::NotNoetherian => EXIT_FAIL,
        Status::UnknownFuelExhausted => EXIT_ERROR,
    };
    let text = failed_verdict_text(&v);
    let json = json!({ "command": command, "status": v.status, "witness": v.witness });
    Some(Report::new(code, text, json))
}

fn limit(file: &Path, from: Option<&str>, mode: LimitMode, fuel: usize) -> Result<Report> {
    let r = read_json::<RelationFile>(file)?.build()?;
    if let Some(report) = require_noetherian("limit", &r, fuel) {
        return Ok(report);
    }
    match from {
        Some(a) => {
            let a: Value = a.parse()?;
            let image = noether::limit_image(&r, &a, mode)?;
            let text = format!("{}\n", format_set(&image));
            let json = json!({ "command": "limit", "mode": mode, "from": a, "image": image });
            Ok(Report::new(EXIT_OK, text, json))
        }
        None => {
            let l = noether::limit(&r, mode)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for a in r.space().values()? {
                let image = l.image(a)?;
                let _ = writeln!(text, "{a} ↦ {}", format_set(&image));
                rows.push(json!({ "from": a, "image": image }));
            }
            let json = json!({ "command": "limit", "mode": mode, "limit": rows });
            Ok(Report::new(EXIT_OK, text, json))
        }
    }
}

fn height(file: &Path, from: Option<&str>, fuel: usize) -> Result<Report> {
    let r = read_json::<RelationFile>(file)?.build()?;
    if let Some(report) = require_noetherian("height", &r, fuel) {
        return Ok(report);
    }
    let points: Vec<Value> = match from {
        Some(a) => vec![a.parse()?],
        None => r.space().values()?.to_vec(),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for a in &points {
        let h = noether::height(&r, a)?;
        if from.is_some() {
            let _ = writeln!(text, "{h}");
        } else {
            let _ = writeln!(text, "{a}: {h}");
        }
        rows.push(json!({ "from": a, "height": h }));
    }
    let json = json!({ "command": "height", "heights": rows });
    Ok(Report::new(EXIT_OK, text, json))
}

fn seed(r: &Path, s: &Path) -> Result<Report> {
    let r = read_json::<RelationFile>(r)?.build()?;
    let s = read_json::<RelationFile>(s)?.build()?;
    let c = noether::seed_check(&r, &s)?;
    let mut text = String::new();
    if c.holds() {
        text.push_str("seed: r ⊆ s and the domains agree\n");
    } else {
        text.push_str("not a seed\n");
        if let Some((a, b)) = &c.pair_outside {
            let _ = writeln!(text, "  pair [{a}, {b}] of r is not in s");
        }
        if let Some(v) = &c.domain_mismatch {
            let _ = writeln!(text, "  {v} is in the domain of exactly one relation");
        }
    }
    let json = json!({
        "command": "seed",
        "seed": c.holds(),
        "pair_outside": c.pair_outside,
        "domain_mismatch": c.domain_mismatch,
    });
    Ok(Report::new(if c.holds() { EXIT_OK } else { EXIT_FAIL }, text, json))
}

/// Builds the single-input instance of an example from the input value.
fn example_params(name: ExampleName, input: &Value, args: &ExampleArgs) -> Result<Params> {
    let bad = || Error::InputOutsideSpace(input.clone());
    let search = || -> Result<(Vec<i64>, i64)> {
        let t = input.component(0).and_then(Value::as_seq).ok_or_else(bad)?;
        let x = input.component(1).and_then(Value::as_int).ok_or_else(bad)?;
        Ok((t.to_vec(), x))
    };
    let array = || input.as_seq().map(<[i64]>::to_vec).ok_or_else(bad);
    Ok(match name {
        ExampleName::Gcd => {
            let (a, b) = input.as_int_pair().ok_or_else(bad)?;
            let order = match args.gcd_order {
                GcdOrderArg::Maxint => GcdOrder::MaxInt,
                GcdOrderArg::Intsum => GcdOrder::IntSum,
            };
            Params::Gcd { a, b, bound: args.bound, order }
        }
        ExampleName::SeqSearch => {
            let (t, x) = search()?;
            Params::SeqSearch { t, x }
        }
        ExampleName::GeneralSearchInterval => {
            let (t, x) = search()?;
            Params::GeneralSearchInterval { t, x, midpoint: args.midpoint }
        }
        ExampleName::GeneralSearchIntervalset => {
            let (t, x) = search()?;
            Params::GeneralSearchIntervalset { t, x, disjoint: !args.overlapping }
        }
        ExampleName::Partition => {
            let pivot = args
                .pivot
                .ok_or_else(|| Error::ParameterOutOfRange("partition needs --pivot".into()))?;
            Params::Partition { t: array()?, pivot }
        }
        ExampleName::Lamsort => Params::Lamsort { t: array()? },
    })
}

fn load_loop(target: &str, input: Option<&Value>, args: Option<&ExampleArgs>) -> Result<LoopDef> {
    match (ExampleName::parse(target), input, args) {
        (Some(name), Some(input), Some(args)) => Ok(examples::instantiate(&example_params(name, input, args)?)?.lp),
        _ => read_json::<LoopFile>(Path::new(target))?.build(),
    }
}

fn run_loop(target: &str, input: &Value, trace: bool, all: bool, args: &ExampleArgs, fuel: usize) -> Result<Report> {
    let lp = load_loop(target, Some(input), Some(args))?;
    let post = lp.postcondition();
    let check = |t: &Value| post.map(|o| o.check(&lp, input, t));
    let mut text = String::new();
    let mut json = json!({ "command": "run", "target": target, "input": input });
    let holds = if all {
        let runs = lp.run_all(input, fuel)?;
        let verdicts: Vec<Option<bool>> = runs.terminals.iter().map(check).collect();
        let _ = writeln!(text, "terminals: {}", format_set(&runs.terminals));
        let _ = writeln!(text, "longest run: {} steps", runs.max_steps);
        let _ = writeln!(text, "states explored: {}", runs.states_explored);
        json["terminals"] = json_of(&runs.terminals);
        json["max_steps"] = json_of(runs.max_steps);
        json["states_explored"] = json_of(runs.states_explored);
        if verdicts.iter().any(Option::is_some) {
            Some(verdicts.iter().all(|v| *v == Some(true)))
        } else {
            None
        }
    } else {
        let t = lp.run(input, fuel)?;
        if trace {
            for (k, s) in t.states.iter().enumerate() {
                let _ = writeln!(text, "{k}: {s}");
            }
            json["states"] = json_of(&t.states);
        }
        let _ = writeln!(text, "terminal: {}", t.terminal);
        let _ = writeln!(text, "steps: {}", t.steps);
        json["terminal"] = json_of(&t.terminal);
        json["steps"] = json_of(t.steps);
        check(&t.terminal)
    };
    if let (Some(o), Some(h)) = (post, holds) {
        let _ = writeln!(text, "postcondition {}: {}", o.name(), if h { "holds" } else { "fails" });
        json["postcondition"] = json!({ "oracle": o.name(), "holds": h });
    }
    Ok(Report::new(if holds == Some(false) { EXIT_FAIL } else { EXIT_OK }, text, json))
}

fn verify_target(target: &str, bounds: &BoundArgs, fuel: usize) -> Result<Report> {
    let (report, header, extra) = match ExampleName::parse(target) {
        Some(name) => {
            let bounds = bounds.apply(name);
            let groups = examples::sweep(name, &bounds)?;
            let mut reports = Vec::with_capacity(groups.len());
            for g in &groups {
                reports.push(verify(&g.instantiate()?.lp, &InputSample::All, fuel));
            }
            let report = VerificationReport::merge(reports);
            let header = format!(
                "{name}: {} inputs in {} groups\n",
                report.stats.inputs_sampled,
                groups.len()
            );
            (report, header, json!({ "example": name, "bounds": bounds, "groups": groups.len() }))
        }
        None => {
            let lp = load_loop(target, None, None)?;
            let report = verify(&lp, &InputSample::All, fuel);
            let header = format!("{target}: {} inputs\n", report.stats.inputs_sampled);
            (report, header, json!({ "file": target }))
        }
    };
    let mut text = header;
    for o in &report.obligations {
        let outcome = match o.outcome {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "skipped",
        };
        let _ = write!(text, "  {:<24} {outcome}", o.name);
        if let (Outcome::Fail | Outcome::Skipped, Some(d)) = (o.outcome, &o.detail) {
            let _ = write!(text, ": {d}");
        }
        text.push('\n');
    }
    let _ = writeln!(
        text,
        "{} terminals checked, longest run {} steps",
        report.stats.terminals_checked, report.stats.max_steps
    );
    text.push_str(if report.passed { "all obligations pass\n" } else { "some obligations fail\n" });
    let mut json = json!({ "command": "verify", "target": target, "report": report });
    if let (Some(obj), serde_json::Value::Object(more)) = (json.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(Report::new(if report.passed { EXIT_OK } else { EXIT_FAIL }, text, json))
}

fn list_examples() -> Report {
    let mut text = String::new();
    let mut rows = Vec::new();
    for name in ExampleName::ALL {
        let _ = writeln!(text, "{:<28} {}", name.as_str(), name.summary());
        rows.push(json!({ "name": name, "summary": name.summary(), "oracle": example_oracle(name).name() }));
    }
    Report::new(EXIT_OK, text, json!({ "command": "examples", "examples": rows }))
}

fn example_oracle(name: ExampleName) -> Oracle {
    match name {
        ExampleName::Gcd => Oracle::Gcd,
        ExampleName::SeqSearch => Oracle::SeqMembership,
        ExampleName::GeneralSearchInterval => Oracle::IntervalMembership,
        ExampleName::GeneralSearchIntervalset => Oracle::IntervalsetMembership,
        ExampleName::Partition => Oracle::PartitionSplit,
        ExampleName::Lamsort => Oracle::SortedPermutation,
    }
}

fn run_audit(seed: u64, samples: usize) -> Result<Report> {
    let findings = audit::audit(seed, samples)?;
    let mut text = format!("audit with seed {seed}, {samples} samples per case\n");
    for f in &findings {
        text.push_str(&render_finding(f));
    }
    let json = json!({ "command": "audit", "seed": seed, "samples": samples, "findings": findings });
    Ok(Report::new(EXIT_OK, text, json))
}

fn render_finding(f: &AuditFinding) -> String {
    let name = |v: serde_json::Value| v.as_str().unwrap_or_default().to_owned();
    let mut s = format!(
        "{:<24} {:<13} {:<21} n={}",
        name(json_of(f.claim)),
        name(json_of(f.case)),
        name(json_of(f.status)),
        f.sample_size
    );
    if !f.modes.is_empty() {
        let modes: Vec<String> = f.modes.iter().map(|m| name(json_of(m))).collect();
        let _ = write!(s, " modes={}", modes.join(","));
    }
    s.push('\n');
    if let (AuditStatus::CounterexampleFound, Some(cx)) = (f.status, &f.counterexample) {
        let pairs = |r: &RelationFile| match &r.relation {
            crate::catalog::CatalogExpr::Extensional { pairs } => {
                let items: BTreeSet<String> = pairs.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
                format!("{{{}}}", items.into_iter().collect::<Vec<_>>().join(", "))
            }
            other => format!("{other:?}"),
        };
        let _ = writeln!(s, "  r = {}", pairs(&cx.r));
        let _ = writeln!(s, "  s = {}", pairs(&cx.s));
        if let Some(mode) = cx.mode {
            let _ = writeln!(s, "  mode {}", name(json_of(mode)));
        }
        let _ = writeln!(s, "  {}", cx.note);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("noet").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = call(&["check"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(!err.is_empty());
        assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn run_example_with_trace() {
        let (code, out, _) = call(&["run", "gcd", "--input", "(12, 8)", "--trace"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "0: (12, 8)\n1: (4, 8)\n2: (4, 4)\nterminal: (4, 4)\nsteps: 2\npostcondition gcd: holds\n");
        let (code, _, err) = call(&["run", "partition", "--input", "[6, 2, 8, 4]"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("--pivot"));
    }

    #[test]
    fn missing_file_exits_2() {
        assert_eq!(call(&["check", "/nonexistent/r.json"]).0, EXIT_ERROR);
    }
}
