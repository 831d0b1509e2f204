//! Shared CLI golden cases and the serialization corpus.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn test_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

/// One case per subcommand outcome; each runs in text and `--json` mode.
pub const CASES: &[Case] = &[
    Case { name: "check_cycle", args: &["check", "fixtures/cycle.json"], code: 1 },
    Case { name: "check_pred", args: &["check", "fixtures/pred.json"], code: 0 },
    Case { name: "check_projection", args: &["check", "fixtures/projection.json"], code: 0 },
    Case { name: "check_compose", args: &["check", "fixtures/compose.json"], code: 1 },
    Case { name: "limit_from", args: &["limit", "fixtures/pred.json", "--from", "2"], code: 0 },
    Case { name: "limit_minima", args: &["limit", "fixtures/branch.json"], code: 0 },
    Case { name: "limit_maxdepth", args: &["limit", "fixtures/branch.json", "--mode", "maxdepth"], code: 0 },
    Case { name: "limit_cycle", args: &["limit", "fixtures/cycle.json", "--from", "1"], code: 1 },
    Case { name: "height_from", args: &["height", "fixtures/branch.json", "--from", "a"], code: 0 },
    Case { name: "height_all", args: &["height", "fixtures/branch.json"], code: 0 },
    Case { name: "seed_holds", args: &["seed", "fixtures/seed_r.json", "fixtures/seed_s.json"], code: 0 },
    Case { name: "seed_fails", args: &["seed", "fixtures/seed_s.json", "fixtures/seed_r.json"], code: 1 },
    Case { name: "run_gcd_trace", args: &["run", "gcd", "--input", "(12, 8)", "--trace"], code: 0 },
    Case { name: "run_binary_search", args: &["run", "general_search_interval", "--input", "<[1, 3, 5, 7], 5>", "--midpoint", "--trace"], code: 0 },
    Case { name: "run_partition", args: &["run", "partition", "--input", "[6, 2, 8, 4]", "--pivot", "5"], code: 0 },
    Case { name: "run_lamsort_all", args: &["run", "lamsort", "--input", "[3, 1, 2]", "--all"], code: 0 },
    Case { name: "run_loop_file", args: &["run", "fixtures/countdown_loop.json", "--input", "4", "--trace"], code: 0 },
    Case { name: "run_fuel", args: &["run", "fixtures/countdown_loop.json", "--input", "5", "--fuel", "2"], code: 2 },
    Case { name: "verify_gcd", args: &["verify", "gcd", "--a-max", "12", "--b-max", "12"], code: 0 },
    Case { name: "verify_seq_search", args: &["verify", "seq_search", "--len-max", "3", "--val-max", "2", "--x-max", "2"], code: 0 },
    Case { name: "verify_loop_file", args: &["verify", "fixtures/countdown_loop.json"], code: 0 },
    Case { name: "verify_bad_loop", args: &["verify", "fixtures/bad_loop.json"], code: 1 },
    Case { name: "examples_list", args: &["examples", "--list"], code: 0 },
    Case { name: "audit", args: &["audit", "--samples", "200"], code: 0 },
    Case { name: "malformed", args: &["check", "fixtures/malformed.json"], code: 2 },
    Case { name: "bad_value", args: &["limit", "fixtures/pred.json", "--from", "(1,"], code: 2 },
    Case { name: "usage", args: &["limit"], code: 2 },
];

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn noet(args: &[&str], json: bool) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_noet"));
    cmd.current_dir(test_dir()).env_remove("NOET_SEED");
    if json {
        cmd.arg("--json");
    }
    let out = cmd.args(args).output().expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

/// Runs every case in both modes against the golden files. With
/// `UPDATE_GOLDEN=1` the golden files are rewritten instead. Returns the
/// mismatches.
pub fn check_goldens() -> Vec<String> {
    let update = std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let mut problems = Vec::new();
    for case in CASES {
        for json in [false, true] {
            let out = noet(case.args, json);
            let label = format!("{}{}", case.name, if json { " --json" } else { "" });
            if out.code != case.code {
                problems.push(format!("{label}: exit {} (expected {}), stderr {:?}", out.code, case.code, out.stderr));
            }
            if case.code == 2 && (out.stderr.is_empty() || !out.stdout.is_empty()) {
                problems.push(format!("{label}: errors belong on stderr only"));
            }
            let path = test_dir().join("golden").join(format!("{}.{}", case.name, if json { "json" } else { "txt" }));
            if update {
                std::fs::write(&path, &out.stdout).expect("write golden");
                continue;
            }
            match std::fs::read_to_string(&path) {
                Ok(expected) if expected == out.stdout => {}
                Ok(_) => problems.push(format!("{label}: output differs from {}", path.display())),
                Err(e) => problems.push(format!("{label}: {}: {e}", path.display())),
            }
        }
    }
    problems
}

/// Parses every corpus file by its name prefix and re-serializes it; the
/// result must equal the file byte for byte, twice over. Returns the number
/// of files and the mismatches.
pub fn check_corpus() -> (usize, Vec<String>) {
    use noet::catalog::{CatalogExpr, SpaceExpr};
    use noet::cli::audit::AuditFinding;
    use noet::cli::files::{canonical_json, parse_json, LoopFile, RelationFile};
    use noet::Value;

    fn again<T: serde::Serialize + for<'de> serde::Deserialize<'de>>(text: &str) -> Result<String, String> {
        let first: T = parse_json(text, "corpus").map_err(|e| e.to_string())?;
        let s1 = canonical_json(&first);
        let second: T = parse_json(&s1, "corpus").map_err(|e| e.to_string())?;
        let s2 = canonical_json(&second);
        if s1 != s2 {
            return Err("second round trip differs".into());
        }
        Ok(s1)
    }

    let mut entries: Vec<PathBuf> = std::fs::read_dir(test_dir().join("corpus"))
        .expect("corpus dir")
        .map(|e| e.expect("entry").path())
        .collect();
    entries.sort();
    let mut problems = Vec::new();
    for path in &entries {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(path).expect("read corpus file");
        let result = match name.split('_').next().unwrap_or("") {
            "space" => again::<SpaceExpr>(&text),
            "relation" => again::<RelationFile>(&text),
            "expr" => again::<CatalogExpr>(&text),
            "loop" => again::<LoopFile>(&text),
            "finding" => again::<AuditFinding>(&text),
            "value" => again::<Value>(&text),
            other => Err(format!("unknown corpus kind {other:?}")),
        };
        match result {
            Ok(s) if s == text => {}
            Ok(_) => problems.push(format!("{name}: canonical form differs from the file")),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    (entries.len(), problems)
}
