mod common;

#[test]
fn golden_outputs_and_exit_codes() {
    let problems = common::check_goldens();
    assert!(problems.is_empty(), "{}", problems.join("\n"));
}

#[test]
fn corpus_round_trips_byte_identically() {
    let (files, problems) = common::check_corpus();
    assert_eq!(files, 20);
    assert!(problems.is_empty(), "{}", problems.join("\n"));
}

#[test]
fn audit_seed_comes_from_the_environment() {
    let run = |seed: Option<&str>, args: &[&str]| {
        let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_noet"));
        cmd.env_remove("NOET_SEED");
        if let Some(s) = seed {
            cmd.env("NOET_SEED", s);
        }
        let out = cmd.args(["--json", "audit", "--samples", "50"]).args(args).output().unwrap();
        (out.status.code(), String::from_utf8(out.stdout).unwrap())
    };
    let (code, default) = run(None, &[]);
    assert_eq!(code, Some(0));
    assert!(default.contains("\"seed\": 0"));
    let (_, from_env) = run(Some("17"), &[]);
    assert!(from_env.contains("\"seed\": 17"));
    assert_eq!(from_env, run(None, &["--seed", "17"]).1);
    assert_eq!(run(Some("x"), &[]).0, Some(2));
}

#[test]
fn printed_counterexamples_recheck_through_the_cli() {
    let dir = std::env::temp_dir().join(format!("noet-recheck-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let findings = noet::cli::audit::audit(0, 100).unwrap();
    for f in findings.iter().filter(|f| f.counterexample.is_some()) {
        let cx = f.counterexample.as_ref().unwrap();
        let r = dir.join("r.json");
        let s = dir.join("s.json");
        std::fs::write(&r, noet::cli::files::canonical_json(&cx.r)).unwrap();
        std::fs::write(&s, noet::cli::files::canonical_json(&cx.s)).unwrap();
        let run = |args: &[&std::ffi::OsStr]| {
            std::process::Command::new(env!("CARGO_BIN_EXE_noet")).args(args).output().unwrap()
        };
        if let Some(composed) = &cx.composed {
            let c = dir.join("c.json");
            std::fs::write(&c, noet::cli::files::canonical_json(composed)).unwrap();
            assert_eq!(run(&[ "check".as_ref(), r.as_os_str()]).status.code(), Some(0));
            assert_eq!(run(&[ "check".as_ref(), s.as_os_str()]).status.code(), Some(0));
            assert_eq!(run(&[ "check".as_ref(), c.as_os_str()]).status.code(), Some(1));
        } else if f.claim == noet::cli::audit::Claim::LimitSubsetTheorem {
            assert_eq!(run(&["seed".as_ref(), r.as_os_str(), s.as_os_str()]).status.code(), Some(0));
            let at = cx.at.as_ref().unwrap().to_string();
            let mode = if cx.mode == Some(noet::noether::LimitMode::Maxdepth) { "maxdepth" } else { "minima" };
            let lr = run(&["limit".as_ref(), r.as_os_str(), "--from".as_ref(), at.as_ref(), "--mode".as_ref(), mode.as_ref()]);
            let ls = run(&["limit".as_ref(), s.as_os_str(), "--from".as_ref(), at.as_ref(), "--mode".as_ref(), mode.as_ref()]);
            assert_ne!(lr.stdout, ls.stdout);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}
