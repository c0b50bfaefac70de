use std::path::{Path, PathBuf};
use std::process::Command;

use eptl::datatypes::counter_get_oracle;
use eptl::{fixtures, load_execution, AbstractExecution, TraceDocument, Value};
use eptl_cli::{run, Outcome, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};

const SPEC_MVR: &str = "G(put(a) => AX((get() contains a) W put(_)))";

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn eptl(args: &[&str]) -> Outcome {
    run(std::iter::once("eptl").chain(args.iter().copied()))
}

fn write_trace(dir: &Path, name: &str, exec: &AbstractExecution) -> String {
    let path = dir.join(name);
    std::fs::write(&path, TraceDocument::from_execution(exec).to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_reference_verdicts() {
    let ok = eptl(&["check", &fixture("fig1.json"), SPEC_MVR]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.stdout);
    let bad = eptl(&["check", &fixture("fig4.json"), SPEC_MVR]);
    assert_eq!(bad.code, EXIT_VIOLATION);
    assert!(bad.stdout.contains("fails at e3"), "{}", bad.stdout);
    assert_eq!(
        eptl(&["check", &fixture("fig1.json"), "true"]).code,
        EXIT_OK
    );
}

#[test]
fn check_json_report() {
    let out = eptl(&["check", &fixture("fig4.json"), SPEC_MVR, "--json"]);
    assert_eq!(out.code, EXIT_VIOLATION);
    let j: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["satisfied"], false);
    let failures = j["failures"].as_array().unwrap();
    assert!(failures
        .iter()
        .any(|f| f["start"] == "e1" && f["event"] == "e3" && f["interpretation"]["a"] == 0));
    assert!(j["returns"].is_null());
}

#[test]
fn check_datatype_validation() {
    let out = eptl(&[
        "check",
        &fixture("fig4.json"),
        "true",
        "--datatype",
        "mvr",
        "--json",
    ]);
    assert_eq!(out.code, EXIT_VIOLATION);
    let j: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(j["satisfied"], true);
    assert_eq!(j["returns"]["valid"], false);
    assert_eq!(j["returns"]["mismatches"][0]["event"], "e3");
    assert_eq!(
        j["returns"]["mismatches"][0]["expected"],
        serde_json::json!({"set": [0]})
    );

    assert_eq!(
        eptl(&["check", &fixture("fig1.json"), "true", "--datatype", "mvr"]).code,
        EXIT_OK
    );
    // Operations outside the datatype are an input error.
    assert_eq!(
        eptl(&[
            "check",
            &fixture("law_ax_or.json"),
            "true",
            "--datatype",
            "mvr"
        ])
        .code,
        EXIT_INPUT
    );
}

#[test]
fn check_formula_file_domain_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let ffile = dir.path().join("f.eptl");
    std::fs::write(&ffile, format!("{SPEC_MVR}\n")).unwrap();
    let dot = dir.path().join("g.dot");
    let out = eptl(&[
        "check",
        &fixture("fig4.json"),
        "--formula-file",
        ffile.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_VIOLATION);
    let dot_text = std::fs::read_to_string(&dot).unwrap();
    assert!(dot_text.starts_with("digraph"));
    assert!(dot_text.contains("\"e1\" -> \"e2\""));

    // Only interpretations with a = 1 are tried; Figure 4 passes them.
    let out = eptl(&["check", &fixture("fig4.json"), SPEC_MVR, "--domain", "1"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("1 interpretation"));
    let out = eptl(&["check", &fixture("fig4.json"), SPEC_MVR, "--domain", "0,1"]);
    assert_eq!(out.code, EXIT_VIOLATION);
}

#[test]
fn check_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.json");
    std::fs::write(
        &cyclic,
        r#"{"events":[{"id":"a","op":"x"},{"id":"b","op":"x"}],"vis":[["a","b"],["b","a"]]}"#,
    )
    .unwrap();
    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, "{\"events\": [").unwrap();

    for args in [
        vec!["check", &fixture("fig1.json") as &str, "G(put(a) =>"],
        vec!["check", "/nonexistent/trace.json", "true"],
        vec!["check", cyclic.to_str().unwrap(), "true"],
        vec!["check", malformed.to_str().unwrap(), "true"],
        vec!["check", &fixture("fig1.json")],
        vec!["check", &fixture("fig1.json"), "put(a)", "--domain", ""],
    ] {
        let out = eptl(&args);
        assert_eq!(out.code, EXIT_INPUT, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = eptl(&["check", cyclic.to_str().unwrap(), "true"]);
    assert!(out.stderr.contains("cyclic"), "{}", out.stderr);
}

#[test]
fn gen_counter_chain() {
    let out = eptl(&[
        "gen",
        "--replicas",
        "1",
        "--ops",
        "3",
        "--datatype",
        "counter",
        "--seed",
        "7",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let a = load_execution(&out.stdout).unwrap();
    assert_eq!(a.linear_extensions(10).unwrap().len(), 1);
    for e in a.events().iter().filter(|e| e.op.name == "get") {
        let prior_incs = a
            .events()
            .iter()
            .filter(|x| x.op.name == "inc" && a.lt(x.id.as_str(), e.id.as_str()).unwrap())
            .count() as i64;
        assert_eq!(e.op.ret, Some(Value::Int(prior_incs)));
        assert_eq!(counter_get_oracle(&a, e.id.as_str()).unwrap(), prior_incs);
    }
}

#[test]
fn gen_without_merges_has_no_cross_replica_edges() {
    for seed in 0..20 {
        let out = eptl(&[
            "gen",
            "--replicas",
            "2",
            "--merge-prob",
            "0",
            "--ops",
            "4",
            "--seed",
            &seed.to_string(),
        ]);
        let a = load_execution(&out.stdout).unwrap();
        for (x, y) in a.closure() {
            assert_eq!(
                a.event(x.as_str()).unwrap().replica,
                a.event(y.as_str()).unwrap().replica
            );
        }
    }
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    for p in [&p1, &p2] {
        let out = eptl(&[
            "gen",
            "--replicas",
            "3",
            "--ops",
            "12",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.code, EXIT_OK);
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let out = eptl(&[
        "check",
        p1.to_str().unwrap(),
        eptl::CANONICAL_MVR_FORMULA,
        "--datatype",
        "mvr",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("returns: valid mvr execution"));
}

#[test]
fn gen_rejects_bad_configs() {
    for args in [
        vec!["gen", "--replicas", "0"],
        vec!["gen", "--ops", "0"],
        vec!["gen", "--merge-prob", "1.5"],
        vec!["gen", "--replicas", "2", "--merge-prob", "1"],
        vec!["gen", "--datatype", "queue"],
    ] {
        assert_eq!(eptl(&args).code, EXIT_INPUT, "{args:?}");
    }
}

#[test]
fn laws_single_entries() {
    let out = eptl(&[
        "laws",
        "--law",
        "ax-implies-ex",
        "--max-events",
        "3",
        "--props",
        "1",
        "--json",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    let j: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(j["schema_version"], 1);
    let law = &j["laws"][0];
    assert_eq!(law["law"], "ax-implies-ex");
    assert_eq!(law["fixture_refutes"], true);
    let cx = &law["counterexample"];
    assert_eq!(
        (cx["lhs"].as_bool(), cx["rhs"].as_bool()),
        (Some(true), Some(false))
    );
    // The snippet is a loadable trace, and the failing event is a last event.
    let a = load_execution(&cx["trace"].to_string()).unwrap();
    assert!(a.last_events().iter().any(|e| e.as_str() == cx["event"]));

    let out = eptl(&[
        "laws",
        "--law",
        "not-ex",
        "--max-events",
        "3",
        "--props",
        "1",
    ]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("holds"));
    assert!(out.stdout.contains("1/1 entries as expected"));
}

#[test]
fn laws_bounds() {
    assert_eq!(eptl(&["laws", "--max-events", "99"]).code, EXIT_INPUT);
    assert_eq!(eptl(&["laws", "--props", "4"]).code, EXIT_INPUT);
}

#[test]
fn serialize_listings() {
    let out = eptl(&["serialize", &fixture("fig1.json")]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(
        out.stdout,
        "e1,e2,e3,e4,e5\ne1,e3,e2,e4,e5\ne1,e3,e4,e2,e5\n"
    );

    let dir = tempfile::tempdir().unwrap();
    let chain = write_trace(dir.path(), "chain.json", &fixtures::access_control());
    assert_eq!(eptl(&["serialize", &chain]).stdout.lines().count(), 1);

    let antichain = dir.path().join("anti.json");
    std::fs::write(
        &antichain,
        r#"{"events":[{"id":"a","op":"x"},{"id":"b","op":"x"},{"id":"c","op":"x"}],"vis":[]}"#,
    )
    .unwrap();
    let out = eptl(&["serialize", antichain.to_str().unwrap()]);
    assert_eq!(
        out.stdout.lines().collect::<Vec<_>>(),
        ["a,b,c", "a,c,b", "b,a,c", "b,c,a", "c,a,b", "c,b,a"]
    );

    let out = eptl(&["serialize", antichain.to_str().unwrap(), "--bound", "2"]);
    assert_eq!(out.code, EXIT_INPUT);
}

/// Exit codes and stream routing as seen by a shell.
#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_eptl");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["check", &fixture("fig1.json"), SPEC_MVR]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("satisfied"));
    assert_eq!(
        status(&["check", &fixture("fig4.json"), SPEC_MVR])
            .status
            .code(),
        Some(1)
    );
    let bad = status(&["check", &fixture("fig1.json"), "G("]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
}
