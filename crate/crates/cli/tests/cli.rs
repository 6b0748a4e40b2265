use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const PARTIAL_COMMITMENT: &str = "P1 = STOP; P2 = STOP; P3 = STOP; P4 = STOP; P5 = STOP;
(o -> P1 [] p -> P2) |[o, p]| (o -> P3 [] p -> P4 [] q -> P5)";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csp2ccs")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn central_bisimilarity_of_a_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["check", "-c", "bisim", "--coordinator", "central", "a -> STOP", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = read_json(&report);
    assert_eq!(r["schema"], "v1");
    assert_eq!(r["term"], "a -> STOP");
    assert_eq!(r["coordinator"], "central");
    assert_eq!(r["criteria"]["bisim"]["result"], "true");
    assert_eq!(r["criteria"]["bisim"]["claimed"], true);
    for key in ["nodes", "edges", "simEdges", "truncated"] {
        assert!(r["graph"].get(key).is_some(), "missing graph.{key}");
    }
}

#[test]
fn decentral_partial_commitment_is_coupled_but_not_bisimilar() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["check", "-c", "bisim", "--coordinator", "decentral", PARTIAL_COMMITMENT, "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = read_json(&report);
    assert_eq!(r["criteria"]["bisim"]["result"], "false");
    assert_eq!(r["criteria"]["bisim"]["claimed"], false);
    let o = run(&["check", "-c", "coupled", "--coordinator", "decentral", PARTIAL_COMMITMENT]);
    assert_eq!(code(&o), 0);
    // the claimed criteria hold
    let o = run(&["check", "--coordinator", "decentral", PARTIAL_COMMITMENT]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn explore_writes_dot_with_highlighted_loop() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("div.dot");
    let o = run(&["explore", "DIV", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("diverges: true"));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("n0 -> n0 [color=red"), "{text}");
}

#[test]
fn explore_report_and_source_graph() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("e.json");
    let o = run(&["explore", "a -> STOP |[]| b -> STOP", "--coordinator", "decentral", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = read_json(&report);
    assert_eq!(r["coordinator"], "decentral");
    assert_eq!(r["graph"]["lockViolations"], 0);
    let o = run(&["explore", "--source", "a -> STOP |~| b -> STOP"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("nodes: 4"), "{}", stdout(&o));
}

#[test]
fn parse_prints_normal_form() {
    let o = run(&["parse", "a->STOP[]b->STOP"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "a -> STOP [] b -> STOP");
    let o = run(&["parse", PARTIAL_COMMITMENT]);
    assert_eq!(stdout(&o).trim(), "o -> STOP [] p -> STOP |[o, p]| o -> STOP [] p -> STOP [] q -> STOP");
    let o = run(&["parse", "--target", "(new x) (x<> | x().TICK)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "(new x) (x<> | x().TICK)");
}

#[test]
fn encode_output_parses_as_target() {
    let o = run(&["encode", "--coordinator", "decentral", "a -> STOP"]);
    assert_eq!(code(&o), 0);
    let again = run(&["parse", "--target", stdout(&o).trim()]);
    assert_eq!(code(&again), 0);
}

#[test]
fn term_from_stdin_and_file() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_csp2ccs"))
        .args(["parse", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"TICK |~| DIV").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o).trim(), "TICK |~| DIV");
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.csp");
    std::fs::write(&file, "mu X . a -> X").unwrap();
    let o = run(&["check", "--file", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn input_errors_exit_with_three() {
    assert_eq!(code(&run(&["parse", "a ->"])), 3);
    assert_eq!(code(&run(&["parse", "X"])), 3);
    assert_eq!(code(&run(&["check", "-c", "nonsense", "STOP"])), 3);
    assert_eq!(code(&run(&["check", "--frobnicate", "STOP"])), 3);
    assert_eq!(code(&run(&["encode", "STOP", "--dot", "x.dot"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
}

#[test]
fn io_errors_exit_with_four() {
    assert_eq!(code(&run(&["parse", "--file", "/nonexistent/term.csp"])), 4);
    assert_eq!(code(&run(&["check", "STOP", "--report", "/nonexistent/dir/r.json"])), 4);
    assert_eq!(code(&run(&["corpus", "--seed-corpus", "/nonexistent/c.json"])), 4);
}

#[test]
fn truncation_exits_with_two() {
    let o = run(&["check", "-c", "bisim", "--budget", "3", "a -> b -> c -> STOP"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
}

#[test]
fn seed_corpus_replaces_builtin_terms() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    std::fs::write(&seed, r#"[{"id": "one", "term": "a -> STOP"}, {"id": "two", "term": "TICK |~| STOP"}]"#).unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["corpus", "--seed-corpus", seed.to_str().unwrap(), "--coordinator", "central", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = read_json(&report);
    assert_eq!(r.as_array().unwrap().len(), 2);
    assert_eq!(r[1]["term"], "TICK |~| STOP");
    std::fs::write(&seed, r#"{"id": "one"}"#).unwrap();
    assert_eq!(code(&run(&["corpus", "--seed-corpus", seed.to_str().unwrap()])), 3);
    std::fs::write(&seed, r#"[{"id": "bad", "term": "a ->"}]"#).unwrap();
    assert_eq!(code(&run(&["corpus", "--seed-corpus", seed.to_str().unwrap()])), 3);
}

#[test]
fn builtin_corpus_meets_claimed_criteria() {
    let o = run(&["corpus"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 30);
}

#[test]
fn centralised_encoding_is_not_distributable() {
    let o = run(&["check", "-c", "distributability", "a -> STOP |[]| b -> STOP"]);
    assert_eq!(code(&o), 1);
    let o = run(&["check", "-c", "distributability", "--coordinator", "decentral", "a -> STOP |[]| b -> STOP"]);
    assert_eq!(code(&o), 0);
}
