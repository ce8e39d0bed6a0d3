use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn coopsynt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopsynt")).args(args).env("COOPSYNT_COLOR", "0").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synthesize(dir: &Path, a: &str, g: &str) -> PathBuf {
    let machine = dir.join("machine.txt");
    let out = coopsynt(&["synthesize", path(&fixture(a)), path(&fixture(g)), "-o", path(&machine)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    machine
}

fn level_name(line: &str) -> String {
    let rest = line.trim_start().split_once("  ").unwrap().1;
    rest.strip_suffix("  gray").unwrap_or(rest).to_string()
}

#[test]
fn hierarchy_lists_levels_in_preference_order() {
    let out = coopsynt(&["hierarchy"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 14);
    assert!(lines[0].contains("A*G") && lines[0].ends_with("gray"));
    assert!(lines[13].trim_end().ends_with("GE(A->G)"));
}

#[test]
fn hierarchy_edges_and_dot() {
    let out = coopsynt(&["hierarchy", "--edges"]);
    assert_eq!(stdout(&out).lines().count(), 19);
    let out = coopsynt(&["hierarchy", "--dot", "-"]);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
}

#[test]
fn preference_file_reorders_incomparable_levels() {
    let dir = tempfile::tempdir().unwrap();
    let default = stdout(&coopsynt(&["hierarchy"]));
    let mut levels: Vec<String> = default.lines().map(level_name).collect();
    // A & GE(G) is incomparable with every level it overtakes
    let j = levels.iter().position(|l| l == "A & GE(G)").unwrap();
    let moved = levels.remove(j);
    levels.insert(1, moved);
    let pref = dir.path().join("pref.txt");
    std::fs::write(&pref, levels.join("\n")).unwrap();
    let out = coopsynt(&["hierarchy", "--preference", path(&pref)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).lines().nth(1).unwrap().contains("A & GE(G)"));
    // a preference that puts a weaker level first is rejected
    levels.swap(0, 13);
    std::fs::write(&pref, levels.join("\n")).unwrap();
    assert_eq!(coopsynt(&["hierarchy", "--preference", path(&pref)]).status.code(), Some(1));
}

#[test]
fn synthesize_writes_machine_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let machine = dir.path().join("m.txt");
    let out = coopsynt(&[
        "synthesize",
        path(&fixture("trigger_ack_assumptions.dra")),
        path(&fixture("trigger_ack_guarantees.dra")),
        "-o",
        path(&machine),
        "--report",
        path(&report),
        "--stats",
    ]);
    assert!(out.status.success());
    let stats: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(stats["parity_vertices"].as_u64().unwrap() > 0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["levels"].as_array().unwrap().len(), 14);
    assert_eq!(report["switch_edges"].as_array().unwrap().len(), 1);
    assert_eq!(report["switch_edges"][0]["input"], "ack");
    let text = std::fs::read_to_string(&machine).unwrap();
    assert!(text.starts_with("mealy strategy"));
    assert!(text.contains("level: m0 "));
}

#[test]
fn synthesis_is_deterministic() {
    let (a, g) = (fixture("hub_assumptions.dra"), fixture("hub_guarantees.dra"));
    let args = ["synthesize", path(&a), path(&g)];
    let runs: Vec<String> = (0..3).map(|_| stdout(&coopsynt(&args))).collect();
    assert!(!runs[0].is_empty());
    assert!(runs.iter().all(|r| r == &runs[0]));
}

#[test]
fn nothing_realizable_exits_with_two() {
    // A asks for x0 first and G never holds: A fails on the x1 branch and
    // A->G on the x0 branch, at the root and at every later node
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("first_x0.dra");
    let text = "dra first_x0\ninputs: x0 x1\noutputs: y0\nstates: a0 ok bad initial a0\n\
                trans: a0 x0 * -> ok\ntrans: a0 x1 * -> bad\ntrans: ok * * -> ok\ntrans: bad * * -> bad\npair: { } { ok }\n";
    std::fs::write(&a, text).unwrap();
    let g = fixture("unsatisfiable_guarantees.dra");
    let out = coopsynt(&["synthesize", path(&a), path(&g)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_input_exits_with_one() {
    assert_eq!(coopsynt(&["synthesize", "/nonexistent.dra", "/nonexistent.dra"]).status.code(), Some(1));
    assert_eq!(coopsynt(&["bogus"]).status.code(), Some(1));
    assert_eq!(coopsynt(&["--version"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.dra");
    std::fs::write(&broken, "dra broken\ninputs: a\n").unwrap();
    let out = coopsynt(&["synthesize", path(&broken), path(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

#[test]
fn check_reports_conjuncts_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let m = synthesize(dir.path(), "trigger_ack_assumptions.dra", "trigger_ack_guarantees.dra");
    let (a, g) = (fixture("trigger_ack_assumptions.dra"), fixture("trigger_ack_guarantees.dra"));
    let out = coopsynt(&["check", path(&m), path(&a), path(&g), "--level", "A*G"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["satisfied"], false);
    let failing: Vec<&Value> = v["conjuncts"].as_array().unwrap().iter().filter(|c| c["satisfied"] == false).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|c| !c["witness_lasso"]["cycle"].as_array().unwrap().is_empty()));
    let out = coopsynt(&["check", path(&m), path(&a), path(&g), "--level", "A*G", "--after", "ack"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["satisfied"], true);
    assert_eq!(v["after"], serde_json::json!(["ack"]));
}

#[test]
fn classify_matches_annotations() {
    let dir = tempfile::tempdir().unwrap();
    let m = synthesize(dir.path(), "trigger_ack_assumptions.dra", "trigger_ack_guarantees.dra");
    let (a, g) = (fixture("trigger_ack_assumptions.dra"), fixture("trigger_ack_guarantees.dra"));
    let out = coopsynt(&["classify", path(&m), path(&a), path(&g)]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let text = std::fs::read_to_string(&m).unwrap();
    let level = text.lines().find_map(|l| l.strip_prefix("level: m0 ")).unwrap();
    assert_eq!(v["maximal"], serde_json::json!([level]));
}

#[test]
fn simulate_marks_switches() {
    let dir = tempfile::tempdir().unwrap();
    let m = synthesize(dir.path(), "trigger_ack_assumptions.dra", "trigger_ack_guarantees.dra");
    let out = stdout(&coopsynt(&["simulate", path(&m), "--inputs", "ack,noack,ack"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("initial m0 level="));
    assert_eq!(lines.len(), 5);
    assert!(lines[1].ends_with("(switch)"));
    assert_eq!(lines[4], "level switches: 1");
    let out = stdout(&coopsynt(&["simulate", path(&m), "--inputs", "noack,ack"]));
    assert!(out.ends_with("level switches: 0\n"));
    let empty = stdout(&coopsynt(&["simulate", path(&m), "--inputs", ""]));
    assert_eq!(empty.lines().count(), 1);
    let r1 = stdout(&coopsynt(&["simulate", path(&m), "--random", "20", "--seed", "3"]));
    let r2 = stdout(&coopsynt(&["simulate", path(&m), "--random", "20", "--seed", "3"]));
    assert_eq!(r1, r2);
    assert_eq!(r1.lines().count(), 22);
    assert_eq!(coopsynt(&["simulate", path(&m), "--inputs", "nope"]).status.code(), Some(1));
}
