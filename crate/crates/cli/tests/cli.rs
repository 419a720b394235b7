use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_uphocore");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("UPHOCORE_WORD_CAP").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn alternating_monoid_is_not_certified_a_lattice() {
    let dir = TempDir::new().unwrap();
    let mono = write(&dir, "blah2.mono", "gens: a b\nrel: abb = baa\n");
    let json = dir.path().join("blah2.json");
    let built = run(&["build", "--in", s(&mono), "--depth", "6", "--out", s(&json)]);
    assert_eq!(built.status.code(), Some(0), "{}", stderr(&built));
    let checked = run(&["check-lattice", "--in", s(&json)]);
    assert_eq!(checked.status.code(), Some(1));
    let out = stdout(&checked);
    assert!(out.contains("no common upper bound") || out.contains("minimal upper bounds"), "{out}");

    let structured = run(&["check-lattice", "--in", s(&json), "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_slice(&structured.stdout).unwrap();
    assert!(matches!(v["verdict"].as_str(), Some("JoinMissing" | "JoinAmbiguity")), "{v}");
}

#[test]
fn dominating_lattice_rank_series() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("d3.json");
    let c = run(&["construct", "dn", "--n", "3", "--depth", "4", "--out", s(&json)]);
    assert_eq!(c.status.code(), Some(0), "{}", stderr(&c));
    let a = run(&["analyze", "--in", s(&json)]);
    assert_eq!(a.status.code(), Some(0));
    let out = stdout(&a);
    assert!(out.contains("rank series: 1 + 3x + 7x^2 + 15x^3 + 31x^4\n"), "{out}");
    assert!(out.contains("characteristic series: 1 - 3x + 2x^2\n"), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "dn", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "bn", "--n", "2", "--format", "summary"]).status.code(), Some(2));
    assert_eq!(run(&["repro", "13"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.mono", "gens: a b\nrel: ab = a\n");
    let o = run(&["build", "--in", s(&bad), "--depth", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("inhomogeneous"), "{}", stderr(&o));
    let missing = run(&["analyze", "--in", s(&dir.path().join("absent.json"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("cannot read"));
    let mono = write(&dir, "free.mono", "gens: a b\n");
    let o = run(&["analyze", "--in", s(&mono)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--depth"));
}

#[test]
fn word_cap_is_reported() {
    let dir = TempDir::new().unwrap();
    let mono = write(&dir, "free.mono", "gens: a b c\n");
    let o = run(&["build", "--in", s(&mono), "--depth", "9", "--word-cap", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--word-cap"), "{}", stderr(&o));
    let env = Command::new(BIN)
        .args(["build", "--in", s(&mono), "--depth", "9"])
        .env("UPHOCORE_WORD_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
}

#[test]
fn semilattice_monoid_is_not_left_cancellative() {
    let dir = TempDir::new().unwrap();
    let mono = write(&dir, "semi.mono", "gens: a b c\nrel: aa = ba\nrel: bb = cb\nrel: ab = cc\n");
    let o = run(&["check-cancel", "--in", s(&mono), "--depth", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "not left-cancellative: c·aa = c·ca but aa ≠ ca\n");
    let two = write(&dir, "two.mono", "gens: a b\nrel: ab = ba\n");
    assert_eq!(run(&["check-cancel", "--in", s(&two)]).status.code(), Some(0));
}

#[test]
fn structured_analysis_survives_a_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let mono = write(&dir, "m.mono", "gens: a b c\nrel: aa = ba\nrel: aaa = caa\n");
    let json = dir.path().join("m.json");
    run(&["build", "--in", s(&mono), "--depth", "5", "--out", s(&json)]);
    let direct = run(&["analyze", "--in", s(&mono), "--depth", "5", "--format", "structured"]);
    let via_file = run(&["analyze", "--in", s(&json), "--format", "structured"]);
    assert_eq!(direct.status.code(), Some(0));
    assert_eq!(direct.stdout, via_file.stdout);
    let again = run(&["analyze", "--in", s(&json), "--format", "structured"]);
    assert_eq!(again.stdout, via_file.stdout);
}

#[test]
fn constructions_agree_where_expected() {
    let dir = TempDir::new().unwrap();
    let dn = dir.path().join("dn.json");
    let mf = dir.path().join("mf.mono");
    run(&["construct", "dn", "--n", "2", "--depth", "5", "--out", s(&dn)]);
    let m = run(&["construct", "mf", "--f", "1,1", "--out", s(&mf)]);
    assert_eq!(m.status.code(), Some(0));
    let o = run(&["iso", "--in", s(&dn), "--in", s(&mf), "--depth", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("isomorphic:"));

    let fnp = dir.path().join("fn.json");
    run(&["construct", "fn", "--n", "2", "--depth", "5", "--out", s(&fnp)]);
    let o = run(&["iso", "--in", s(&dn), "--in", s(&fnp)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "not isomorphic\n");

    let b2 = dir.path().join("b2.json");
    run(&["construct", "bn", "--n", "2", "--out", s(&b2)]);
    let core = run(&["core", "--in", s(&dn)]);
    let core_file = write(&dir, "core.json", &stdout(&core));
    let o = run(&["iso", "--in", s(&core_file), "--in", s(&b2)]);
    assert_eq!(o.status.code(), Some(0));

    let c = run(&["construct", "chain", "--depth", "2"]);
    let p = run(&["construct", "product", "--in", s(&b2), "--in", s(&b2)]);
    assert_eq!(c.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&p.stdout).unwrap();
    assert_eq!(v["ranks"].as_array().unwrap().len(), 3);
}

#[test]
fn colored_upho_check_and_dot() {
    let dir = TempDir::new().unwrap();
    let lf = dir.path().join("lf.json");
    run(&["construct", "mf", "--f", "1,2", "--depth", "4", "--out", s(&lf)]);
    let o = run(&["check-upho", "--in", s(&lf), "--colored", "--probe", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = run(&["dot", "--in", s(&lf), "--colored"]);
    let text = stdout(&d);
    assert!(text.starts_with("digraph poset {"));
    assert_eq!(text.matches("->").count(), text.matches("color=").count());
    assert_eq!(d.stdout, run(&["dot", "--in", s(&lf), "--colored"]).stdout);
}

#[test]
fn realize_is_deterministic_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let m3 = dir.path().join("m3.json");
    run(&["construct", "mn", "--n", "3", "--out", s(&m3)]);
    let one = run(&["realize", "--in", s(&m3), "--depth", "4", "--format", "structured", "--workers", "1"]);
    let two = run(&["realize", "--in", s(&m3), "--depth", "4", "--format", "structured", "--workers", "2"]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, two.stdout);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["colorings_enumerated"], 27);
    assert!(v["survivors"].as_array().unwrap().len() >= 3);

    let summary = stdout(&run(&["realize", "--in", s(&m3), "--depth", "4"]));
    assert!(summary.contains("wall time"), "{summary}");
    let colorings = stdout(&run(&["colorings", "--in", s(&m3)]));
    assert!(colorings.starts_with("27 pre-upho colorings\n"));
}

#[test]
fn repro_runs_selected_criteria() {
    let o = run(&["repro", "1", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().split_whitespace().take(3).eq(["PASS", "criterion", "1"]), "{out}");
    assert!(out.ends_with("all 2 criteria passed\n"));
}
