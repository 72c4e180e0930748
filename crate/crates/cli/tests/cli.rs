use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn monotile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monotile")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn ladder_build_check_and_defects() {
    let dir = tempfile::tempdir().unwrap();
    let ladder = dir.path().join("l.json");
    assert!(monotile(&["folner", "build", "--depth", "3", "--out", p(&ladder)]).status.success());
    let o = monotile(&["folner", "check", p(&ladder)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("congruent: 3 levels"));
    let o = monotile(&["folner", "defect", p(&ladder), "--window", "1", "-1"]);
    assert!(stdout(&o).contains("level 3: |F|=27 right-invariance 2/27 folner -1:1/27 1:1/27"), "{}", stdout(&o));
}

#[test]
fn broken_ladder_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let ladder = dir.path().join("l.json");
    let body = r#"{"group":{"kind":"lattice","d":1},"levels":[["0"],["-1","0","1"]],"glue":[["0","1","3"]]}"#;
    fs::write(&ladder, body).unwrap();
    let o = monotile(&["folner", "check", p(&ladder)]);
    assert!(!o.status.success());
}

#[test]
fn corrupted_matrix_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    fs::write(&m, r#"[{"rows":2,"cols":2,"ratio":3,"entries":[2,1,1,3]}]"#).unwrap();
    let o = monotile(&["measures", "check", p(&m)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not managed"));
    fs::write(&m, r#"[{"rows":2,"cols":2,"ratio":3,"entries":[2,1,1,2]}]"#).unwrap();
    assert!(monotile(&["measures", "check", p(&m)]).status.success());
}

#[test]
fn x0_renders_as_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let ladder = dir.path().join("l.json");
    let h = dir.path().join("h.json");
    monotile(&["folner", "build", "--depth", "2", "--out", p(&ladder)]);
    assert!(monotile(&["blocks", "build", p(&ladder), "--out", p(&h)]).status.success());
    let o = monotile(&["blocks", "x0", p(&h), "--level", "1"]);
    let line = stdout(&o);
    assert_eq!(line.trim().split(' ').count(), 3);
    assert_eq!(line.trim().split(' ').nth(1), Some("1"));
    let o = monotile(&["blocks", "x0", p(&h), "--level", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["symbols"], serde_json::json!([1]));

    let plane = dir.path().join("p.json");
    let hp = dir.path().join("hp.json");
    monotile(&["folner", "build", "--group", "lattice:2", "--depth", "1", "--out", p(&plane)]);
    monotile(&["blocks", "build", p(&plane), "--out", p(&hp)]);
    let o = monotile(&["blocks", "x0", p(&hp), "--level", "1"]);
    assert_eq!(stdout(&o).trim().lines().count(), 3);
}

#[test]
fn x0_refuses_non_lattice_supports() {
    let dir = tempfile::tempdir().unwrap();
    let ladder = dir.path().join("l.json");
    let h = dir.path().join("h.json");
    monotile(&["folner", "build", "--group", "pruefer:3", "--depth", "1", "--out", p(&ladder)]);
    monotile(&["blocks", "build", p(&ladder), "--out", p(&h)]);
    let o = monotile(&["blocks", "x0", p(&h), "--level", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pipeline_rejects_shallow_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let body = r#"{"group":{"kind":"lattice","d":1},"ladder":{"route":"lattice","depth":1},"k0":3,
        "matrices":{"source":"realize","d":2,"tolerance":"1/100"},"analysis_level":2}"#;
    fs::write(&cfg, body).unwrap();
    let o = monotile(&["pipeline", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds ladder depth"));
}

#[test]
fn pipeline_with_bad_matrices_marks_later_stages() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    fs::write(&m, r#"[{"rows":2,"cols":2,"ratio":3,"entries":[2,1,1,3]}]"#).unwrap();
    let cfg = dir.path().join("c.json");
    let body = format!(
        r#"{{"group":{{"kind":"lattice","d":1}},"ladder":{{"route":"lattice","depth":3}},"k0":3,
        "matrices":{{"source":"file","path":{:?}}},"analysis_level":2}}"#,
        p(&m)
    );
    fs::write(&cfg, body).unwrap();
    let out = dir.path().join("run");
    let o = monotile(&["pipeline", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["stages"][0]["pass"], true);
    assert_eq!(report["stages"][1]["checks"][0]["pass"], false);
    assert_eq!(report["stages"][5]["checks"][0]["detail"], "not run");
}

#[test]
fn analysis_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ladder = dir.path().join("l.json");
    let h = dir.path().join("h.json");
    monotile(&["folner", "build", "--depth", "3", "--out", p(&ladder)]);
    monotile(&["blocks", "build", p(&ladder), "--out", p(&h)]);
    let o = monotile(&["analyze", "returns", p(&h), "--n", "1", "--m", "3"]);
    assert!(stdout(&o).starts_with("9 return times"));
    let o = monotile(&["analyze", "kr", p(&h), "--levels", "0..3"]);
    assert!(o.status.success());
    let o = monotile(&["analyze", "boundary", p(&ladder), "--g", "-1", "--levels", "2..3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[1]["bound"], "1/27");
}

#[test]
fn measures_commands() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let o = monotile(&["measures", "realize", "--d", "2", "--tolerance", "1/100", "--out", p(&m)]);
    assert!(stdout(&o).starts_with("depth 5"), "{}", stdout(&o));
    let o = monotile(&["measures", "lemma8", p(&m)]);
    assert!(stdout(&o).contains("indices [0, 2, 4], dropped 1"));
    let o = monotile(&["measures", "limit", p(&m), "--depth", "1"]);
    assert!(stdout(&o).contains("(2/3, 1/3)"));
    assert!(stdout(&o).contains("nested: true"));
}
