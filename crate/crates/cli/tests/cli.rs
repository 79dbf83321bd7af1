use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rectstack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rectstack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("stdout is JSON lines"))
        .collect()
}

fn datum<'a>(lines: &'a [Value], name: &str) -> &'a Value {
    &lines
        .iter()
        .find(|l| l["data"] == name)
        .unwrap_or_else(|| panic!("no {name}"))["value"]
}

#[test]
fn build_writes_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = rectstack(&["build", "--d", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let l = lines(&out);
    assert_eq!(datum(&l, "n"), 12);
    for name in ["stack.json", "SC_r.hx.alist", "SC_g.hz.alist", "SC_b.hx.alist"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let stack: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("stack.json")).unwrap()).unwrap();
    assert_eq!(stack["codes"].as_array().unwrap().len(), 3);
    assert!(stack["codes"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["n"] == 12 && c["k"] == 1));
}

#[test]
fn build_alist_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = rectstack(&[
        "build",
        "--d",
        "3",
        "--format",
        "alist",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!dir.path().join("stack.json").exists());
    let text = std::fs::read_to_string(dir.path().join("SC_g.hx.alist")).unwrap();
    assert!(text.starts_with("51 "));
}

#[test]
fn build_rejects_d1() {
    let dir = tempfile::tempdir().unwrap();
    let out = rectstack(&["build", "--d", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!Path::new(&dir.path().join("stack.json")).exists());
}

#[test]
fn verify_suites() {
    let out = rectstack(&["verify", "--d", "2", "--suite", "ccz"]);
    assert!(out.status.success());
    let l = lines(&out);
    let table = datum(&l, "ccz_phase_table");
    assert_eq!(table["exhaustive"], true);
    for e in table["entries"].as_array().unwrap() {
        let want = if e["bits"] == serde_json::json!([1, 1, 1]) {
            -1
        } else {
            1
        };
        assert_eq!(e["phase"], want);
    }
    let out = rectstack(&["verify", "--d", "2", "--suite", "fixture"]);
    assert!(out.status.success());
    assert_eq!(
        datum(&lines(&out), "permutation"),
        &serde_json::json!([8, 10, 9, 11, 4, 5, 7, 6, 0, 2, 1, 3])
    );
    assert!(rectstack(&["verify", "--d", "3", "--suite", "counts"]).status.success());
}

#[test]
fn verify_is_deterministic() {
    let args = [
        "verify",
        "--d",
        "3",
        "--suite",
        "ccz",
        "--samples",
        "300",
        "--seed",
        "9",
    ];
    let (a, b) = (rectstack(&args), rectstack(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let last = lines(&a).pop().unwrap();
    assert_eq!(last["seed"], 9);
    assert_eq!(last["passed"], true);
}

#[test]
fn surgery_counts() {
    let out = rectstack(&["surgery", "--d", "3", "--axis", "g"]);
    assert!(out.status.success());
    let l = lines(&out);
    assert_eq!(datum(&l, "new_qubits"), 12);
    assert_eq!(datum(&l, "SC_g delta")["new_independent"], 13);

    let out = rectstack(&["surgery", "--d", "3", "--axis", "2d3d"]);
    assert!(out.status.success());
    let l = lines(&out);
    assert_eq!(datum(&l, "ancillas"), 3);
    assert_eq!(datum(&l, "new_z"), 4);

    assert!(
        !rectstack(&["surgery", "--d", "3", "--axis", "2d3d", "--sheet-color", "g"])
            .status
            .success()
    );
    assert!(!rectstack(&["surgery", "--axis", "q"]).status.success());
}

#[test]
fn concat_and_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("concat.json");
    let out = rectstack(&[
        "concat",
        "--d",
        "2",
        "--max-weight",
        "3",
        "--out",
        code.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        datum(&lines(&out), "code"),
        &serde_json::json!({ "n": 96, "k": 3, "generators": 93 })
    );
    assert!(code.exists());

    let out = rectstack(&["circuits", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(dir.path().join("ccz_injection.json").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("circuits: passed"));
}
