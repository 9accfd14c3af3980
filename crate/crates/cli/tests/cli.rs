use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn model(name: &str) -> String {
    root()
        .join("models")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn fixture(name: &str) -> String {
    root()
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equiblow"))
        .args(args)
        .env_remove("EQUIBLOW_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str], tag: &str) -> (Output, Value) {
    let path = std::env::temp_dir().join(format!("equiblow-{}-{tag}.json", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let mut all = args.to_vec();
    all.extend(["--json", &p]);
    let out = run(&all);
    let v = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    (out, v)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn e2_blowup_report() {
    let (out, v) = json_of(&["blowup", &model("e2.kb")], "e2");
    assert!(out.status.success(), "{}", stderr(&out));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["charts", "command", "ledger", "model", "version"]);
    let chart = &v["charts"][0];
    assert_eq!(chart["name"], "chart_x");
    assert_eq!(chart["ideal_gb"], serde_json::json!(["xi_x^2*T_y", "z"]));
    assert_eq!(chart["unstable_gb"], serde_json::json!(["T_y"]));
    assert_eq!(chart["checks"]["coinc"], true);
}

#[test]
fn e1_and_trivial_summaries() {
    let out = run(&["blowup", &model("e1.kb")]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success());
    assert!(text.contains("ideal     (1)"));
    assert!(text.contains("semistable part of the first blowup is empty"));
    let (out, v) = json_of(&["blowup", &model("trivial.kb")], "trivial");
    assert!(out.status.success());
    assert_eq!(v["charts"], serde_json::json!([]));
    assert!(v["ledger"]["notes"][0]
        .as_str()
        .unwrap()
        .starts_with("dense"));
}

#[test]
fn exit_codes() {
    let parse = run(&["blowup", &fixture("does_not_exist.kb")]);
    assert_eq!(parse.status.code(), Some(2));
    let bad_point = run(&["crit", &model("quartic.kb"), "--point", "1,1"]);
    assert_eq!(bad_point.status.code(), Some(3));
    let budget = run(&["blowup", &model("e2.kb"), "--budget", "1"]);
    assert_eq!(budget.status.code(), Some(4));
    let env_budget = Command::new(env!("CARGO_BIN_EXE_equiblow"))
        .args(["blowup", &model("e2.kb")])
        .env("EQUIBLOW_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(env_budget.status.code(), Some(4));
    let corrupt = run(&["blowup", &fixture("corrupted_coinc.kb")]);
    assert_eq!(corrupt.status.code(), Some(5));
    assert!(stderr(&corrupt).contains("`coinc`"));
    let corpus = run(&["corpus", &root().join("tests/fixtures").to_string_lossy()]);
    assert_eq!(corpus.status.code(), Some(5));
}

#[test]
fn point_commands() {
    let out = run(&[
        "semistable",
        &model("e2.kb"),
        "--chart",
        "chart_x",
        "--point",
        "1,0,0",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("unstable, witness lambda [1]"), "{text}");
    let out = run(&[
        "semistable",
        &model("e2.kb"),
        "--chart",
        "chart_x",
        "--point",
        "0,1,5",
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains(": semistable"));
    let out = run(&["crit", &model("quartic.kb"), "--point", "0,0"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("h = (1, 2, 2, 1)"));
    let out = run(&[
        "obstruction",
        &model("quartic.kb"),
        "--point",
        "0,0",
        "--ext-order",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&["semistable", &model("e2.kb"), "--chart", "chart_q"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verification_commands() {
    assert!(run(&["omega-verify", &fixture("omega_quartic.kb")])
        .status
        .success());
    for c in ["0", "1", "-2"] {
        let out = run(&["fiber-check", &model("family.kb"), "--at", c]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert!(run(&["independence", &model("e2.kb"), "--aux", "u"])
        .status
        .success());
    assert!(run(&["independence", &model("e2.kb"), "--aux", "u=z^2"])
        .status
        .success());
    assert_eq!(
        run(&["independence", &model("e2.kb"), "--aux", "u=x"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["fiber-check", &model("e2.kb")]).status.code(),
        Some(3)
    );
}

#[test]
fn corpus_is_deterministic() {
    let dir = std::env::temp_dir();
    let paths: Vec<PathBuf> = (0..2)
        .map(|i| dir.join(format!("equiblow-corpus-{}-{i}.json", std::process::id())))
        .collect();
    for p in &paths {
        let out = run(&["corpus", "--json", &p.to_string_lossy()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    paths.iter().for_each(|p| drop(std::fs::remove_file(p)));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}
