use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsm-jacobi"))
        .args(args)
        .current_dir(dir)
        .env("FSM_JACOBI_THREADS", "2")
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

const HN_SETS: &str = r#"{
  "u": {"kind": "points", "points": [[2.718281828459045, 0]]},
  "v": {"kind": "interval", "lo": -2, "hi": 2, "distribution": "arcsine"},
  "w": {"kind": "points", "points": [[0.36787944117144233, 0]]}
}"#;

#[test]
fn pipeline_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("sets.json"), HN_SETS).unwrap();
    let rhs = "{\"i\": 0, \"b\": [1, 0]}\n{\"i\": 3, \"b\": [0, -2]}\n";
    std::fs::write(d.join("rhs.jsonl"), rhs).unwrap();

    let run = |tag: &str| -> Vec<Vec<u8>> {
        ok(&bin(&["generate", "--sets", "sets.json", "--seed", "3", "--range", "-200..200", "--out", &format!("f{tag}.jsonl")], d));
        ok(&bin(&["plan", "--field", &format!("f{tag}.jsonl"), "--nmax", "3", "--out", &format!("p{tag}.json")], d));
        ok(&bin(
            &["solve", "--field", &format!("f{tag}.jsonl"), "--rhs", "rhs.jsonl", "--nmax", "3", "--out", &format!("r{tag}.json"), "--csv", &format!("r{tag}.csv")],
            d,
        ));
        ok(&bin(&["spectrum", "--field", &format!("f{tag}.jsonl"), "--n", "60", "--mode", "sv", "--shift=-1", "--out", &format!("s{tag}.csv")], d));
        ok(&bin(
            &["spectrum", "--field", &format!("f{tag}.jsonl"), "--n", "30", "--mode", "pseudo", "--eps", "0.1,0.01", "--grid=-5,5,-3,3,15", "--out", &format!("ps{tag}.csv")],
            d,
        ));
        ["f", "p", "r", "s", "ps"]
            .iter()
            .zip(["jsonl", "json", "json", "csv", "csv"])
            .map(|(stem, ext)| std::fs::read(d.join(format!("{stem}{tag}.{ext}"))).unwrap())
            .collect()
    };
    let first = run("1");
    let second = run("2");
    assert_eq!(first, second);

    let csv = String::from_utf8(std::fs::read(d.join("r1.csv")).unwrap()).unwrap();
    assert!(csv.starts_with("n,l_n,r_n,size,inv_norm,residual,delta\n"));
    assert_eq!(csv.lines().count(), 4);
    let report: serde_json::Value = serde_json::from_slice(&first[2]).unwrap();
    assert_eq!(report["case"], "B");
    assert_eq!(report["shift_k"], -1);
    let sv = String::from_utf8(first[3].clone()).unwrap();
    assert!(sv.starts_with("value\n") && sv.lines().count() == 61);
    assert!(d.join("ps1.sigma.csv").exists() && d.join("ps1.json").exists());
}

#[test]
fn bounds_classify_reproduce_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("sets.json"), HN_SETS).unwrap();
    let out = bin(&["bounds", "--sets", "sets.json", "--angles", "32", "--csv", "lower.csv"], d);
    ok(&out);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["hole"]["nonempty"], true);
    assert!(d.join("lower.csv").exists());

    let out = bin(&["classify", "--sets", "sets.json"], d);
    ok(&out);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["case"], "B");
    assert_eq!(rep["plus_index"], -1);
    assert!((rep["certificates"]["stability_cap"].as_f64().unwrap() - 2.8539).abs() < 1e-4);

    let out = bin(&["reproduce", "--nmax", "3"], d);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("c = 3.0862") && text.contains("(s-a)^-1 = 2.8539"));

    std::fs::write(d.join("empty.json"), "").unwrap();
    let out = bin(&["selftest", "--config", "empty.json"], d);
    ok(&out);
    let out = bin(&["selftest", "--inject-fault"], d);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL thomas residual"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.json"), "{\n  \"u\": {\"kind\": \"points\"}\n}").unwrap();
    let out = bin(&["classify", "--sets", "bad.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:2:"));

    std::fs::write(d.join("sets.json"), HN_SETS).unwrap();
    ok(&bin(&["generate", "--sets", "sets.json", "--range", "-10..10", "--out", "f.jsonl"], d));
    let out = bin(&["spectrum", "--field", "f.jsonl", "--n", "5000", "--mode", "eig", "--out", "e.csv"], d);
    assert_eq!(out.status.code(), Some(3));
    let out = bin(&["plan", "--field", "f.jsonl", "--nmax", "30", "--horizon", "1000"], d);
    assert_eq!(out.status.code(), Some(3));
    let out = bin(&["reproduce", "--a", "3.5"], d);
    assert_eq!(out.status.code(), Some(4));
}
