use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poset-ramsey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn bounds_text_and_json() {
    assert!(stdout(&["bounds", "1", "5"]).starts_with("(6, 6)"));
    assert!(stdout(&["bounds", "3", "3"]).starts_with("(7, 8)"));
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--format", "json", "bounds", "2", "3"])).unwrap();
    assert_eq!(v["lower"], 5);
    assert_eq!(v["upper"], 5);
    assert_eq!(v["provenance"][0], "exact: Theorem 8");
}

#[test]
fn table_is_json_lines() {
    let text = stdout(&["--format", "json", "table", "10"]);
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 55);
    assert!(rows.iter().all(|r| r["lower"].as_i64() <= r["upper"].as_i64()));
}

#[test]
fn search_exit_codes() {
    assert_eq!(code(&["search", "-N", "3", "--m", "2", "--n", "2"]), 0);
    assert_eq!(code(&["search", "-N", "4", "--m", "2", "--n", "2"]), 3);
    assert_eq!(code(&["--node-cap", "5", "search", "-N", "4", "--m", "2", "--n", "2"]), 4);
    assert_eq!(code(&["search", "-N", "9", "--m", "2", "--n", "2"]), 64);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["bounds", "0", "3"]), 64);
    assert_eq!(code(&["mc", "--n", "2"]), 64);
    assert_eq!(code(&["reproduce", "no-such-check"]), 64);
}

fn parity_word(n: u32) -> String {
    (0..1u32 << n).map(|s| if s.count_ones() % 2 == 0 { 'B' } else { 'R' }).collect()
}

fn witness(path: &Path, colors: &str) {
    let doc = serde_json::json!({
        "kind": "witness", "ground": 4, "red_m": 2, "blue_n": 3, "hat": false, "colors": colors,
    });
    std::fs::write(path, doc.to_string()).unwrap();
}

#[test]
fn verify_cert_detects_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    witness(&good, &parity_word(4));
    assert_eq!(code(&["verify-cert", good.to_str().unwrap()]), 0);

    let mut bad = parity_word(4).into_bytes();
    bad[0] = b'R';
    let badp = dir.path().join("bad.json");
    witness(&badp, std::str::from_utf8(&bad).unwrap());
    assert_eq!(code(&["verify-cert", badp.to_str().unwrap()]), 2);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"kind\":\"witness\",\"ground\":").unwrap();
    assert_eq!(code(&["verify-cert", broken.to_str().unwrap()]), 65);
}

#[test]
fn search_certificates_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["--out", out, "search", "-N", "4", "--m", "2", "--n", "3"]), 0);
    let file = dir.path().join("witness-N4-m2-n3.json");
    assert_eq!(code(&["verify-cert", file.to_str().unwrap()]), 0);
}

#[test]
fn cnf_and_model_roundtrip() {
    let dimacs = stdout(&["cnf", "-N", "2", "--m", "1", "--n", "1"]);
    assert!(dimacs.lines().any(|l| l.starts_with("p cnf 4 ")));
    let dir = tempfile::tempdir().unwrap();
    // Q_2 in red/blue with no monochromatic comparable pair is impossible,
    // so any model names a copy; all-blue names a blue Q_1.
    let model = dir.path().join("model.txt");
    std::fs::write(&model, "v -1 -2 -3 -4 0\n").unwrap();
    let m = model.to_str().unwrap();
    assert_eq!(code(&["decode-model", "-N", "2", "--m", "1", "--n", "1", m]), 2);
    std::fs::write(&model, "v 1 2 3 -4 0\n").unwrap();
    assert_eq!(code(&["decode-model", "-N", "2", "--m", "2", "--n", "2", m]), 0);
    std::fs::write(&model, "v 1 2 0\n").unwrap();
    assert_eq!(code(&["decode-model", "-N", "2", "--m", "2", "--n", "2", m]), 65);
}

#[test]
fn reproduce_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["--out", out, "reproduce", "thm8-lower"]), 0);
    assert!(dir.path().join("thm8-lower/report.json").exists());
    let list = stdout(&["reproduce", "--list"]);
    assert!(list.contains("thm8-upper") && list.contains("[slow]"));
}

#[test]
fn small_tools() {
    assert_eq!(stdout(&["dim2", "--chain", "3"]).trim(), "2");
    assert_eq!(stdout(&["dim2", "--lattice", "3"]).trim(), "3");
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["--format", "json", "mc", "--n", "2", "-N", "2", "--trials", "200"])).unwrap();
    assert_eq!(v["estimate"]["trials"], 200);
}
