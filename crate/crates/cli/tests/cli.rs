use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tlforge"));
    cmd.env_remove("TLFORGE_CAP");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build_to(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path_str(&path)]);
    let out = run(&full);
    assert_eq!(
        code(&out),
        0,
        "build {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn round_trip_for_every_family() {
    let dir = TempDir::new().unwrap();
    let cases: &[&[&str]] = &[
        &["--family", "trivial", "--n", "3"],
        &["--family", "rank-one", "--n", "3", "--z", "0.5+0.5i"],
        &["--family", "sqrt2"],
        &["--family", "sqrt3"],
        &["--family", "n4r4", "--seed", "11"],
        &["--family", "n-r-plus-1", "--n", "4", "--z", "2-1i,0.5i"],
        &["--family", "q2-block", "--n", "4"],
        &["--family", "q2-tensor", "--n", "4", "--z", "2"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let inst = build_to(&dir, &format!("inst{i}.json"), args);
        let exported = dir.path().join(format!("t{i}.json"));
        let out = run(&["export", path_str(&inst), "-o", path_str(&exported)]);
        assert_eq!(code(&out), 0, "export {args:?}");
        let out = run(&["verify", path_str(&exported)]);
        assert_eq!(
            code(&out),
            0,
            "verify {args:?}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        assert_eq!(json_of(&out)["pass"], true);
        // the instance document itself also verifies
        assert_eq!(code(&run(&["verify", path_str(&inst)])), 0);
    }
}

#[test]
fn corrupted_matrix_fails_verification() {
    let dir = TempDir::new().unwrap();
    let inst = build_to(
        &dir,
        "a.json",
        &["--family", "n-r-plus-1", "--n", "3", "--z", "1.3,0.7"],
    );
    let out = run(&["export", path_str(&inst)]);
    let mut doc = json_of(&out);
    let re = doc["t"]["data"][5][0].as_f64().unwrap();
    doc["t"]["data"][5][0] = Value::from(re + 1e-3);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = run(&["verify", path_str(&bad)]);
    assert_eq!(code(&out), 1);
    let report = json_of(&out);
    assert_eq!(report["pass"], false);
    assert!(report["reports"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["pass"] == false));
}

#[test]
fn classify_examples() {
    let out = run(&["classify", "3", "3", "1.732050808"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["theorem2_class"], "C");
    let out = run(&["classify", "--n", "2", "--r", "4", "--q", "1"]);
    assert_eq!(json_of(&out)["theorem2_class"], "A");
    let out = run(&["classify", "--n", "2", "--r", "3", "--q", "1.5"]);
    assert_eq!(json_of(&out)["theorem2_class"], "Excluded");
    assert_eq!(code(&run(&["classify", "0", "3", "1"])), 2);
}

#[test]
fn build_examples_and_invalid_parameters() {
    let out = run(&["build", "--family", "rank-one", "--n", "4", "--z", "1+0i"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["q"], 4.0);
    let out = run(&["build", "--family", "sqrt3"]);
    assert_eq!(
        (json_of(&out)["n"].as_u64(), json_of(&out)["r"].as_u64()),
        (Some(3), Some(3))
    );
    let out = run(&["build", "--family", "n4r4", "--z", "0.6,0.1,0.1,0.1"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["build", "--family", "nope"])), 2);
    assert_eq!(
        code(&run(&["build", "--family", "rank-one", "--z", "1"])),
        2
    );
    assert_eq!(
        code(&run(&[
            "build", "--family", "rank-one", "--n", "2", "--z", "1+xi"
        ])),
        2
    );
}

#[test]
fn seeded_builds_are_reproducible() {
    let a = json_of(&run(&["build", "--family", "n4r4", "--seed", "5"]));
    let b = json_of(&run(&["build", "--family", "n4r4", "--seed", "5"]));
    let c = json_of(&run(&["build", "--family", "n4r4", "--seed", "6"]));
    assert_eq!(a["params"], b["params"]);
    assert_ne!(a["params"], c["params"]);
    assert_eq!(
        a["fourth_matrix_check"]["accepted"],
        serde_json::json!([[4, 3, 2, 1]])
    );
}

#[test]
fn combinators_from_files() {
    let dir = TempDir::new().unwrap();
    let s2 = build_to(&dir, "s2.json", &["--family", "sqrt2"]);
    let r1 = build_to(&dir, "r1.json", &["--family", "rank-one", "--n", "2"]);
    let sum = run(&["sum", path_str(&s2), path_str(&s2)]);
    assert_eq!(code(&sum), 0);
    assert!((json_of(&sum)["q"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    let prod = run(&["product", path_str(&s2), path_str(&r1)]);
    assert_eq!(code(&prod), 0);
    assert_eq!(json_of(&prod)["n"], 4);
    let fused = run(&["fuse", path_str(&r1)]);
    assert_eq!(code(&fused), 0);
    let doc = json_of(&fused);
    assert_eq!(
        (doc["q"].as_f64(), doc["r"].as_u64(), doc["n"].as_u64()),
        (Some(4.0), Some(1), Some(4))
    );
    assert_eq!(code(&run(&["sum", path_str(&s2), path_str(&r1)])), 2);
    assert_eq!(code(&run(&["product", path_str(&r1), path_str(&s2)])), 2);
}

#[test]
fn construct_command() {
    let out = run(&["construct", "--r", "4", "--n", "7", "--q", "3"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(
        (doc["n"].as_u64(), doc["r"].as_u64(), doc["q"].as_f64()),
        (Some(7), Some(4), Some(3.0))
    );
    let out = run(&["construct", "--r", "2", "--n", "6"]);
    assert_eq!(json_of(&out)["q"], 4.0);
    assert_eq!(
        code(&run(&["construct", "--r", "3", "--n", "5", "--q", "4"])),
        2
    );
    assert_eq!(
        code(&run(&["construct", "--r", "2", "--n", "6", "--q", "3"])),
        2
    );
}

#[test]
fn jw_emits_json_lines() {
    let out = run(&["jw", "--family", "sqrt2", "--depth", "5", "--identities"]);
    assert_eq!(code(&out), 0);
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[2]["rho"], "infinite");
    let tail = &lines[3];
    assert_eq!(tail["stop_index"], 3);
    assert_eq!(tail["depth"], 3);
    let out = run(&[
        "jw", "--family", "rank-one", "--n", "2", "--q", "3", "--depth", "6", "--format", "pretty",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 7);
}

#[test]
fn cap_and_malformed_input() {
    let dir = TempDir::new().unwrap();
    let inst = build_to(&dir, "t3.json", &["--family", "trivial", "--n", "3"]);
    let out = bin()
        .env("TLFORGE_CAP", "20")
        .args(["verify", path_str(&inst)])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["--cap", "8", "classify", "2", "1", "2"])), 2);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"hello\": 1}").unwrap();
    assert_eq!(code(&run(&["verify", path_str(&junk)])), 2);
    std::fs::write(&junk, "not json").unwrap();
    assert_eq!(code(&run(&["verify", path_str(&junk)])), 2);
    assert_eq!(code(&run(&["verify", "/nonexistent/file.json"])), 2);
}
