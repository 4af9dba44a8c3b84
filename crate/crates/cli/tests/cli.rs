use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolyvagin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixtures() -> Vec<(String, Value)> {
    let mut out: Vec<(String, Value)> = std::fs::read_dir(fixture_dir())
        .expect("fixture dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).expect("readable");
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                serde_json::from_str(&text).expect("valid json"),
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn every_fixture_reproduces() {
    let all = fixtures();
    assert!(all.len() >= 8);
    for (name, f) in all {
        let args: Vec<&str> = f["args"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap())
            .collect();
        let out = bin(&args);
        assert_eq!(
            out.status.code(),
            Some(f["exit"].as_i64().unwrap() as i32),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let expect = f["expect"].as_object().unwrap();
        if expect.is_empty() {
            continue;
        }
        let report: Value = serde_json::from_slice(&out.stdout).expect("json report");
        for (ptr, want) in expect {
            assert_eq!(report.pointer(ptr), Some(want), "{name} at {ptr}");
        }
    }
}

#[test]
fn oracle_regenerates_identical_fixtures() {
    let dir = std::env::temp_dir().join(format!("kolyvagin-oracle-{}", std::process::id()));
    let out = bin(&[
        "suite",
        "stark",
        "--oracle",
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for (name, _) in fixtures() {
        let fresh = std::fs::read(dir.join(&name)).expect("regenerated");
        let committed = std::fs::read(fixture_dir().join(&name)).unwrap();
        assert_eq!(fresh, committed, "{name} drifted from its oracle");
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn strict_inclusion_example() {
    let m = r#"{"ring":{"p":3,"n":2,"invariant_factors":[]},"gens":2,"relations":[[["3"],["0"]],[["0"],["3"]]]}"#;
    let out = bin(&["ideal", "--input", m]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["fitt0"], "(0)");
    assert_eq!(r["char"], "(3)");
    assert_eq!(r["verdict"], "strict");
}

#[test]
fn group_ring_ideal_is_rendered() {
    // Z/3[C3] / (1 − s): the trivial module F_3
    let m =
        r#"{"ring":{"p":3,"n":1,"invariant_factors":[3]},"gens":1,"relations":[[["1","2","0"]]]}"#;
    let out = bin(&["ideal", "--input", m]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["fitt0"], r["ann"]);
    assert_eq!(r["length"], "1");
}

#[test]
fn corrupted_stark_fixture_fails_with_witness() {
    let f = &fixtures()
        .into_iter()
        .find(|(n, _)| n == "stark_corrupted.json")
        .unwrap()
        .1;
    let input = f["args"][3].as_str().unwrap();
    let out = bin(&["suite", "stark", "--input", input]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let check = &r["checks"][0];
    assert_eq!(check["passed"], false);
    assert!(!check["witness"].is_null());
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(bin(&["suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_input_is_a_usage_error() {
    assert_eq!(
        bin(&["ideal", "--input", "{not json"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["ideal"]).status.code(), Some(2));
}

#[test]
fn hypothesis_violations_exit_3() {
    // Legendre symbol mod 7 is odd
    assert_eq!(
        bin(&["kolyvagin", "--input", r#"{"chi": "7"}"#])
            .status
            .code(),
        Some(3)
    );
    // labels 7, 13, 31 are not ≡ 1 mod 9, so classes at n = 2 move
    assert_eq!(bin(&["kolyvagin", "--n", "2"]).status.code(), Some(3));
}

#[test]
fn kolyvagin_at_n_one_reports_classes() {
    let out = bin(&["kolyvagin", "--n", "1"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["classes"].as_array().unwrap().len(), 7);
    assert_eq!(r["window"]["valid"], true);
}

#[test]
fn suite_reports_are_byte_identical_and_echo_the_seed() {
    let a = bin(&["suite", "bidual", "--seed", "5"]);
    let b = bin(&["suite", "bidual", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["seed"], "5");
}

#[test]
fn output_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("kolyvagin-report-{}.json", std::process::id()));
    let out = bin(&[
        "stickelberger",
        "--input",
        r#"{"m": "5"}"#,
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["theta"]["coeffs"]["2"], "1/10");
    std::fs::remove_file(path).ok();
}
