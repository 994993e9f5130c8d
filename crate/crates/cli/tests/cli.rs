//! End-to-end checks of the binary: exit codes, listings, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name);
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idealkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_flew_on_l3_passes_with_exit_zero() {
    let out = run(&["check", "--algebra", &corpus("l3.json"), "--class", "flew"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS check/flew"));
}

#[test]
fn check_quasi_on_g3_passes() {
    let out = run(&["check", "--algebra", &corpus("g3.json"), "--class", "quasi"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn broken_algebra_file_exits_two() {
    let dir = std::env::temp_dir().join("idealkit-broken");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{"name":"broken","size":2,"point":"0","operations":[
            {"symbol":"f","arity":1,"table":[0,5]},
            {"symbol":"0","arity":0,"table":0}]}"#,
    )
    .unwrap();
    let out = run(&["check", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("out of range"), "{}", err);
}

#[test]
fn unknown_theorem_id_exits_two() {
    let out = run(&[
        "audit",
        "--algebra",
        &corpus("b2.json"),
        "--theorem",
        "nope",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn congruence_listing_of_g3() {
    let out = run(&["congruences", "--algebra", &corpus("g3.json")]);
    let text = stdout(&out);
    assert!(text.contains("3 congruence(s) of g3"));
    assert!(text.contains("{{0},{1,2}}  point-class {1,2}"));
    assert!(text.contains("covers:"));
}

#[test]
fn ideal_listing_of_z4_at_depth_two() {
    let out = run(&["ideals", "--algebra", &corpus("z4.json"), "--depth", "2"]);
    let text = stdout(&out);
    assert!(text.contains("3 ideal(s) of z4"), "{}", text);
    assert!(text.contains("{0,2}"));
}

#[test]
fn filter_listing_of_l3() {
    let out = run(&["filters", "--algebra", &corpus("l3.json")]);
    let text = stdout(&out);
    assert!(text.contains("2 filter(s) of l3"), "{}", text);
}

#[test]
fn audit_special_on_g3_with_terms_file() {
    let out = run(&[
        "audit",
        "--theorem",
        "special",
        "--algebra",
        &corpus("g3.json"),
        "--terms",
        &corpus("boolt.trm"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS special/t-special-quotient"));
}

#[test]
fn audit_sec5_on_l3_echoes_the_witness() {
    let out = run(&[
        "audit",
        "--theorem",
        "sec5",
        "--algebra",
        &corpus("l3.json"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("s = *(->(x2,0),x1)"), "{}", text);
}

#[test]
fn point_override_changes_the_designated_point() {
    let out = run(&[
        "audit",
        "--theorem",
        "thm2",
        "--algebra",
        &corpus("l3.json"),
        "--point",
        "0",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("\"algebra\":\"l3@0\""));
}

#[test]
fn machine_output_is_json_lines() {
    let out = run(&[
        "audit",
        "--theorem",
        "lemma1",
        "--algebra",
        &corpus("b2.json"),
        "--format",
        "machine",
    ]);
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("json record");
        for key in ["theorem", "algebra", "status", "witness"] {
            assert!(v.get(key).is_some(), "missing {} in {}", key, line);
        }
    }
}

#[test]
fn enumerate_quasi_size_one_is_a_single_model() {
    let out = run(&["enumerate", "--quasi", "--size", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["count"], 1);
}

#[test]
fn enumerate_refuses_exhaustive_size_four() {
    let out = run(&["enumerate", "--quasi", "--size", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--sample"));
}

#[test]
fn enumerate_ideal_terms_includes_the_implication() {
    let out = run(&[
        "enumerate",
        "--ideal-terms",
        "--algebra",
        &corpus("g3.json"),
        "--depth",
        "1",
        "--x",
        "1",
        "--y",
        "1",
    ]);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "->(x1,y1)"), "{}", text);
}

#[test]
fn sampled_enumeration_is_seed_deterministic() {
    let a = run(&[
        "enumerate",
        "--quasi",
        "--size",
        "4",
        "--sample",
        "2000",
        "--seed",
        "7",
    ]);
    let b = run(&[
        "enumerate",
        "--quasi",
        "--size",
        "4",
        "--sample",
        "2000",
        "--seed",
        "7",
    ]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn env_seed_overrides_the_flag() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_idealkit"))
        .args([
            "enumerate",
            "--quasi",
            "--size",
            "4",
            "--sample",
            "500",
            "--seed",
            "3",
        ])
        .env("IDEALKIT_SEED", "7")
        .output()
        .unwrap();
    let with_flag = run(&[
        "enumerate",
        "--quasi",
        "--size",
        "4",
        "--sample",
        "500",
        "--seed",
        "7",
    ]);
    assert_eq!(stdout(&with_env), stdout(&with_flag));
}

#[test]
fn audit_all_on_onepoint_is_entirely_vacuous() {
    let out = run(&[
        "audit",
        "--theorem",
        "all",
        "--algebra",
        &corpus("onepoint.json"),
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let mut lines = 0;
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "PASS", "{}", line);
        assert_eq!(v["vacuous"], true, "{}", line);
        lines += 1;
    }
    assert!(lines > 0);
}

#[test]
fn expected_mathematical_findings_exit_one() {
    // the 3-chain semilattice has two congruences sharing point-class {0}
    let out = run(&[
        "audit",
        "--theorem",
        "gummursini",
        "--algebra",
        &corpus("chain3.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).contains("FAIL gummursini/zero-regular"),
        "{}",
        stdout(&out)
    );
}
