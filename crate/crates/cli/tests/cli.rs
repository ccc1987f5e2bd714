//! End-to-end tests of the `coneorder` binary: exit codes, output shapes,
//! flag handling, and fixture-file loading.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn coneorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coneorder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("coneorder-cli-{}-{}", std::process::id(), name));
    p
}

#[test]
fn list_fixtures_names_the_catalog() {
    let out = coneorder(&["list-fixtures"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let subjects: Vec<&str> = text
        .split("\nauxiliary:")
        .next()
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .collect();
    assert_eq!(subjects.len(), 17, "seventeen built-in subjects");
    assert!(text.contains("ex2_1"));
    assert!(text.contains("rem4_2"));
    assert!(text.contains("const_A0"));
    assert!(text.contains("diag_gap"));
}

#[test]
fn eval_prints_intervals_and_points() {
    let out = coneorder(&["eval", "--fixture", "ex3_1", "--x", "0.5", "--y", "0.2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "interval [-0.5, 0.2]");

    let out = coneorder(&["eval", "--fixture", "ex4_7", "--x", "0.2", "--y", "0.6"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "{(0.2, 0.6)}");

    // One-argument map: --y is optional.
    let out = coneorder(&["eval", "--fixture", "ex2_1", "--x", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "interval [0, 2]");
}

#[test]
fn eval_off_domain_is_a_usage_error() {
    let out = coneorder(&["eval", "--fixture", "ex3_1", "--x", "2", "--y", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("outside the domain"));
}

#[test]
fn refuted_check_exits_one() {
    let out = coneorder(&[
        "check", "--property", "pair_properly_v", "--arg", "first",
        "--fixture", "ex3_2", "--cone", "R2plus",
    ]);
    assert_eq!(code(&out), 1);
    let rep = json(&out);
    assert_eq!(rep["overall"], "fail");
    assert_eq!(rep["checks"][0]["status"], "refuted");
    assert!(rep["checks"][0]["verdict"]["witness"].is_object());
}

#[test]
fn positive_checks_exit_zero() {
    let out = coneorder(&["check", "--property", "alpha", "--fixture", "ex3_1", "--cone", "Rplus"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["checks"][0]["status"], "confirmed");

    let out = coneorder(&["check", "--property", "qc", "--fixture", "const_A0", "--cone", "Rplus"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["checks"][0]["status"], "not_refuted");
}

#[test]
fn unknown_identifiers_exit_two() {
    let cases: &[&[&str]] = &[
        &["check", "--property", "nosuch", "--fixture", "ex3_1"],
        &["check", "--property", "alpha", "--fixture", "nosuch"],
        &["check", "--property", "alpha", "--fixture", "ex3_1", "--cone", "nosuch"],
        &["verify", "--theorem", "nosuch", "--fixture", "ex4_2"],
    ];
    for args in cases {
        let out = coneorder(args);
        assert_eq!(code(&out), 2, "args {args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn dimension_mismatch_exits_two() {
    let out = coneorder(&["check", "--property", "alpha", "--fixture", "ex4_1", "--cone", "Rplus"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("dimension"));
}

#[test]
fn verify_certifies_the_interval_corollary() {
    let out = coneorder(&[
        "verify", "--theorem", "cor41_i", "--fixture", "ex4_2", "--cone", "Rplus",
        "--resolution", "15",
    ]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    assert_eq!(rep["overall"], "pass");
    let conclusion = rep["checks"].as_array().unwrap().last().unwrap();
    assert_eq!(conclusion["id"], "cor41_i");
    assert_eq!(conclusion["outcome"]["outcome"], "certified");
    assert_eq!(conclusion["outcome"]["z1"], serde_json::json!([1.0]));
    assert_eq!(conclusion["outcome"]["z2"], serde_json::json!([1.0]));
}

#[test]
fn verify_flags_the_gapped_diagonal() {
    let out = coneorder(&["verify", "--theorem", "thm41_i", "--fixture", "diag_gap", "--resolution", "10"]);
    assert_eq!(code(&out), 1);
    let rep = json(&out);
    assert_eq!(rep["overall"], "fail");
    let conclusion = rep["checks"].as_array().unwrap().last().unwrap();
    assert_eq!(conclusion["outcome"]["outcome"], "failed");
}

#[test]
fn inline_normals_define_a_cone() {
    let out = coneorder(&[
        "check", "--property", "alpha", "--fixture", "ex3_1", "--cone", "[[1.0]]",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["cone"], "custom normals=[[1.0]]");
}

#[test]
fn config_file_loads_and_flags_override_it() {
    let cfg_path = temp_path("config.json");
    std::fs::write(&cfg_path, r#"{ "grid_resolution": 12, "n_max": 2 }"#).unwrap();
    let out = coneorder(&[
        "check", "--property", "alpha", "--fixture", "ex3_1",
        "--config", cfg_path.to_str().unwrap(),
        "--resolution", "8",
    ]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    assert_eq!(rep["config"]["grid_resolution"], 8, "flag beats file");
    assert_eq!(rep["config"]["n_max"], 2, "file beats default");
    assert_eq!(rep["config"]["lambda_steps"], 21, "untouched keys keep defaults");
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn fixture_file_checks_run_like_builtins() {
    let fx_path = temp_path("fixtures.json");
    std::fs::write(
        &fx_path,
        r#"{
            "fixtures": [{
                "name": "kinked",
                "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
                "cone": "Rplus",
                "branches": [
                    { "when": ["x <= y"], "value": { "interval": { "lo": "-1", "hi": "y" } } },
                    { "value": { "interval": { "lo": "-x", "hi": "y" } } }
                ]
            }]
        }"#,
    )
    .unwrap();
    let out = coneorder(&[
        "check", "--property", "alpha",
        "--fixture-file", fx_path.to_str().unwrap(),
        "--resolution", "10",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rep = json(&out);
    assert_eq!(rep["fixture"], "kinked");
    assert_eq!(rep["checks"][0]["status"], "confirmed");

    // Selecting a missing name inside the file is a usage error.
    let out = coneorder(&[
        "check", "--property", "alpha", "--fixture", "ghost",
        "--fixture-file", fx_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    std::fs::remove_file(&fx_path).ok();
}

#[test]
fn markdown_format_renders_a_report() {
    let out = coneorder(&[
        "verify", "--theorem", "cor41_i", "--fixture", "ex4_2", "--resolution", "10",
        "--format", "markdown",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("# Verification report"));
    assert!(text.contains("| cor41_i | ex4_2 | Rplus |"));
}

#[test]
fn out_flag_writes_the_report_to_disk() {
    let out_path = temp_path("report.json");
    let out = coneorder(&[
        "check", "--property", "alpha", "--fixture", "ex3_1", "--resolution", "10",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty(), "report goes to the file, not stdout");
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(rep["overall"], "pass");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn missing_fixture_flags_are_a_usage_error() {
    let out = coneorder(&["check", "--property", "alpha"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--fixture"));
}
