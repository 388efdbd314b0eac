//! End-to-end tests for the `agt` binary: subcommands, file formats,
//! exit codes, and report determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn agt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

#[test]
fn bruhat_identity_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let id3 = write(dir.path(), "id3.txt", "1 0 0\n0 1 0\n0 0 1\n");
    let out = agt(&["bruhat", "--matrix", &id3, "--json"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["result"]["sigma"], "()");
    assert_eq!(doc["result"]["v"], "1 0 0\n0 1 0\n0 0 1\n");

    // text mode ends with the cycle line
    let out = agt(&["bruhat", "--matrix", &id3]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.trim_end().ends_with("sigma: ()"));
}

#[test]
fn bruhat_big_cell_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.txt", "1 1\n1 2\n");
    let out = agt(&["bruhat", "--matrix", &m, "--json"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["sigma"], "(1 2)");

    let bad = write(dir.path(), "bad.txt", "1 x\n0 1\n");
    let out = agt(&["bruhat", "--matrix", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "parse error names the line: {err}");
    assert!(
        err.contains("column 3"),
        "parse error names the column: {err}"
    );
}

#[test]
fn comm_formula_cases() {
    let out = agt(&["comm", "--n", "3", "--first", "1,2,2", "--second", "2,3,3"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["commutator"], "e[1,3]^(6)");

    // opposite pair is a precondition error
    let out = agt(&["comm", "--n", "3", "--first", "1,2,1", "--second", "2,1,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn roots_counts_and_path() {
    let out = agt(&["roots", "--type", "G2"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["root_count"], 12);
    assert_eq!(doc["result"]["highest_root"], serde_json::json!([3, 2]));

    let out = agt(&["roots", "--type", "A2", "--weyl-word", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["path_length"], 2);

    let out = agt(&["roots", "--type", "E8"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn chevalley_verify_telescoping_and_b2() {
    let out = agt(&[
        "chevalley",
        "verify",
        "--type",
        "G2",
        "--identity",
        "telescoping",
        "--k",
        "2,2,2,2,2,2",
        "--l",
        "1",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["exact_match"], true);
    assert_eq!(doc["result"]["exponent"], -4032);
    assert_eq!(doc["result"]["big_k"], 64);

    let out = agt(&[
        "chevalley",
        "verify",
        "--type",
        "B2",
        "--identity",
        "b2",
        "--k",
        "2,3",
        "--l",
        "2",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["exact_match"], true);
    assert_eq!(doc["result"]["exponent_linear"], 12);
    assert_eq!(doc["result"]["exponent_quadratic"], 24);

    let out = agt(&[
        "chevalley",
        "verify",
        "--type",
        "G2",
        "--identity",
        "nope",
        "--k",
        "1",
        "--l",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn probe_free_subgroup_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(
        dir.path(),
        "sq.json",
        r#"{"variant":"free","rank":2,"generators":["aa","bb"]}"#,
    );
    // a verdict, not an error: exit 0
    let out = agt(&[
        "probe",
        "--subgroup",
        &sq,
        "--direction",
        "ab",
        "--max-exponent",
        "50",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["verdict"]["kind"], "no_witness_up_to_bound");
    assert_eq!(doc["result"]["bounds"]["max_exponent"], 50);

    let out = agt(&["probe", "--subgroup", &sq, "--direction", "a"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["verdict"]["kind"], "normalizing_power");
    assert_eq!(doc["result"]["verdict"]["n"], 2);

    // determinism: identical invocations produce identical bytes
    let out1 = agt(&[
        "probe",
        "--subgroup",
        &sq,
        "--direction",
        "a",
        "--mode",
        "env",
    ]);
    let out2 = agt(&[
        "probe",
        "--subgroup",
        &sq,
        "--direction",
        "a",
        "--mode",
        "env",
    ]);
    assert_eq!(out1.stdout, out2.stdout);
}

#[test]
fn probe_congruence_direction_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "gamma2.json",
        r#"{"variant":"congruence","n":3,"m":2,"image_generators":[]}"#,
    );
    let dirmat = write(dir.path(), "dir.txt", "1 1 0\n0 1 0\n0 0 1\n");
    let out = agt(&["probe", "--subgroup", &spec, "--direction-matrix", &dirmat]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["verdict"]["kind"], "normalizing_power");
    assert_eq!(doc["result"]["verdict"]["n"], 1);
}

#[test]
fn derive_pipeline_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "gamma3.json",
        r#"{"variant":"congruence","n":3,"m":3,"image_generators":[]}"#,
    );
    let out = agt(&["derive", "--subgroup", &spec, "--budget", "512", "--json"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["outcome"]["kind"], "certified");
    assert_eq!(doc["outcome"]["positions"].as_object().unwrap().len(), 6);

    // replay the emitted transcript byte-for-byte, via both entry points
    let transcript = write(
        dir.path(),
        "transcript.json",
        std::str::from_utf8(&out.stdout).unwrap().trim(),
    );
    let out = agt(&["derive", "--replay", &transcript]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["byte_identical"], true);

    let out = agt(&["replay", "--transcript", &transcript]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["byte_identical"], true);

    // determinism of the transcript itself
    let again = agt(&["derive", "--subgroup", &spec, "--budget", "512", "--json"]);
    let original = agt(&["derive", "--subgroup", &spec, "--budget", "512", "--json"]);
    assert_eq!(again.stdout, original.stdout);
}

#[test]
fn replay_witness_report() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(
        dir.path(),
        "sq.json",
        r#"{"variant":"free","rank":2,"generators":["aa","bb"]}"#,
    );
    let out = agt(&[
        "probe",
        "--subgroup",
        &sq,
        "--direction",
        "a",
        "--mode",
        "env",
    ]);
    let doc = stdout_json(&out);
    let report = serde_json::to_string(&doc["result"]).unwrap();
    let report_path = write(dir.path(), "report.json", &report);
    let out = agt(&["replay", "--transcript", &report_path, "--subgroup", &sq]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["certificates_valid"], true);

    // witness reports without a subgroup are a precondition error
    let out = agt(&["replay", "--transcript", &report_path]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn proximal_reports() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "d.txt", "2 0 0\n0 1 0\n0 0 1/2\n");
    let out = agt(&["proximal", "--matrix", &m, "--tol", "1e-9"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["proximal"], true);
    let gap = doc["result"]["data"]["gap"].as_f64().unwrap();
    assert!((gap - 0.5).abs() < 1e-9);

    let twin = write(dir.path(), "twin.txt", "2 0\n0 2\n");
    let out = agt(&["proximal", "--matrix", &twin]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["proximal"], false);

    let out = agt(&["proximal", "--matrix", &m, "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_exhaustion_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "gamma2.json",
        r#"{"variant":"congruence","n":3,"m":2,"image_generators":[]}"#,
    );
    // a witness budget of zero cannot find the first commutator witness
    let out = agt(&[
        "derive",
        "--subgroup",
        &spec,
        "--budget",
        "0",
        "--search-budget",
        "10000",
    ]);
    assert_eq!(out.status.code(), Some(2), "budget exhaustion is exit 2");
}

#[test]
fn missing_file_is_precondition_error() {
    let out = agt(&["bruhat", "--matrix", "/nonexistent/m.txt"]);
    assert_eq!(out.status.code(), Some(1));
}
