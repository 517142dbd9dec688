//! End-to-end runs of the compiled binary: exit codes, report shape, and
//! golden values.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn write_input(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> (Output, Value) {
    let output = Command::new(env!("CARGO_BIN_EXE_interlace"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(output.stdout.clone()).unwrap();
    let report: Value = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("report is not JSON ({e}): {stdout}"));
    (output, report)
}

fn coeffs(report: &Value, key: &str) -> Vec<String> {
    report["results"][key]
        .as_array()
        .unwrap_or_else(|| panic!("missing {key}: {report}"))
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

const UNIFORM_PAIR: &str = r#"{
    "dim": 2,
    "specs": [
        {"support": [
            {"prob": "1/2", "vector": [["1", "0"], ["0", "0"]]},
            {"prob": "1/2", "vector": [["0", "0"], ["1", "0"]]}
        ]},
        {"support": [
            {"prob": "1/2", "vector": [["1", "0"], ["0", "0"]]},
            {"prob": "1/2", "vector": [["0", "0"], ["1", "0"]]}
        ]}
    ]
}"#;

const HALF_IDENTITY_PAIR: &str = r#"{
    "dim": 2,
    "matrices": [
        [[["1/2", "0"], ["0", "0"]], [["0", "0"], ["1/2", "0"]]],
        [[["1/2", "0"], ["0", "0"]], [["0", "0"], ["1/2", "0"]]]
    ]
}"#;

const ORTHONORMAL_FOUR: &str = r#"{
    "dim": 4,
    "specs": [
        {"support": [{"prob": "1", "vector": [["1", "0"], ["0", "0"], ["0", "0"], ["0", "0"]]}]},
        {"support": [{"prob": "1", "vector": [["0", "0"], ["1", "0"], ["0", "0"], ["0", "0"]]}]},
        {"support": [{"prob": "1", "vector": [["0", "0"], ["0", "0"], ["1", "0"], ["0", "0"]]}]},
        {"support": [{"prob": "1", "vector": [["0", "0"], ["0", "0"], ["0", "0"], ["1", "0"]]}]}
    ]
}"#;

#[test]
fn mixedchar_identity_decomposition_gives_shifted_binomial() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(
        &dir,
        "identity3.json",
        r#"{
            "dim": 3,
            "matrices": [
                [[["1", "0"], ["0", "0"], ["0", "0"]],
                 [["0", "0"], ["0", "0"], ["0", "0"]],
                 [["0", "0"], ["0", "0"], ["0", "0"]]],
                [[["0", "0"], ["0", "0"], ["0", "0"]],
                 [["0", "0"], ["1", "0"], ["0", "0"]],
                 [["0", "0"], ["0", "0"], ["0", "0"]]],
                [[["0", "0"], ["0", "0"], ["0", "0"]],
                 [["0", "0"], ["0", "0"], ["0", "0"]],
                 [["0", "0"], ["0", "0"], ["1", "0"]]]
            ]
        }"#,
    );
    let (output, report) = run(&["mixedchar", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(coeffs(&report, "mu"), ["-1", "3", "-3", "1"]);
    assert_eq!(report["status"], "SATISFIED");
}

#[test]
fn mixedchar_of_an_empty_family_is_a_pure_power() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "empty.json", r#"{"dim": 2, "matrices": []}"#);
    let (output, report) = run(&["mixedchar", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(coeffs(&report, "mu"), ["0", "0", "1"]);
}

#[test]
fn mixedchar_of_two_half_identities_matches_the_golden_poly() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "halves.json", HALF_IDENTITY_PAIR);
    let (output, report) = run(&["mixedchar", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(coeffs(&report, "mu"), ["1/2", "-2", "1"]);
    let digest = report["input_sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
}

#[test]
fn mixedchar_audit_retains_subset_terms() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "halves.json", HALF_IDENTITY_PAIR);
    let (output, report) = run(&["mixedchar", path.to_str().unwrap(), "--audit"]);
    assert!(output.status.success());
    let terms = report["results"]["subset_terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    assert!(terms.iter().any(|t| t["subset"].as_array().unwrap().is_empty()));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "halves.json", HALF_IDENTITY_PAIR);
    let first = Command::new(env!("CARGO_BIN_EXE_interlace"))
        .args(["mixedchar", path.to_str().unwrap()])
        .output()
        .unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_interlace"))
        .args(["mixedchar", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_identity_on_the_uniform_pair_is_satisfied() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "uniform.json", UNIFORM_PAIR);
    let (output, report) = run(&["verify-identity", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(report["status"], "SATISFIED");
    assert_eq!(report["results"]["identity_holds"], true);
    assert_eq!(report["results"]["outcome_count"], "4");
}

#[test]
fn verify_identity_on_a_deterministic_file_is_satisfied() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "det.json", ORTHONORMAL_FOUR);
    let (output, report) = run(&["verify-identity", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(report["status"], "SATISFIED");
}

#[test]
fn corrupted_probabilities_name_the_spec_and_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = UNIFORM_PAIR.replacen("1/2", "1/3", 1);
    let path = write_input(&dir, "bad.json", &bad);
    let (output, report) = run(&["verify-identity", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4));
    assert_eq!(report["status"], "ERROR");
    let msg = report["error"].as_str().unwrap();
    assert!(msg.contains("spec 0"), "got: {msg}");
}

#[test]
fn malformed_json_reports_position_and_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "broken.json", "{\"dim\": 2,\n  \"specs\": [}");
    let (output, report) = run(&["mixedchar", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4));
    let msg = report["error"].as_str().unwrap();
    assert!(msg.contains("line 2"), "got: {msg}");
}

#[test]
fn certify_reports_the_exact_threshold_and_decimal() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(
        &dir,
        "diag.json",
        r#"{
            "dim": 2,
            "matrices": [
                [[["1/2", "0"], ["0", "0"]], [["0", "0"], ["0", "0"]]]
            ]
        }"#,
    );
    let (output, report) = run(&["certify", path.to_str().unwrap(), "--eps", "1/2"]);
    assert!(output.status.success(), "stderr: {report}");
    assert_eq!(report["status"], "CERTIFIED");
    let threshold = &report["results"]["threshold"];
    assert_eq!(threshold["rational_part"], "3/2");
    assert_eq!(threshold["radical_coeff"], "2");
    assert_eq!(threshold["radicand"], "1/2");
    let decimal = threshold["decimal"].as_str().unwrap();
    assert!(decimal.starts_with("≈2.91421356"), "got: {decimal}");
}

#[test]
fn certify_instance_files_default_to_their_own_eps() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "uniform.json", UNIFORM_PAIR);
    let (output, report) = run(&["certify", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(report["results"]["eps"], "1");
    assert_eq!(report["status"], "CERTIFIED");
}

#[test]
fn certify_rejects_a_family_above_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(
        &dir,
        "big.json",
        r#"{
            "dim": 1,
            "matrices": [
                [[["2", "0"]]]
            ]
        }"#,
    );
    let (output, report) = run(&["certify", path.to_str().unwrap(), "--eps", "2"]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(report["status"], "HYPOTHESIS_VIOLATED");
    assert!(report["error"].as_str().unwrap().contains("identity"));
}

#[test]
fn assign_balances_the_uniform_pair() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "uniform.json", UNIFORM_PAIR);
    let (output, report) = run(&["assign", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(report["status"], "SATISFIED");
    let chosen: Vec<u64> = report["results"]["chosen"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(chosen, [0, 1]);
    assert_eq!(report["results"]["within_threshold"], true);
    let decimal = report["results"]["realized_norm"]["decimal"].as_str().unwrap();
    assert!(decimal.starts_with("≈1.0000") || decimal.starts_with("≈0.9999"), "got: {decimal}");
}

#[test]
fn assign_refuses_instances_above_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(
        &dir,
        "big.json",
        r#"{
            "dim": 1,
            "specs": [
                {"support": [{"prob": "1", "vector": [["2", "0"]]}]}
            ]
        }"#,
    );
    let (output, report) = run(&["assign", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(report["status"], "HYPOTHESIS_VIOLATED");
}

#[test]
fn partition_splits_the_orthonormal_four_into_two_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "basis.json", ORTHONORMAL_FOUR);
    let (output, report) = run(&["partition", path.to_str().unwrap(), "--r", "2"]);
    assert!(output.status.success());
    assert_eq!(report["status"], "SATISFIED");
    let blocks = report["results"]["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 2);
    let sizes: Vec<usize> = blocks.iter().map(|b| b.as_array().unwrap().len()).collect();
    assert_eq!(sizes.iter().sum::<usize>(), 4);
    let bound = &report["results"]["bound"];
    let decimal = bound["decimal"].as_str().unwrap();
    assert!(decimal.starts_with("≈2.91421356"), "got: {decimal}");
    assert_eq!(report["results"]["delta"], "1");
}

#[test]
fn partition_rejects_vectors_longer_than_delta() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "basis.json", ORTHONORMAL_FOUR);
    let (output, report) =
        run(&["partition", path.to_str().unwrap(), "--r", "2", "--delta", "1/2"]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(report["status"], "HYPOTHESIS_VIOLATED");
}

#[test]
fn partition_requires_deterministic_specs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "uniform.json", UNIFORM_PAIR);
    let (output, report) = run(&["partition", path.to_str().unwrap(), "--r", "2"]);
    assert_eq!(output.status.code(), Some(4));
    assert!(report["error"].as_str().unwrap().contains("deterministic"));
}

#[test]
fn bruteforce_assignment_finds_the_balanced_pair() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "uniform.json", UNIFORM_PAIR);
    let (output, report) =
        run(&["bruteforce", path.to_str().unwrap(), "--mode", "assignment"]);
    assert!(output.status.success());
    let chosen: Vec<u64> = report["results"]["chosen"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(chosen, [0, 1]);
}

#[test]
fn bruteforce_partition_matches_the_greedy_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "basis.json", ORTHONORMAL_FOUR);
    let (output, report) =
        run(&["bruteforce", path.to_str().unwrap(), "--mode", "partition", "--r", "2"]);
    assert!(output.status.success());
    let blocks = report["results"]["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 2);
    for norm in report["results"]["block_norms"].as_array().unwrap() {
        let decimal = norm["decimal"].as_str().unwrap();
        assert!(decimal.starts_with("≈1.0000") || decimal.starts_with("≈0.9999"));
    }
}

#[test]
fn guard_violations_exit_3_and_name_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "uniform.json", UNIFORM_PAIR);
    let (output, report) = run(&[
        "bruteforce",
        path.to_str().unwrap(),
        "--mode",
        "assignment",
        "--guard-outcomes",
        "2",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert_eq!(report["status"], "ERROR");
    let msg = report["error"].as_str().unwrap();
    assert!(msg.contains('4') && msg.contains('2'), "got: {msg}");
}

#[test]
fn missing_files_exit_4() {
    let (output, report) = run(&["mixedchar", "/nonexistent/input.json"]);
    assert_eq!(output.status.code(), Some(4));
    assert_eq!(report["status"], "ERROR");
    assert!(report["input_sha256"].is_null());
}

#[test]
fn width_flag_controls_bracket_tightness() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(&dir, "halves.json", HALF_IDENTITY_PAIR);
    let (output, report) =
        run(&["mixedchar", path.to_str().unwrap(), "--width", "1/16"]);
    assert!(output.status.success());
    let bracket = report["results"]["largest_root"]["bracket"].as_array().unwrap();
    assert_eq!(bracket.len(), 2);
    // Root is 1 + 1/sqrt(2); a width-1/16 bracket still pins the leading digits.
    let decimal = report["results"]["largest_root"]["decimal"].as_str().unwrap();
    assert!(decimal.starts_with("≈1.7"), "got: {decimal}");
}
