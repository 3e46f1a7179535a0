//! End-to-end command-line contract: exit codes, machine-output stability,
//! and the embedded example registry, all exercised through the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbs"))
        .env_remove("MBS_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn mbs_with_seed(seed: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbs"))
        .env("MBS_SEED", seed)
        .args(args)
        .output()
        .expect("binary runs")
}

fn example_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(format!("{name}.spec"))
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("machine output is JSON")
}

const EXAMPLES: [&str; 4] = ["t2", "s2xs1", "s2xt2", "s3"];

#[test]
fn validate_and_cohomology_accept_all_examples() {
    for name in EXAMPLES {
        let path = example_path(name);
        let path = path.to_str().unwrap();
        for format in ["text", "machine"] {
            for command in ["validate", "cohomology", "inequalities", "witten-dims"] {
                let output = mbs(&["--format", format, command, path]);
                assert_eq!(
                    output.status.code(),
                    Some(0),
                    "{name} {command} ({format}): {}{}",
                    String::from_utf8_lossy(&output.stdout),
                    String::from_utf8_lossy(&output.stderr),
                );
            }
        }
    }
}

#[test]
fn machine_output_is_deterministic() {
    let path = example_path("s3");
    let args = ["--format", "machine", "cohomology", path.to_str().unwrap()];
    let first = mbs(&args);
    let second = mbs(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let report = stdout_json(&first);
    assert_eq!(report["status"], "ok");
    assert_eq!(report["payload"]["betti"], serde_json::json!([1, 0, 0, 1]));
    assert_eq!(report["payload"]["matches_reference"], serde_json::json!(true));
}

#[test]
fn invalid_rational_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spec");
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "manifold_dim": 1,
  "orbits": [
    {
      "label": "A",
      "torus_dim": 0,
      "index": 0,
      "f_value": "1/0",
      "generators": []
    }
  ]
}
"#,
    )
    .unwrap();
    let output = mbs(&["--format", "machine", "validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert_eq!(stdout_json(&output)["status"], "validation_error");
}

#[test]
fn tampered_grading_is_rejected_by_every_command() {
    // Move the single raw entry of the sphere document to an illegal
    // degree pair; assembly must refuse it before any rank computation.
    let source = std::fs::read_to_string(example_path("s3")).unwrap();
    let tampered = source.replace("\"row_index\": [],", "\"row_index\": [\n            1\n          ],");
    assert_ne!(tampered, source, "the replacement must hit");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tampered.spec");
    std::fs::write(&path, &tampered).unwrap();

    for command in ["validate", "cohomology"] {
        let output = mbs(&["--format", "machine", command, path.to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(1), "{command}");
        assert_eq!(stdout_json(&output)["status"], "validation_error", "{command}");
    }
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(mbs(&["--definitely-not-a-flag"]).status.code(), Some(1));
    assert_eq!(mbs(&["cohomology"]).status.code(), Some(1), "missing path is a usage error");
    assert_eq!(mbs(&["--help"]).status.code(), Some(0));
    assert_eq!(mbs(&["--version"]).status.code(), Some(0));
}

#[test]
fn missing_file_is_an_io_error() {
    let output = mbs(&["cohomology", "/nonexistent/nowhere.spec"]);
    assert_eq!(output.status.code(), Some(4));
    assert!(!output.stderr.is_empty());
}

#[test]
fn betti_override_can_violate_inequalities() {
    let path = example_path("s3");
    let output = mbs(&[
        "--format",
        "machine",
        "inequalities",
        path.to_str().unwrap(),
        "--betti",
        "1,5,0,1",
    ]);
    assert_eq!(output.status.code(), Some(3));
    let report = stdout_json(&output);
    assert_eq!(report["status"], "inequality_violation");
    assert_eq!(report["payload"]["betti_source"], "override");
    let n1 = &report["payload"]["per_n"][1];
    assert_eq!(n1["lhs"], 0);
    assert_eq!(n1["rhs"], 4);
    assert_eq!(n1["holds"], false);
}

#[test]
fn example_text_mode_prints_sources_verbatim() {
    for name in EXAMPLES {
        let output = mbs(&["example", name]);
        assert_eq!(output.status.code(), Some(0));
        let on_disk = std::fs::read(example_path(name)).unwrap();
        assert_eq!(output.stdout, on_disk, "{name}");
    }
}

#[test]
fn example_listing_and_unknown_name() {
    let listing = mbs(&["--format", "machine", "example"]);
    assert_eq!(listing.status.code(), Some(0));
    let names: Vec<String> = stdout_json(&listing)["payload"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(names, EXAMPLES);

    let unknown = mbs(&["--format", "machine", "example", "klein"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(stdout_json(&unknown)["payload"]["available"], serde_json::json!(EXAMPLES));
}

#[test]
fn flow_runs_are_reproducible_under_a_pinned_seed() {
    let args = ["--format", "machine", "flow", "s3", "critical", "--seeds", "3"];
    let first = mbs_with_seed("123", &args);
    let second = mbs_with_seed("123", &args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout_json(&first)["payload"]["rng_seed"], 123);
}

#[test]
fn malformed_seed_is_rejected() {
    let output = mbs_with_seed("abc", &["--format", "machine", "flow", "s3", "critical"]);
    assert_eq!(output.status.code(), Some(1));
    assert_eq!(stdout_json(&output)["status"], "validation_error");
}

#[test]
fn constant_function_examples_have_no_flow_oracle() {
    for name in ["t2", "torus2"] {
        let output = mbs(&["--format", "machine", "flow", name, "critical", "--seeds", "2"]);
        assert_eq!(output.status.code(), Some(1), "{name}");
        assert_eq!(stdout_json(&output)["status"], "validation_error", "{name}");
    }
}

#[test]
fn unknown_flow_example_is_rejected() {
    let output = mbs(&["--format", "machine", "flow", "mobius", "critical"]);
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_json(&output);
    assert_eq!(report["status"], "validation_error");
    let message = report["payload"]["error"].as_str().unwrap();
    assert!(message.contains("available"), "{message}");
}

#[test]
fn connection_scan_rejects_bad_upper_orbits() {
    let missing = mbs(&["--format", "machine", "flow", "s3", "connections", "--upper", "S_9"]);
    assert_eq!(missing.status.code(), Some(1));

    let bottom = mbs(&["--format", "machine", "flow", "s3", "connections", "--upper", "S_0"]);
    assert_eq!(bottom.status.code(), Some(1));
}
