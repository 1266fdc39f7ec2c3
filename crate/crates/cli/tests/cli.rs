//! End-to-end runs of the `frames` binary: file round-trips, seeded
//! reproducibility, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use frames_core::json::matrix_to_json;
use frames_core::matrix::ComplexMatrix;

fn frames(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frames"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_bell_state(dir: &Path) -> String {
    let mut bell = ComplexMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell.set(i, j, 0.5.into());
    }
    let path = dir.join("bell.json");
    std::fs::write(&path, matrix_to_json(&bell).unwrap()).unwrap();
    path.display().to_string()
}

fn write_mixed_state(dir: &Path, n: usize) -> String {
    let rho = ComplexMatrix::identity(n).scaled((1.0 / n as f64).into());
    let path = dir.join(format!("mixed{n}.json"));
    std::fs::write(&path, matrix_to_json(&rho).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn generate_classify_roundtrip_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = frames(
        &["generate", "--family", "mub-prime", "--dim", "5", "--out", "mub5.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let set_json = std::fs::read_to_string(dir.path().join("mub5.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&set_json).unwrap();
    assert_eq!(parsed["vectors"].as_array().unwrap().len(), 30);
    assert_eq!(parsed["bases"].as_array().unwrap().len(), 6);
    assert_eq!(parsed["disjoint"], serde_json::Value::Bool(true));

    // regenerating produces identical bytes
    let out = frames(
        &["generate", "--family", "mub-prime", "--dim", "5", "--out", "mub5b.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let again = std::fs::read_to_string(dir.path().join("mub5b.json")).unwrap();
    assert_eq!(set_json, again);

    // classification reads the file back and reports the full chain
    let out = frames(&["classify", "--set", "mub5.json"], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["mutually_unbiased"], serde_json::Value::Bool(true));
    assert_eq!(report["rank"], serde_json::Value::from(25));
}

#[test]
fn generate_compose_multiplies_sets() {
    let dir = tempfile::tempdir().unwrap();
    assert!(frames(
        &["generate", "--family", "mub-prime", "--dim", "2", "--out", "a.json"],
        dir.path()
    )
    .status
    .success());
    assert!(frames(
        &["generate", "--family", "mub-prime", "--dim", "3", "--out", "b.json"],
        dir.path()
    )
    .status
    .success());
    let out = frames(
        &["generate", "--family", "compose", "--sets", "a.json,b.json", "--out", "ab.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ab.json")).unwrap())
            .unwrap();
    assert_eq!(parsed["dim"], serde_json::Value::from(6));
    assert_eq!(parsed["vectors"].as_array().unwrap().len(), 72);
    assert_eq!(parsed["bases"].as_array().unwrap().len(), 12);
}

#[test]
fn tomo_sim_is_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    assert!(frames(
        &["generate", "--family", "mub-prime", "--dim", "2", "--out", "pauli.json"],
        dir.path()
    )
    .status
    .success());
    let state = write_mixed_state(dir.path(), 2);
    for prefix in ["run1", "run2"] {
        let out = frames(
            &[
                "tomo-sim", "--set", "pauli.json", "--state", &state, "--shots", "20000",
                "--seed", "7", "--out-prefix", prefix,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for suffix in ["counts.json", "estimate.json", "metrics.json"] {
        let a = std::fs::read(dir.path().join(format!("run1.{suffix}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("run2.{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix} differs between identical runs");
    }
    let counts: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run1.counts.json")).unwrap())
            .unwrap();
    assert_eq!(counts["shots_per_basis"], serde_json::Value::from(20000));
    assert_eq!(counts["counts"].as_array().unwrap().len(), 3);
    let metrics: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run1.metrics.json")).unwrap(),
    )
    .unwrap();
    assert!(metrics["trace_distance"].as_f64().unwrap() < 0.05);
}

#[test]
fn decompose_and_robustness_on_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    assert!(frames(
        &["generate", "--family", "mub-prime", "--dim", "2", "--out", "p.json"],
        dir.path()
    )
    .status
    .success());
    let bell = write_bell_state(dir.path());

    let out = frames(
        &["decompose", "--sets", "p.json,p.json", "--state", &bell, "--out", "form.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let form: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("form.json")).unwrap())
            .unwrap();
    let alpha = form["alpha"].as_f64().unwrap();
    let beta = form["beta"].as_f64().unwrap();
    assert!((alpha - 4.0 * beta - 1.0).abs() < 1e-9);
    assert!(beta > 0.5);

    let out = frames(
        &["robustness", "--sets", "p.json,p.json", "--state", &bell],
        dir.path(),
    );
    assert!(out.status.success());
    let optimal: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let beta_star = optimal["beta"].as_f64().unwrap();
    assert!((beta_star - 0.5).abs() < 1e-6);
    assert!((optimal["robustness_normalized"].as_f64().unwrap() - 2.0).abs() < 1e-5);
    assert!(beta_star <= beta);
}

#[test]
fn validation_errors_exit_2_with_machine_readable_body() {
    let dir = tempfile::tempdir().unwrap();

    // composite dimension for the prime-only family
    let out = frames(
        &["generate", "--family", "mub-prime", "--dim", "4", "--out", "bad.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["class"], serde_json::Value::from("validation"));
    assert!(!dir.path().join("bad.json").exists());

    // missing file
    let out = frames(&["classify", "--set", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // non-density state for tomo-sim
    assert!(frames(
        &["generate", "--family", "mub-prime", "--dim", "2", "--out", "p.json"],
        dir.path()
    )
    .status
    .success());
    let mut bad_state = ComplexMatrix::zeros(2, 2);
    bad_state.set(0, 0, 1.5.into());
    bad_state.set(1, 1, (-0.5).into());
    std::fs::write(dir.path().join("bad_state.json"), matrix_to_json(&bad_state).unwrap())
        .unwrap();
    let out = frames(
        &[
            "tomo-sim", "--set", "p.json", "--state", "bad_state.json", "--shots", "10",
            "--seed", "1", "--out-prefix", "x",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("density"));

    // tomo-sim on a non-disjoint grouping
    assert!(frames(
        &["generate", "--family", "standard-complete", "--dim", "3", "--out", "sc3.json"],
        dir.path()
    )
    .status
    .success());
    let state3 = write_mixed_state(dir.path(), 3);
    let out = frames(
        &[
            "tomo-sim", "--set", "sc3.json", "--state", &state3, "--shots", "10", "--seed",
            "1", "--out-prefix", "y",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_report_is_byte_stable_through_reserialization() {
    let dir = tempfile::tempdir().unwrap();
    assert!(frames(
        &["generate", "--family", "weyl-complete", "--dim", "4", "--out", "w4.json"],
        dir.path()
    )
    .status
    .success());
    let out1 = frames(&["classify", "--set", "w4.json", "--out", "r1.json"], dir.path());
    assert!(out1.status.success());
    let out2 = frames(&["classify", "--set", "w4.json", "--out", "r2.json"], dir.path());
    assert!(out2.status.success());
    let r1 = std::fs::read(dir.path().join("r1.json")).unwrap();
    let r2 = std::fs::read(dir.path().join("r2.json")).unwrap();
    assert_eq!(r1, r2);
    let report: serde_json::Value = serde_json::from_slice(&r1).unwrap();
    assert_eq!(report["representative"], serde_json::Value::Bool(true));
    assert_eq!(report["complete"], serde_json::Value::Bool(true));
}

#[test]
fn env_var_overrides_default_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    // an absurdly loose tolerance makes basis-orthonormality validation
    // accept anything, and an absurdly tight one rejects honest rounding;
    // both paths must at least parse the variable
    let out = Command::new(env!("CARGO_BIN_EXE_frames"))
        .args(["generate", "--family", "mub-prime", "--dim", "3", "--out", "m3.json"])
        .env("FRAMES_TOL", "1e-6")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());

    let out = Command::new(env!("CARGO_BIN_EXE_frames"))
        .args(["classify", "--set", "m3.json", "--tol", "1e-3"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
