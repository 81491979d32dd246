//! End-to-end tests of the `qmask` binary: exit-code contract, file
//! round-trips, report manifests.

use std::path::Path;
use std::process::{Command, Output};

fn qmask(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmask"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn build_verify_check_pipeline_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(&["mask", "build", "--d", "3", "--out", "s3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.path().join("s3.json").exists());

    let out = qmask(&["mask", "verify", "--masker", "s3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("MASKS"));

    let out = qmask(&["qecc", "check", "--masker", "s3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("CODE for every one-erasure channel"));
}

#[test]
fn order_six_build_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(&["mask", "build", "--d", "6"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("order 6"), "{}", stderr(&out));
}

#[test]
fn non_masking_isometries_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // |i⟩ ↦ |i⟩|0⟩|0⟩, a valid isometry that is not a masker
    let dims = qmask::tensor::MultipartiteDims::new(vec![2, 2, 2]).unwrap();
    let mut matrix = qmask::tensor::ComplexMatrix::zeros(8, 2);
    for i in 0..2 {
        matrix.set(i * 4, i, qmask::tensor::Complex64::new(1.0, 0.0));
    }
    let masker =
        qmask::masker::Masker::new(2, dims, matrix, qmask::masker::Provenance::User).unwrap();
    qmask::files::save_masker(dir.path().join("enc.json"), &masker).unwrap();

    let out = qmask(&["mask", "verify", "--masker", "enc.json"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("DOES NOT MASK"));

    let out = qmask(&["qecc", "check", "--masker", "enc.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mols_generation_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(&["mols", "gen", "--order", "4", "--out", "pair.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let out = qmask(&["mols", "verify", "--pair", "pair.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));

    // a square paired with itself collides on cell pairs
    let pair = qmask::files::load_pair(dir.path().join("pair.json")).unwrap();
    let broken = qmask::mols::MolsPair { first: pair.first.clone(), second: pair.first.clone() };
    qmask::files::save_pair(dir.path().join("broken.json"), &broken).unwrap();
    let out = qmask(&["mols", "verify", "--pair", "broken.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("appears at both"), "{}", stdout(&out));

    let out = qmask(&["mols", "gen", "--order", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn user_supplied_pairs_feed_the_builder() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qmask(&["mols", "gen", "--order", "4", "--out", "pair4.json"], dir.path()).status.code(),
        Some(0)
    );
    let out = qmask(
        &["mask", "build", "--d", "4", "--pair", "pair4.json", "--out", "s4.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = qmask(&["mask", "verify", "--masker", "s4.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));

    // a pair of the wrong order is an input error
    let out = qmask(&["mask", "build", "--d", "5", "--pair", "pair4.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_complex_entries_report_their_path() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qmask(&["mask", "build", "--d", "3", "--out", "s3.json"], dir.path()).status.code(),
        Some(0)
    );
    let text = std::fs::read_to_string(dir.path().join("s3.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["matrix"][0][0] = serde_json::json!([1.0, 0.0, 0.0]);
    std::fs::write(
        dir.path().join("bad.json"),
        serde_json::to_string_pretty(&value).unwrap(),
    )
    .unwrap();

    let out = qmask(&["mask", "verify", "--masker", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("matrix[0][0]"), "{err}");
    assert!(err.contains("3 elements"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = qmask(&["qecc", "check"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--masker"), "{}", stderr(&out));

    let out = qmask(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn recovery_reports_embed_manifests_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qmask(&["mask", "build", "--d", "3", "--out", "s3.json"], dir.path()).status.code(),
        Some(0)
    );
    let args = |report: &str| {
        vec![
            "qecc".to_string(),
            "recover".into(),
            "--masker".into(),
            "s3.json".into(),
            "--channel".into(),
            "depolarize".into(),
            "--j".into(),
            "1".into(),
            "--samples".into(),
            "25".into(),
            "--seed".into(),
            "11".into(),
            "--report".into(),
            report.into(),
        ]
    };
    for report in ["r1.json", "r2.json"] {
        let args: Vec<String> = args(report);
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = qmask(&arg_refs, dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }

    let r1: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r1.json")).unwrap())
            .unwrap();
    let r2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r2.json")).unwrap())
            .unwrap();
    // manifests carry provenance
    assert!(r1["manifest"]["command"].as_str().unwrap().contains("recover"));
    assert!(r1["manifest"]["version"].is_string());
    assert_eq!(r1["manifest"]["seeds"], serde_json::json!([11]));
    let hash = r1["manifest"]["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    // numeric payloads are rerun-identical
    assert_eq!(r1["report"], r2["report"]);
    assert_eq!(r1["report"]["verdict"], serde_json::json!(true));
}

#[test]
fn tilde_builds_target_the_enlarged_space() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(&["mask", "build", "--d", "5", "--tilde", "--out", "t5.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let masker = qmask::files::load_masker(dir.path().join("t5.json")).unwrap();
    assert_eq!(masker.dims().dims(), &[6, 6, 6]);
    assert_eq!(masker.input_dim(), 5);

    let out = qmask(&["qecc", "check", "--masker", "t5.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn state_set_verification_uses_the_given_set() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qmask(&["mask", "build", "--d", "3", "--out", "s3.json"], dir.path()).status.code(),
        Some(0)
    );
    let set = qmask::verifier::StateSet::computational_basis(3);
    qmask::files::write_value(
        dir.path().join("basis.json"),
        &qmask::files::state_set_to_value(&set),
    )
    .unwrap();
    let out = qmask(
        &["mask", "verify", "--masker", "s3.json", "--set", "basis.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("3-state set"));
}

#[test]
fn nogo_probe_reports_are_labeled_as_evidence() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(
        &[
            "nogo",
            "probe-d6",
            "--restarts",
            "1",
            "--iters",
            "25",
            "--seed",
            "3",
            "--report",
            "probe.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("numerical evidence only"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("probe.json")).unwrap())
            .unwrap();
    assert_eq!(report["kind"], serde_json::json!("defect-search"));
    assert!(report["report"]["interpretation"].as_str().unwrap().contains("evidence"));
    assert!(report["report"]["result"]["best_defect"].as_f64().unwrap() >= 0.0);
    assert_eq!(report["report"]["result"]["problem"]["dims"], serde_json::json!([6, 6, 6]));
}

#[test]
fn nogo_search_accepts_bipartite_dims() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmask(
        &["nogo", "search", "--k", "2", "--dims", "2,2", "--restarts", "2", "--iters", "60"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("best defect"));
}
