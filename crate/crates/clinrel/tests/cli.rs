mod common;

use std::fs;

use common::{clinrel, fixture_dir, write_fast_config, write_small_registry};

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_small_registry(dir.path(), 2);
    let ok = clinrel(&["validate", s(&manifest)], None);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("dim 12"));

    fs::remove_file(dir.path().join("syn_ad_2k.fvec")).unwrap();
    let bad = clinrel(&["validate", s(&manifest)], None);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("syn_ad_2k: file not found"));

    let unreadable = clinrel(&["validate", s(&dir.path().join("nope.json"))], None);
    assert_eq!(unreadable.status.code(), Some(2));
}

#[test]
fn bad_usage_and_bad_thread_count_exit_2() {
    assert_eq!(clinrel(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(clinrel(&["sweep"], None).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_small_registry(dir.path(), 2);
    assert_eq!(clinrel(&["validate", s(&manifest)], Some("zero")).status.code(), Some(2));
}

#[test]
fn sweep_from_saved_rows_marks_best_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let from = fixture_dir("kid_sweep").join("sweep.json");
    let run = clinrel(&["sweep", "--from", s(&from), "--out", s(&out)], None);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let md = fs::read_to_string(out.join("sweep.md")).unwrap();
    assert!(md.contains("**0.069 (0.001)**"), "{md}");
    assert!(md.contains("0.073 (0.002)"));
    assert!(md.contains("Selected iteration: 8k"));

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["selection"]["chosen"], 8000);
    assert_eq!(json["markers"]["same_ad"], serde_json::json!([4000, 6000, 8000]));
    assert_eq!(json["markers"]["cross_ad"], serde_json::json!([2000]));
    assert_eq!(json["markers"]["same_nonad"], serde_json::json!([8000]));
    assert_eq!(json["markers"]["cross_nonad"], serde_json::json!([2000]));

    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn sweep_only_writes_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let from = fixture_dir("kid_sweep").join("sweep.json");
    let run = clinrel(&["sweep", "--from", s(&from), "--out", s(&out), "--format", "csv"], None);
    assert_eq!(run.status.code(), Some(0));
    assert!(out.join("sweep.csv").exists());
    assert!(!out.join("sweep.md").exists());
}

#[test]
fn tsne_writes_one_circle_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_small_registry(dir.path(), 4);
    let config = write_fast_config(dir.path(), &manifest);
    let out = dir.path().join("out");
    let run = clinrel(&["tsne", "--config", s(&config), "--out", s(&out)], Some("2"));
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for it in [1000, 2000] {
        let svg = fs::read_to_string(out.join(format!("tsne_{it}.svg"))).unwrap();
        // real train (40 + 25) + synthetic (25 + 25)
        assert_eq!(svg.matches("<circle").count(), 115);
        let csv = fs::read_to_string(out.join(format!("tsne_{it}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 116);
    }
}

#[test]
fn classify_on_committed_fixture_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let manifest = fixture_dir("augmentation").join("manifest.json");
    let run = clinrel(
        &["classify", "--manifest", s(&manifest), "--iteration", "1", "--out", s(&out), "--format", "json"],
        None,
    );
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let got: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("augmentation.json")).unwrap()).unwrap();
    let golden: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fixture_dir("augmentation").join("golden.json")).unwrap()).unwrap();
    for run in ["real_only", "real_plus_synth"] {
        assert_eq!(got[run]["confusion"], golden["same_distribution"][run]["confusion"], "{got}");
    }
}

#[test]
fn missing_role_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let manifest = fixture_dir("augmentation").join("manifest.json");
    let run = clinrel(&["classify", "--manifest", s(&manifest), "--iteration", "7", "--out", s(&out)], None);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("iteration 7"));
}

#[test]
fn report_writes_combined_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_small_registry(dir.path(), 6);
    let config = write_fast_config(dir.path(), &manifest);
    let out = dir.path().join("out");
    let run = clinrel(&["report", "--config", s(&config), "--out", s(&out)], None);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let md = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("tsne_1000.svg"));
    for f in ["sweep.md", "augmentation.csv", "tsne_2000.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
}
