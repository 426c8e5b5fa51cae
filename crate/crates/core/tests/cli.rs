//! Exit-code contract and artifact layout of the CLI:
//! 0 = all tolerances met, 1 = usage error, 2 = tolerance failure.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homodiff"))
}

#[test]
fn axioms_pass_and_emit_artifacts() {
    let dir = std::env::temp_dir().join(format!("homodiff-cli-{}", std::process::id()));
    let out = bin()
        .args(["axioms", "--seed", "42", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report_path = dir.join("axioms_report.json");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["experiment"], "axioms");
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["passed"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identical_seeds_give_identical_artifacts_across_worker_counts() {
    let dirs: Vec<_> = (0..2)
        .map(|i| std::env::temp_dir().join(format!("homodiff-det-{}-{i}", std::process::id())))
        .collect();
    for (dir, workers) in dirs.iter().zip(["1", "2"]) {
        let status = bin()
            .args(["axioms", "--seed", "7", "--workers", workers, "--out"])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let read = |d: &std::path::Path| std::fs::read_to_string(d.join("axioms_violations.json")).unwrap();
    assert_eq!(read(&dirs[0]), read(&dirs[1]));
    for dir in &dirs {
        std::fs::remove_dir_all(dir).unwrap();
    }
}

#[test]
fn tolerance_failure_exits_two() {
    // An impossible tolerance forces a failure that is not a usage error.
    let cfg = r#"{"experiment":"support","nodes":128,"rel_slack":0.0,"threshold":1e300}"#;
    let path = std::env::temp_dir().join(format!("homodiff-cfg-{}.json", std::process::id()));
    std::fs::write(&path, cfg).unwrap();
    let out = bin().args(["support", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAILED ["), "{stdout}");
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn usage_errors_exit_one() {
    // Mismatched config/subcommand pair.
    let cfg = r#"{"experiment":"axioms"}"#;
    let path = std::env::temp_dir().join(format!("homodiff-mismatch-{}.json", std::process::id()));
    std::fs::write(&path, cfg).unwrap();
    let out = bin().args(["support", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Invalid parameter range caught before compute.
    let bad = r#"{"experiment":"axioms","trials":0}"#;
    std::fs::write(&path, bad).unwrap();
    let out = bin().args(["axioms", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn stencil_dump_writes_csv() {
    let out = bin()
        .args(["stencil-dump", "--dimension", "2", "--k", "8", "--kind", "circle"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("d0,d1,weight\n"));
    assert_eq!(text.lines().count(), 9);
}
