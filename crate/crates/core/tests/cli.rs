//! End-to-end CLI tests: flags, output files, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_heegner-moments")
}

fn run(args: &[&str], out: &Path) -> Output {
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    full.push("--out".into());
    full.push(out.to_str().unwrap().into());
    Command::new(bin())
        .args(&full)
        .output()
        .expect("spawn heegner-moments")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hm-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn density_emits_report_and_set() {
    let out = tmpdir("density");
    let o = run(&["density", "--conductor", "11", "--ymax", "20000"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(report["subcommand"], "density");
    assert_eq!(report["conductor"], 11);
    let ratio = report["results"]["ratio"].as_f64().unwrap();
    assert!((ratio - 0.0929).abs() < 0.01, "ratio {ratio}");
    // every output records the seed
    assert!(report["seed"].is_u64());
    let set_csv = std::fs::read_to_string(out.join("heegner_set.csv")).unwrap();
    assert!(set_csv.starts_with("# heegner_set v1 seed="));
    assert!(set_csv.contains("\n-7,"));
    // metadata lives in its own file, not in the deterministic outputs
    assert!(out.join("run_meta.json").exists());
    assert!(!std::fs::read_to_string(out.join("run.json"))
        .unwrap()
        .contains("timestamp"));
}

#[test]
fn lprime_self_checks_pass() {
    let out = tmpdir("lprime");
    let o = run(&["lprime", "--d", "-19"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert!(report["results"]["lprime"].as_f64().unwrap() >= -1e-6);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["passed"].as_bool().unwrap()));
}

#[test]
fn lprime_rejects_non_heegner_d() {
    let out = tmpdir("lprime-bad");
    // -3 is not a Heegner discriminant for N = 11
    let o = run(&["lprime", "--d", "-3"], &out);
    assert_eq!(o.status.code(), Some(2));
    // -9 is not fundamental
    let o = run(&["lprime", "--d", "-9"], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn moment_emits_all_csv_files() {
    let out = tmpdir("moment");
    let o = run(&["moment", "--ylist", "500,1000", "--sym2-x0", "500"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for file in [
        "run.json",
        "per_d.csv",
        "summary.csv",
        "plotdata_residual.csv",
    ] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("# summary v1\ny,empirical,alpha,beta,main,residual\n"));
    assert_eq!(summary.lines().count(), 4); // schema + header + 2 rows
    let per_d = std::fs::read_to_string(out.join("per_d.csv")).unwrap();
    assert!(per_d.starts_with("# per_d v1\nd,lprime,height,weight\n"));
}

#[test]
fn moment_rejects_unsorted_ylist() {
    let out = tmpdir("moment-bad");
    let o = run(&["moment", "--ylist", "1000,500", "--sym2-x0", "500"], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn conductor_mismatch_is_config_error() {
    let out = tmpdir("mismatch");
    let o = run(&["density", "--conductor", "37", "--ymax", "10000"], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn curve_file_roundtrip() {
    let out = tmpdir("curvefile");
    std::fs::create_dir_all(&out).unwrap();
    let path = out.join("curve.json");
    std::fs::write(
        &path,
        r#"{"label":"37a1","a_invariants":[0,0,1,-1,0],"conductor":37,"modular_degree":2}"#,
    )
    .unwrap();
    let o = run(
        &[
            "density",
            "--curve",
            path.to_str().unwrap(),
            "--ymax",
            "50000",
        ],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(report["conductor"], 37);
}

#[test]
fn failing_invariant_exits_3_with_machine_readable_list() {
    let out = tmpdir("fail3");
    // at ymax = 4N the density fluctuation exceeds 2%
    let o = run(&["density", "--ymax", "44"], &out);
    assert_eq!(o.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(
        v["failed_checks"][0]["name"],
        "density_vs_enumeration_oracle"
    );
}

#[test]
fn error_subcommand_checks_pass() {
    let out = tmpdir("error");
    let o = run(&["error", "--y", "600"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("error_split.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"].as_bool().unwrap()));
    // the signed error is far below the cancellation-free majorant
    let factor = report["results"]["cancellation_factor"].as_f64().unwrap();
    assert!(factor > 1.0);
}

#[test]
fn unknown_curve_label_is_config_error() {
    let out = tmpdir("badcurve");
    let o = run(
        &["density", "--curve", "unknown99", "--ymax", "10000"],
        &out,
    );
    assert_eq!(o.status.code(), Some(2));
}
