//! End-to-end checks of the command-line binary: exit codes, the JSON error
//! contract on stderr, file outputs, and run-to-run reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn gsmppm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsmppm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary must launch")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

#[test]
fn help_and_version_exit_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let help = gsmppm(dir.path(), &["--help"]);
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("Usage"));

    let version = gsmppm(dir.path(), &["--version"]);
    assert!(version.status.success());
}

#[test]
fn design_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let first = gsmppm(
        dir.path(),
        &["design", "--pattern", "4,4,2,5,2,32", "--out", "a.json"],
    );
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    // The written path is echoed for scripting.
    assert_eq!(String::from_utf8_lossy(&first.stdout).trim(), "a.json");

    let second = gsmppm(
        dir.path(),
        &["design", "--pattern", "4,4,2,5,2,32", "--out", "b.json"],
    );
    assert!(second.status.success());

    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b, "same design request must write identical bytes");
    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(parsed["pattern"]["l"], 5);
}

#[test]
fn malformed_pattern_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsmppm(dir.path(), &["design", "--pattern", "4,4"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["kind"], "validation");
}

#[test]
fn missing_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsmppm(dir.path(), &["ber", "--config", "nope.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["kind"], "validation");
    assert!(
        err["error"].as_str().unwrap().contains("config not found"),
        "unexpected message: {err}"
    );
}

#[test]
fn threshold_emits_one_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsmppm(
        dir.path(),
        &[
            "threshold",
            "--code",
            "ar4ja-r12",
            "--pattern",
            "4,4,2,5,2,32",
            "--samples",
            "2000",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 2, "header plus one row:\n{text}");
    assert_eq!(lines[0], "code,pattern,constellation,sigma_x,threshold_db,bracket_db,seed");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "ar4ja-r12");
    assert_eq!(fields[1], "4-4-2-5-2-32");
    let threshold: f64 = fields[4].parse().unwrap();
    assert!((-8.0..4.0).contains(&threshold), "implausible threshold {threshold}");
}

#[test]
fn capacity_csv_covers_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsmppm(
        dir.path(),
        &[
            "capacity",
            "--pattern",
            "4,4,2,5,2,32",
            "--snr",
            "-2,0",
            "--samples",
            "2000",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "snr_db,c_cm,c_bicm,stderr_cm,stderr_bicm,n_samples");
    assert_eq!(lines.len(), 3, "header plus two grid points:\n{text}");
}

#[test]
fn ber_runs_a_config_file_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "pattern": { "n_tx": 4, "n_rx": 4, "n_a": 2, "l": 5, "l_a": 2, "m_s": 32 },
        "lift": 30,
        "sigma_x": 0.3,
        "snr_db": [30.0],
        "stop": { "min_frame_errors": 50, "max_frames": 60 },
        "t_bp": 20,
        "seed": 5
    });
    std::fs::write(dir.path().join("run.json"), config.to_string()).unwrap();

    let out = gsmppm(dir.path(), &["ber", "--config", "run.json", "--out", "results"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("results/ber.csv")).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines[0], "snr_db,bit_errors,bits,frames,frame_errors,ber,fer,seconds");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("30,"), "row should carry the SNR grid value: {}", lines[1]);

    // The same config and seed must reproduce the same row.
    let again = gsmppm(dir.path(), &["ber", "--config", "run.json", "--out", "again"]);
    assert!(again.status.success());
    let repeat = std::fs::read_to_string(dir.path().join("again/ber.csv")).unwrap();
    assert_eq!(csv, repeat);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "pattern": { "n_tx": 4, "n_rx": 4, "n_a": 2, "l": 5, "l_a": 2, "m_s": 32 },
        "lift": 30,
        "sigma_x": 0.3,
        "snr_db": [30.0],
        "typo_field": true
    });
    std::fs::write(dir.path().join("run.json"), config.to_string()).unwrap();
    let out = gsmppm(dir.path(), &["ber", "--config", "run.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "validation");
}
