//! End-to-end runs of the compiled binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grasscode"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("grasscode-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn design_then_metrics_round_trip() {
    let out = tmp("m2l8.json");
    let output = bin()
        .args(["design", "-m", "2", "-l", "8", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("case iii"), "{stdout}");

    let output = bin().arg("metrics").arg(&out).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("DP(X)   = 0.2500"), "{stdout}");
}

#[test]
fn design_emits_trace_for_tuned_cases() {
    let out = tmp("m2l4.json");
    let trace = tmp("m2l4-trace.csv");
    let output = bin()
        .args(["design", "-m", "2", "-l", "4", "--grid", "500", "--out"])
        .arg(&out)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("x,d_g,d_c,dp,ub\n"));
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn invalid_sizes_fail_with_code_two() {
    for l in ["5", "64"] {
        let output = bin()
            .args(["design", "-m", "2", "-l", l, "--out", "/dev/null"])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(2), "L = {l}");
        assert!(String::from_utf8_lossy(&output.stderr).contains("invalid constellation size"));
    }
}

#[test]
fn bad_usage_fails_with_code_two() {
    let output = bin().args(["design", "--nonsense"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn zero_trials_fail_with_code_two() {
    let cfile = tmp("zt.json");
    assert!(bin()
        .args(["design", "-m", "1", "-l", "2", "--out"])
        .arg(&cfile)
        .status()
        .unwrap()
        .success());
    let output = bin()
        .args(["simulate", "--input"])
        .arg(&cfile)
        .args(["-n", "2", "--snr", "10", "--trials", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn snr_range_syntax_expands() {
    let cfile = tmp("range.json");
    assert!(bin()
        .args(["design", "-m", "1", "-l", "2", "--out"])
        .arg(&cfile)
        .status()
        .unwrap()
        .success());
    let csv = tmp("range.csv");
    let output = bin()
        .args(["simulate", "--input"])
        .arg(&cfile)
        .args(["-n", "2", "--snr", "0:20:5", "--trials", "5000", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    // 0, 5, 10, 15, 20 -> five data rows
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 6);
}

#[test]
fn baseline_file_has_finite_union_bound() {
    let cfile = tmp("baseline.json");
    let output = bin()
        .args(["simulate", "--baseline", "4,2,8", "--detector", "naive"])
        .args(["-n", "2", "--snr", "10", "--trials", "5000", "--save-constellation"])
        .arg(&cfile)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));

    let output = bin().arg("metrics").arg(&cfile).output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("UB(X)"), "{stdout}");
    assert!(!stdout.contains("inf"), "{stdout}");
}

#[test]
fn simulate_writes_csv() {
    let cfile = tmp("m1l4.json");
    assert!(bin()
        .args(["design", "-m", "1", "-l", "4", "--out"])
        .arg(&cfile)
        .status()
        .unwrap()
        .success());
    let csv = tmp("sim.csv");
    let output = bin()
        .args(["simulate", "--input"])
        .arg(&cfile)
        .args(["-n", "2", "--snr", "0,10", "--trials", "20000", "--seed", "5", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,trials,sym_errors,bit_errors,ser,ber,ser_ci,ber_ci"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn simulation_is_deterministic_across_thread_counts() {
    let cfile = tmp("det.json");
    assert!(bin()
        .args(["design", "-m", "2", "-l", "4", "--out"])
        .arg(&cfile)
        .status()
        .unwrap()
        .success());
    let run = |threads: &str| {
        let csv = tmp(&format!("det-{threads}.csv"));
        let output = bin()
            .env("GRASSCODE_THREADS", threads)
            .args(["simulate", "--input"])
            .arg(&cfile)
            .args(["-n", "2", "--snr", "6", "--trials", "30000", "--seed", "9", "--csv"])
            .arg(&csv)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
        std::fs::read_to_string(&csv).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn reproduce_tables_and_figure() {
    for args in [
        vec!["reproduce", "--table", "3"],
        vec!["reproduce", "--table", "4"],
        vec!["reproduce", "--figure", "2"],
    ] {
        let output = bin().args(&args).output().unwrap();
        assert!(
            output.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&output.stdout)
        );
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(stdout.contains("ok"), "{args:?}: {stdout}");
        assert!(!stdout.contains("MISMATCH"), "{args:?}: {stdout}");
    }
}

#[test]
fn diametral_and_basis_dump_run() {
    let output = bin().args(["diametral", "-m", "2"]).output().unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("D = 8"));

    let output = bin().args(["basis-dump", "-m", "2"]).output().unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("8 tangent directions"));
}
