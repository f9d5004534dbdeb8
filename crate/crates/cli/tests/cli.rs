use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_acovdiff"));
    c.env_remove("ACOVDIFF_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/six_jump.toml");

#[test]
fn constant_series_is_flagged() {
    let input = "3.7\n".repeat(1600);
    let v = json(&run_with_stdin(&["estimate", "--m", "2"], input.as_bytes()));
    assert_eq!(v["gamma"], serde_json::json!([0.0, 0.0, 0.0]));
    assert!(v["rho"].is_null());
    assert!(v["warning"].is_string());
}

#[test]
fn hand_example() {
    let v = json(&run_with_stdin(&["estimate", "--m", "0"], b"1\n2\n3\n4\n"));
    assert_eq!(v["gamma"][0].as_f64().unwrap(), 0.5);
}

#[test]
fn csv_output_lists_lags() {
    let out = run_with_stdin(
        &["estimate", "--m", "1", "--format", "csv"],
        b"# comment\nx\n1\n3\n2\n5\n4\n",
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success());
    assert!(text.contains("lag,gamma,rho"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn simulate_is_reproducible_and_consistent() {
    let args = ["simulate", "--signal", "none", "--n", "10", "--seed", "1"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("# seed: 1"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 10);
    for r in rows {
        assert!((r[1] + r[2] - r[3]).abs() <= 1e-12);
    }
}

#[test]
fn simulate_echoes_default_seed() {
    let out = run(&["simulate", "--n", "20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let seed_line = text.lines().find(|l| l.starts_with("# seed: ")).unwrap();
    let seed = seed_line.trim_start_matches("# seed: ");
    let again = run(&["simulate", "--n", "20", "--seed", seed]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn six_jump_mean_has_six_changes() {
    let text = String::from_utf8(run(&["simulate", "--n", "1600", "--seed", "9"]).stdout).unwrap();
    let mean: Vec<f64> = data_rows(&text).iter().map(|r| r[1]).collect();
    let jumps: Vec<usize> = (1..mean.len()).filter(|&i| mean[i] != mean[i - 1]).collect();
    assert_eq!(jumps.len(), 6);
}

#[test]
fn mean_does_not_depend_on_seed() {
    let a = String::from_utf8(run(&["simulate", "--smooth", "f3", "--n", "200", "--seed", "1"]).stdout).unwrap();
    let b = String::from_utf8(run(&["simulate", "--smooth", "f3", "--n", "200", "--seed", "2"]).stdout).unwrap();
    let ma: Vec<f64> = data_rows(&a).iter().map(|r| r[1]).collect();
    let mb: Vec<f64> = data_rows(&b).iter().map(|r| r[1]).collect();
    assert_eq!(ma, mb);
    assert_ne!(a, b);
}

#[test]
fn simulate_then_estimate_is_deterministic() {
    let sim = run(&[
        "simulate", "--smooth", "f1", "--gamma1", "-0.4", "--n", "1600", "--seed", "77",
    ]);
    let a = run_with_stdin(&["estimate", "--m", "2"], &sim.stdout);
    let b = run_with_stdin(&["estimate", "--m", "2"], &sim.stdout);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn round_trip_recovers_rho() {
    let sim = run(&[
        "simulate", "--signal", "none", "--gamma1", "0.3", "--n", "100000", "--seed", "4",
    ]);
    let v = json(&run_with_stdin(&["estimate", "--m", "1"], &sim.stdout));
    let rho1 = v["rho"][1].as_f64().unwrap();
    assert!((rho1 - 0.3).abs() < 0.02, "{rho1}");
    let ar = run(&[
        "simulate", "--signal", "none", "--noise", "ar1", "--phi", "0.5", "--n", "100000", "--seed", "4",
    ]);
    let v = json(&run_with_stdin(
        &["estimate", "--column", "noise", "--m", "20"],
        &ar.stdout,
    ));
    assert!((v["gamma"][0].as_f64().unwrap() - 1.0 / 0.75).abs() < 0.05);
}

#[test]
fn data_errors_exit_3() {
    assert_eq!(run(&["estimate", "/nonexistent/file.csv"]).status.code(), Some(3));
    assert_eq!(run_with_stdin(&["estimate"], b"1\nfoo\n").status.code(), Some(3));
    assert_eq!(
        run_with_stdin(&["estimate", "--m", "2"], b"1\n2\n").status.code(),
        Some(3)
    );
    assert_eq!(
        run_with_stdin(&["estimate", "--column", "z"], b"a,b\n1,2\n")
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["tables", "--table", "T9"]).status.code(), Some(2));
    assert_eq!(
        run_with_stdin(&["estimate", "--method", "hvk", "--d0", "2"], b"1\n")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_with_stdin(&["estimate", "--d0", "1", "--d1", "1"], b"1\n2\n3\n")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["simulate", "--smooth", "f9"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--noise", "ma1", "--gamma1", "0.7"]).status.code(),
        Some(2)
    );
    let short = run(&[
        "rate-study",
        "--config",
        CONFIG,
        "--n-grid",
        "400,800",
        "--replications",
        "2",
    ]);
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn tables_t7_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "tables",
        "--table",
        "T7",
        "--replications",
        "4",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let md = String::from_utf8(out.stdout).unwrap();
    assert_eq!(md.lines().filter(|l| l.starts_with("| f")).count(), 2, "{md}");
    assert!(md.contains("| f1 | difference(m=3) |"));
    assert!(dir.path().join("T7.md").exists());
    let csv = std::fs::read_to_string(dir.path().join("T7.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 2);
}

#[test]
fn tables_t1_has_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "tables",
        "--table",
        "T1",
        "--seed",
        "42",
        "--replications",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let md = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = md
        .lines()
        .filter(|l| l.starts_with("| f") && !l.starts_with("| f |"))
        .collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        // two label columns plus 14 MSE cells
        assert_eq!(r.matches('|').count(), 2 + 1 + 14);
    }
}

#[test]
fn mse_study_is_schedule_independent() {
    let base = ["mse-study", "--config", CONFIG, "--replications", "20", "--seed", "3"];
    let one = bin().args(base).env("ACOVDIFF_WORKERS", "1").output().unwrap();
    let many = bin().args(base).args(["--workers", "4"]).output().unwrap();
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, many.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    assert!(text.contains("# seed: 3"));
    assert!(text.contains("hvk(maxlag=2),rho2"));
}

#[test]
fn rate_study_writes_slopes() {
    let out = run(&[
        "rate-study",
        "--config",
        CONFIG,
        "--n-grid",
        "200,400,800",
        "--replications",
        "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("estimator,quantity,slope,scaled_mse_ratio,mse_n200,mse_n400,mse_n800"));
}
