use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qrlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrlink"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV, without manifest and header.
fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "distance_km,cutoff_m,rate_linear,rate_db,fidelity,e_x,ideal_bound_db,realistic_ppl_db,sqrt_eta_db"
    );
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn platforms_current_and_future() {
    let out = qrlink(&["platforms", "--era", "current"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    let rb = text.lines().find(|l| l.starts_with("Rubidium")).unwrap();
    let fields: Vec<&str> = rb.split_whitespace().collect();
    assert_eq!(fields[1..], ["0.700", "5", "100"]);

    let text = stdout(&qrlink(&["platforms", "--era", "future"]));
    let nv: Vec<&str> = text.lines().find(|l| l.starts_with("NV")).unwrap().split_whitespace().collect();
    assert_eq!(nv[1..], ["0.500", "250", "10000"]);
}

#[test]
fn missing_config_exits_2() {
    let out = qrlink(&["platforms", "--config", "missing.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.cfg"));
}

#[test]
fn config_replaces_builtin_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    fs::write(&cfg, "[platform]\nname=\"Test Ion\" p_link=0.3 clock_mhz=2 tcoh_ms=50\n").unwrap();
    let out = qrlink(&["platforms", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("Test Ion"));

    fs::write(&cfg, "[platform]\nname=X p_link=1.5 clock_mhz=2 tcoh_ms=50\n").unwrap();
    let out = qrlink(&["platforms", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qrlink(&["sweep", "--protocol", "bogus"]).status.code(), Some(2));
    assert_eq!(qrlink(&["sweep", "--mode", "skr", "--fmin", "0.9"]).status.code(), Some(2));
    assert_eq!(qrlink(&["sweep", "--lmin", "10", "--lmax", "5"]).status.code(), Some(2));
    assert_eq!(qrlink(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qrlink(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_future_nrp_writes_five_files_and_combined() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = qrlink(&["sweep", "--era", "future", "--protocol", "nrp-cell", "--mode", "skr", "--out", out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let target = dir.path().join("future").join("nrp-cell");
    let mut names: Vec<String> = fs::read_dir(&target)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["Calcium.csv", "NV.csv", "QuantumDot.csv", "Rubidium.csv", "SiV.csv", "combined.csv"]
    );
    let rows = data_rows(&target.join("Rubidium.csv"));
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.len() == 9));

    let text = fs::read_to_string(target.join("NV.csv")).unwrap();
    let manifest: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(manifest.iter().any(|l| l.starts_with("# command: ")));
    assert!(manifest.iter().any(|l| l.starts_with("# version: qrlink ")));
    assert!(manifest.contains(&"# timestamp: 2023-11-14T22:13:20Z"));
    assert!(manifest.iter().any(|l| l.contains("platform=NV p_link=0.5 clock_mhz=250 tcoh_ms=10000")));

    let combined = fs::read_to_string(target.join("combined.csv")).unwrap();
    assert_eq!(combined.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5 * 200);
}

#[test]
fn rubidium_future_nrp_at_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrlink(&[
        "sweep", "--era", "future", "--protocol", "nrp-cell", "--platform", "rubidium", "--lmin", "0", "--lmax", "20",
        "--lstep", "10", "--cutoff", "unbounded", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("future/nrp-cell/Rubidium.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1], "unbounded");
    let db: f64 = rows[0][3].parse().unwrap();
    assert!((db + 5.46).abs() < 5e-3, "{db}");
    assert_eq!(rows[0][6], "inf");
    assert_eq!(rows[1][0], "10.0000000");
}

#[test]
fn quantum_dot_rr_rows_are_all_na() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrlink(&[
        "sweep", "--era", "current", "--protocol", "nsp-cell", "--mode", "rr", "--fmin", "0.95", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("current/nsp-cell/QuantumDot.csv"));
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(row[1..6], ["NA", "NA", "NA", "NA", "NA"]);
        assert_ne!(row[6], "NA");
    }
    let rb = data_rows(&dir.path().join("current/nsp-cell/Rubidium.csv"));
    assert!(rb.iter().any(|r| r[2] != "NA"));
}

#[test]
fn sweep_files_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_qrlink"))
            .args(["sweep", "--era", "current", "--protocol", "nrp-cell", "--cutoff", "optimal", "--out"])
            .arg(dir.path())
            .env("SOURCE_DATE_EPOCH", "0")
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        fs::read(dir.path().join("current/nrp-cell/combined.csv")).unwrap()
    };
    let one = run("1");
    assert!(one == run("4"));
}

#[test]
fn optimize_reports_unbounded_for_perfect_memory() {
    let out = qrlink(&[
        "optimize", "--era", "current", "--protocol", "nsp-cell", "--platform", "Rubidium", "--tcoh", "inf",
        "--lmin", "10", "--lmax", "100", "--lstep", "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("fixed cutoff: unbounded"), "{text}");
    assert!(text.contains("per-distance optimal cutoff: unbounded at every distance"), "{text}");
}

#[test]
fn optimize_rubidium_fixed_cutoff_ratio() {
    let out = qrlink(&["optimize", "--era", "current", "--protocol", "nsp-cell", "--platform", "Rubidium"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("fixed cutoff:")).unwrap();
    let ratio: f64 = line.rsplit(' ').next().unwrap().trim_end_matches(')').parse().unwrap();
    assert!(ratio >= 0.5, "{line}");
}

#[test]
fn simulate_prints_estimates() {
    let out = qrlink(&[
        "simulate", "--era", "future", "--protocol", "nrp-cell", "--platform", "NV", "--distance", "50", "--trials",
        "20000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for key in ["raw_rate", "E_m", "fidelity"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "{text}");
    }
    assert_eq!(qrlink(&["simulate", "--distance", "10"]).status.code(), Some(2));
}

#[test]
fn validate_is_deterministic() {
    let args = ["validate", "--seed", "42", "--trials", "20000", "--p", "0.2,0.9", "--m", "0,3"];
    let a = qrlink(&args);
    let b = qrlink(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).ends_with("result: PASS\n"));
}

#[test]
fn validate_single_trial_still_passes() {
    let out = qrlink(&["validate", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_budget_exceeded_exits_3() {
    let out = qrlink(&["validate", "--step-budget", "100", "--p", "0.05", "--m", "0", "--ratio", "0.01"]);
    assert_eq!(out.status.code(), Some(3));
}
