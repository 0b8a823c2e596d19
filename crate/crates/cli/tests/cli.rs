use std::path::Path;
use std::process::{Command, Output};

fn tangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn point_prints_json_observables() {
    let o = tangle(&["point", "--z", "10", "--omega-t", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let obs = &v["observables"];
    assert_eq!(obs["channel"], "eg");
    assert!(obs["c1"].as_f64().unwrap() > 0.0);
    assert!(obs["c_rho"].is_number());
    assert_eq!(v["point"]["x"].as_f64().unwrap(), 1.0);
}

#[test]
fn point_cutoff_report_lists_three_cutoffs() {
    let o = tangle(&[
        "point",
        "--x",
        "1",
        "--z",
        "5",
        "--channel",
        "ee",
        "--cutoff-report",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["cutoff_sensitivity"].as_array().unwrap();
    let cutoffs: Vec<f64> = rows.iter().map(|r| r["cutoff"].as_f64().unwrap()).collect();
    assert_eq!(cutoffs, [25.0, 50.0, 100.0]);
    assert_eq!(v["observables"]["eta1"].as_f64().unwrap(), 0.5);
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        vec!["point", "--z", "10"],
        vec!["point", "--z", "-1", "--omega-t", "10"],
        vec!["point", "--z", "10", "--omega-t", "10", "--channel", "xy"],
        vec!["point", "--x", "1", "--z", "10", "--omega-t", "3"],
        vec![
            "sweep", "--param", "x", "--from", "1", "--to", "2", "--steps", "3", "--fixed", "x=1",
        ],
        vec![
            "sweep", "--param", "x", "--from", "2", "--to", "1", "--steps", "3", "--fixed", "z=1",
        ],
        vec![
            "sweep", "--param", "q", "--from", "1", "--to", "2", "--steps", "3", "--fixed", "z=1",
        ],
    ] {
        let o = tangle(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn nonconvergence_exits_with_three() {
    // the light-cone integrand needs far more than a handful of panels
    let o = tangle(&[
        "point",
        "--z",
        "10",
        "--omega-t",
        "10",
        "--tol",
        "1e-12",
        "--max-panels",
        "20",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = tangle(&[
        "sweep",
        "--param",
        "x",
        "--from",
        "0.5",
        "--to",
        "1.5",
        "--steps",
        "5",
        "--fixed",
        "z=10",
        "--out",
        out.to_str().unwrap(),
        "--plot",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let table = tangle_core::SweepTable::from_csv(&csv).unwrap();
    assert_eq!(table.rows.len(), 5);
    assert!(Path::new(&dir.path().join("s.gp")).exists());
}

#[test]
fn config_file_supplies_options_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# constant-z sweep\nparam=x\nfrom=0.5\nto=1.5\nsteps=3\nfixed=z=10\nchannel=ee\n",
    )
    .unwrap();
    let o = tangle(&["sweep", "--config", cfg.to_str().unwrap(), "--steps", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = tangle_core::SweepTable::from_csv(&stdout(&o)).unwrap();
    assert_eq!(table.rows.len(), 4);
    assert!(table
        .rows
        .iter()
        .all(|r| r.channel == tangle_core::InitialState::Ee));

    std::fs::write(&cfg, "param=x\nstepz=3\n").unwrap();
    let o = tangle(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn serial_and_parallel_sweeps_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "sweep",
        "--param",
        "z",
        "--from",
        "2",
        "--to",
        "16",
        "--steps",
        "8",
        "--fixed",
        "omega_t=10",
        "--channel",
        "ee",
    ];
    let mut serial = base.to_vec();
    serial.extend(["--serial", "--out", a.to_str().unwrap()]);
    let mut parallel = base.to_vec();
    parallel.extend(["--out", b.to_str().unwrap()]);
    assert!(tangle(&serial).status.success());
    assert!(tangle(&parallel).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn oracle_check_reports_json_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("oracles.json");
    let o = tangle(&["oracle-check", "--json-out", json.to_str().unwrap()]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let passed = report["passed"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 4 }));
    let text = stdout(&o);
    assert!(text.contains("oracle checks passed"));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]"))
            .count(),
        report["checks"].as_array().unwrap().len()
    );
}

#[test]
fn figure_writes_table_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let o = tangle(&["figure", "fig4", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let table = tangle_core::SweepTable::from_csv(&csv).unwrap();
    assert_eq!(table.rows.len(), 3 * 281);
    assert_eq!(table.metadata["preset"], "fig4");
    let script = std::fs::read_to_string(dir.path().join("fig4.gp")).unwrap();
    assert!(script.contains("fig4.csv"));
}
