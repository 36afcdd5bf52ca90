use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_decay-lab"))
}

#[test]
fn invariant_battery_exits_cleanly() {
    let out = lab().args(["check-invariants", "--instances", "3"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with("pass")).count(), 8);
}

#[test]
fn sim_writes_artifacts_and_reports_failure_by_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let scen = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/quick.toml");
    let out = lab()
        .args(["sim", "--config", scen, "--n", "32", "--t-end", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    // the short window on a tiny box misses the decay target
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["quick.json", "quick.toml", "quick_samples_a0.csv", "quick_functionals_a0.csv"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let rerun = oldroyd_lab::scenario::Scenario::load(&dir.path().join("quick.toml")).unwrap();
    assert_eq!(rerun.model.n, 32);
    assert_eq!(rerun.stepper.t_end, 5.0);
}

#[test]
fn offline_fit_reads_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let mut w = csv::Writer::from_path(&path).unwrap();
    w.write_record(["t", "y"]).unwrap();
    for i in 0..30 {
        let t = 10f64.powf(i as f64 / 10.0);
        w.write_record([t.to_string(), (1.0 + t).powf(-0.75).to_string()]).unwrap();
    }
    w.flush().unwrap();
    let out = lab()
        .args(["fit", "--y", "y", "--target", "-0.75", "--csv"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("-0.75000"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[model]\nbogus = 1\n").unwrap();
    let out = lab().args(["sim", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
