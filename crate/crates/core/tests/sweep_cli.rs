use cavity_entanglement::sweep::{emit_csv, parse_config, run_sweep, SweepError, CSV_HEADER};
use std::path::Path;
use std::process::Command;

fn sweep_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavity-sweep"))
}

#[test]
fn single_inertial_point() {
    let cfg = parse_config("accel = 0\nmass = 0").unwrap();
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert!(row.converged && row.entropy_bits.is_finite());
    assert!((row.entropy_bits - 1.0).abs() < 1e-9);
    assert!((row.sum_fa_sq - row.sum_fr_sq).abs() < 1e-12 * row.sum_fa_sq);
}

#[test]
fn ten_by_ten_default_sweep() {
    let cfg = parse_config("accel = 0:0.9:0.1\nmass = 0:9:1\nthreads = 0").unwrap();
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 100);
    for (row, (a, k)) in rows.iter().zip(cfg.points()) {
        assert_eq!((row.a, row.kappa), (a, k));
        assert!(row.converged, "a={a} kappa={k}: {:?}", row.note);
        assert!((0.0..=1.0).contains(&row.entropy_bits));
        assert!(row.n_trunc <= 30);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    emit_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));

    let at = |a: f64| rows.iter().find(|r| (r.a - a).abs() < 1e-9 && r.kappa == 0.0).unwrap().entropy_bits;
    assert!(at(0.2) > at(0.8));
}

#[test]
fn empty_rows_write_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
    let bad = Path::new("/nonexistent-dir/out.csv");
    match emit_csv(&[], bad) {
        Err(SweepError::Io { path, .. }) => assert_eq!(path, bad),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cli_writes_csv_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let status = sweep_bin()
        .args(["--accel", "0,0.3", "--mass", "0:1:1", "--threads", "1", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("0,0,0.5,4.442882938158366,"));
    assert!(lines[4].starts_with("0.3,1,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true,0")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "# bound check\nv = 0.2\naccel = 0.5\nmass = 0\n").unwrap();
    let rejected = sweep_bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(rejected.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&rejected.stderr);
    assert!(msg.contains("line 3") && msg.contains("2v = 0.4"), "{msg}");

    let ok = sweep_bin().arg("--config").arg(&cfg).args(["--v", "0.5", "--timing"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let csv = String::from_utf8(ok.stdout).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "0.5");
    assert!(row[10].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn cli_exit_codes() {
    let code = |args: &[&str]| sweep_bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--accel", "0:1:0.1", "--mass", "0"]), Some(1));
    assert_eq!(code(&["--accel", "0", "--mass", "0", "--v", "1.2"]), Some(1));
    assert_eq!(code(&["--mass", "0"]), Some(1));
    assert_eq!(code(&["--accel", "0", "--mass", "0", "--bogus"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--config", "/nonexistent-dir/none.cfg"]), Some(3));
    assert_eq!(code(&["--accel", "0", "--mass", "0", "--output", "/nonexistent-dir/x.csv"]), Some(3));
    assert_eq!(code(&["--accel", "0", "--mass", "0", "--trunc_tol", "1e-9", "--quad_tol", "1e-10", "--max_order", "3"]), Some(2));
}
