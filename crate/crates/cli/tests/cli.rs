use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qclock_core::experiments::read_config;
use qclock_core::snapshot::read_snapshots;

fn qclock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclock")).args(args).output().unwrap()
}

/// Writes the fig1 preset, with one textual substitution, to `dir/config.json`.
fn write_config(dir: &Path, from: &str, to: &str) -> String {
    let out = qclock(&["preset", "fig1"]);
    assert!(out.status.success());
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains(from), "{from} not in config");
    let path = dir.join("config.json");
    fs::write(&path, json.replacen(from, to, 1)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn preset_prints_a_loadable_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "", "");
    let c = read_config(Path::new(&path)).unwrap();
    assert_eq!(c.physics.y0_over_d, -9.5);
    assert_eq!(c.sweep.values.len(), 25);
}

#[test]
fn small_run_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = qclock(&[
        "run", "--preset", "fig1", "--values", "0.12,0.13", "--ppw", "8", "--threads", "2",
        "--overlay-oracle", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("sweep_param,sweep_value,tau_y,tau_z,transmission,flip_prob,mean_kinetic_energy,norm_drift,boundary_norm,status,oracle_"));
    assert!(lines[1].starts_with("omega0_over_e0,0.12,"));
    assert!(lines[2].starts_with("omega0_over_e0,0.13,"));
    assert!(fs::metadata(dir.path().join("r.csv.meta.json")).is_ok());
}

#[test]
fn config_file_run_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "\"preset\": \"fig1\"", "\"preset\": \"custom\"");
    let out = dir.path().join("r.csv");
    let snaps = dir.path().join("snaps");
    let o = qclock(&[
        "run", "--config", &cfg, "--values", "0.13", "--ppw", "6", "--spin-sign", "down",
        "--dump-snapshots", snaps.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = fs::read_to_string(dir.path().join("r.csv.meta.json")).unwrap();
    assert!(meta.contains("\"spin_sign\": -1"));
    let file = fs::File::open(snaps.join("row_000.spinor")).unwrap();
    let frames = read_snapshots(std::io::BufReader::new(file)).unwrap();
    assert!(frames.len() >= 3);
    assert_eq!(frames[0].step, 0);
    assert!(frames.windows(2).all(|w| w[0].step < w[1].step && w[0].time < w[1].time));
    let last = frames.last().unwrap();
    assert!((last.field.total_norm() - 1.0).abs() < 1e-10);
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let out = out.to_str().unwrap();

    let o = qclock(&["run", "--preset", "fig4", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown preset"));

    let cfg = write_config(dir.path(), "\"eta\"", "\"step_factor\"");
    let o = qclock(&["run", "--config", &cfg, "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step_factor"));

    let cfg = write_config(dir.path(), "\"d\": 1.0", "\"d\": -1.0");
    let o = qclock(&["run", "--config", &cfg, "--out", out]);
    assert_eq!(o.status.code(), Some(2));

    let o = qclock(&["run", "--preset", "fig1"]);
    assert_eq!(o.status.code(), Some(2), "missing output path");

    let o = qclock(&["run", "--out", out]);
    assert_eq!(o.status.code(), Some(2), "neither preset nor config");
    assert!(!Path::new(out).exists());
}

#[test]
fn all_rows_failing_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "\"cell_cap\": 1048576", "\"cell_cap\": 100");
    let out = dir.path().join("r.csv");
    let o = qclock(&["run", "--config", &cfg, "--values", "0.1,0.13", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("error:cell_cap").count(), 2);
}
