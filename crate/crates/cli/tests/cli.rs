use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qls_core::norms::{NormParams, NormReport};
use qls_core::spectral::io::write_field;
use qls_core::spectral::Grid;
use qls_core::states::{self, BreatherSpec};

fn qls(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qls")).args(args).current_dir(cwd).output().expect("spawn qls")
}

const SMALL: &str = r#"{
  "schema_version": 1,
  "coordinates": "x",
  "N": 64,
  "dt": 1e-4,
  "T": 0.004,
  "snapshot_stride": 10,
  "data": {"omega": 1.0, "perturbation": {"a": 0.1, "w": 20.0}}
}"#;

#[test]
fn unknown_config_key_exits_2_without_creating_output() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("bad.json"), SMALL.replace("\"N\": 64", "\"N\": 64, \"nonsense\": true")).unwrap();
    let out = qls(&["simulate", "--config", "bad.json", "--out", "run"], d.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!d.path().join("run").exists());
}

#[test]
fn missing_config_file_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let out = qls(&["simulate", "--config", "absent.json", "--out", "run"], d.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solver_abort_exits_4_and_leaves_partial_manifest() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.json"), SMALL.replace("\"dt\": 1e-4", "\"dt\": 1e-2")).unwrap();
    let out = qls(&["simulate", "--config", "c.json", "--out", "run"], d.path());
    assert_eq!(out.status.code(), Some(4));
    let m = qls_core::artifact::read_manifest(&d.path().join("run")).unwrap();
    assert!(!m.completed && m.error.is_some());
}

#[test]
fn simulate_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.json"), SMALL).unwrap();
    for run in ["a", "b"] {
        let out = qls(&["simulate", "--config", "c.json", "--out", run, "--seed", "11"], d.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(d.path().join("a/diagnostics.csv")).unwrap();
    assert_eq!(a, fs::read(d.path().join("b/diagnostics.csv")).unwrap());
    let m = qls_core::artifact::read_manifest(&d.path().join("a")).unwrap();
    assert!(m.completed);
    assert_eq!(m.seed, 11);
    assert_eq!(m.snapshots.len(), 5);
    assert_eq!(m.config["N"], 64);
}

#[test]
fn figure1_then_stability_gives_five_slices() {
    let d = tempfile::tempdir().unwrap();
    let out = qls(&["figure1", "--out", "fig"], d.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = d.path().join("fig");
    let m = qls_core::artifact::read_manifest(&dir).unwrap();
    assert!(m.completed);
    assert_eq!(m.snapshots.len(), 5);
    for (k, s) in m.snapshots.iter().enumerate() {
        assert!((s.t - 0.125 * k as f64).abs() < 1e-12);
    }
    let out = qls(&["stability", "fig"], d.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("stability.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("t,distance,theta_star,h_star,boundary_flag"));
}

#[test]
fn norms_of_stored_compacton_match_library_bit_for_bit() {
    let d = tempfile::tempdir().unwrap();
    let g = Grid::new(states::default_x_half_length(), 256).unwrap();
    let u = states::compacton(&BreatherSpec::default(), g).unwrap();
    write_field(&d.path().join("phi.bin"), &u, 0.0).unwrap();
    let out = qls(&["norms", "phi.bin", "--s", "0.75", "--tau", "0"], d.path());
    assert!(out.status.success());
    let got: NormReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(got, NormReport::evaluate(0.0, &u, NormParams::new(0.75, 0.0)));
}

#[test]
fn transform_forward_then_inverse_recovers_the_field() {
    let d = tempfile::tempdir().unwrap();
    let g = Grid::new(states::default_x_half_length(), 256).unwrap();
    let u = states::compacton(&BreatherSpec::default(), g).unwrap();
    write_field(&d.path().join("phi.bin"), &u, 0.0).unwrap();
    assert!(qls(&["transform", "phi.bin", "--direction", "forward", "--grid-n", "512", "--out", "y"], d.path()).status.success());
    assert!(qls(&["transform", "y/U.bin", "--direction", "inverse", "--grid-n", "256", "--out", "x"], d.path()).status.success());
    let (back, _) = qls_core::spectral::io::read_field(&d.path().join("x/u.bin")).unwrap();
    // Interior nodes only; the map image stops short of the corners, and the
    // sampled profile is interpolated across its corner kinks.
    let mut worst: f64 = 0.0;
    for n in 0..g.len() {
        if g.node(n).abs() < 0.8 * states::X0 {
            worst = worst.max((back.at(n) - u.at(n)).norm());
        }
    }
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn verify_estimates_rejects_out_of_range_and_reports_json() {
    let d = tempfile::tempdir().unwrap();
    let out = qls(&["verify-estimates", "--case", "Asym-3", "--s", "0.8"], d.path());
    assert_eq!(out.status.code(), Some(2));
    let out = qls(&["verify-estimates", "--case", "Comm", "--members", "8", "--out", "est"], d.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Comm"));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("est/estimates.json")).unwrap()).unwrap();
    assert_eq!(json["cases"][0]["name"], "Comm");
    assert_eq!(json["cases"][0]["passed"], true);
}
