use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Output};

use bound_tunnel::exponent::{ScanPoint, ScanSeries};
use bound_tunnel::output::{read_rows, read_solves, write_solves, ComparisonCsvRow, F0Row, FitRow, ThresholdRow};

fn run(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bound-tunnel"));
    cmd.current_dir(dir).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("run.toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn open(dir: &Path, name: &str) -> File {
    File::open(dir.join("out").join(name)).unwrap()
}

fn thresholds(dir: &Path) -> (f64, f64) {
    let t: Vec<ThresholdRow> = read_rows(open(dir, "thresholds.csv")).unwrap();
    assert_eq!(t.iter().map(|r| r.quantity.as_str()).collect::<Vec<_>>(), ["nu0", "epsilon_crit"]);
    (t[0].value, t[1].value)
}

#[test]
fn thresholds_with_default_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), None, &["thresholds"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (nu0, crit) = thresholds(tmp.path());
    assert!((0.85..=0.95).contains(&nu0), "{nu0}");
    assert!((1.75..=1.85).contains(&crit), "{crit}");
}

#[test]
fn doubled_frequency_changes_thresholds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), Some("omega = 1.0"), &["thresholds"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (nu0, crit) = thresholds(tmp.path());
    assert!((nu0 - 0.910601).abs() > 0.01 && (crit - 1.832306).abs() > 0.01, "{nu0} {crit}");
}

#[test]
fn malformed_key_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in ["thresholds", "quantum", "semiclassical"] {
        let out = run(tmp.path(), Some("[lattice]\nNx = 100\n"), &[cmd]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("Nx"));
        assert!(!tmp.path().join("out").exists());
    }
    let out = run(tmp.path(), None, &["--workers", "0", "thresholds"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn free_barrier_transmits_fully() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[barrier]\nfamily = \"free\"\n\n[[scan.series]]\nepsilon = 0.5\ninv_g2 = [4.0, 6.0, 8.0, 10.0]\n";
    let out = run(tmp.path(), Some(cfg), &["quantum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = read_solves(open(tmp.path(), "quantum_solves.csv")).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].points.len(), 4);
    for p in &s[0].points {
        assert!((p.t0 - 1.0).abs() < 1e-12 && p.r_total < 1e-12, "{p:?}");
        assert!(p.usable());
    }
}

fn synthetic(epsilon: f64, f0: f64) -> ScanSeries {
    let point = |inv_g2: f64| {
        let ln_t0 = 0.7f64.ln() - f0 * inv_g2;
        ScanPoint {
            g: 1.0 / inv_g2.sqrt(),
            inv_g2,
            energy: epsilon * inv_g2,
            t0: ln_t0.exp(),
            ln_t0,
            transmission: vec![ln_t0.exp()],
            r_total: 1.0 - ln_t0.exp(),
            unitarity_defect: 0.0,
            n0: 20,
            a: 0.1,
            n_x: 100,
            basis_change: Some(0.0),
            excluded: None,
        }
    };
    ScanSeries { epsilon, points: [10.0, 15.0, 20.0, 25.0, 30.0].into_iter().map(point).collect() }
}

#[test]
fn fit_and_compare_on_synthetic_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::create_dir_all(dir.join("out")).unwrap();
    write_solves(File::create(dir.join("out/quantum_solves.csv")).unwrap(), &[synthetic(0.5, 1.3), synthetic(0.9, 0.8)]).unwrap();
    let out = run(dir, None, &["fit"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fits: Vec<FitRow> = read_rows(open(dir, "quantum_fits.csv")).unwrap();
    assert_eq!(fits.len(), 2);
    assert!((fits[0].slope + 1.3).abs() < 1e-12 && (fits[0].intercept - 0.7f64.ln()).abs() < 1e-12);
    assert!((fits[1].f0 - 0.8).abs() < 1e-12);

    let semi = "epsilon,F0,F0_err,F0_linear,F0_quadratic,nu_min,points\n0.5,1.3,0,1.3,1.3,0.01,8\n0.7,1.05,0,1.05,1.05,0.01,8\n1.1,0.6,0,0.6,0.6,0.01,8\n";
    fs::write(dir.join("out/semiclassical_f0.csv"), semi).unwrap();
    let out = run(dir, None, &["compare"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<ComparisonCsvRow> = read_rows(open(dir, "comparison.csv")).unwrap();
    // ε = 1.1 lies beyond the quantum grid
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.abs_diff < 1e-12 && r.within));
}

#[test]
fn missing_fit_input_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), None, &["fit"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), None, &["compare"]).status.code(), Some(2));
}

#[test]
fn empty_energy_grid_writes_empty_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), Some("[semiclassical]\nepsilons = []\n"), &["semiclassical"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let f0: Vec<F0Row> = read_rows(open(tmp.path(), "semiclassical_f0.csv")).unwrap();
    assert!(f0.is_empty());
    assert!(fs::read_to_string(tmp.path().join("out/semiclassical_f0.csv")).unwrap().starts_with("epsilon,F0,"));
}

#[test]
fn semiclassical_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = "[semiclassical]\nepsilons = [0.6, 0.8, 1.0]\n";
    let out = run(dir, Some(cfg), &["--workers", "3", "semiclassical"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let f0: Vec<F0Row> = read_rows(open(dir, "semiclassical_f0.csv")).unwrap();
    assert_eq!(f0.len(), 3);
    assert!(f0.windows(2).all(|w| w[1].f0 < w[0].f0));
    assert!(f0.iter().all(|r| r.f0_err.is_finite() && r.f0_err < 1e-3));
    let first: Vec<Vec<u8>> = ["semiclassical_f0.csv", "semiclassical_records.csv"].iter().map(|n| fs::read(dir.join("out").join(n)).unwrap()).collect();
    let out = run(dir, Some(cfg), &["--workers", "1", "semiclassical"]);
    assert!(out.status.success());
    let second: Vec<Vec<u8>> = ["semiclassical_f0.csv", "semiclassical_records.csv"].iter().map(|n| fs::read(dir.join("out").join(n)).unwrap()).collect();
    assert_eq!(first, second);
}
