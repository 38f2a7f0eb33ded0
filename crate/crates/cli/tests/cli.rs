use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bic_entangle::greens::{lateral_z_gamma12, lateral_z_omega12};
use serde_json::Value;
use tempfile::TempDir;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bic-entangle"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str], config: &Path, out: &Path) {
    let o = run(args, config, out);
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

/// Data rows of a CSV written by the tool, header and comments skipped.
fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn json_result(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["result"].clone()
}

#[test]
fn rate_table_round_trips_exactly() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["rates"],
        &data_dir().join("rates/md_table.toml"),
        tmp.path(),
    );
    let (header, rows) = csv_rows(&tmp.path().join("rates.csv"));
    assert_eq!(header, ["gamma11", "gamma22", "gamma12", "omega12"]);
    assert_eq!(rows, vec![vec![13.7, 8.8, 7.9, -0.2]]);
}

#[test]
fn free_space_scan_matches_library_formula() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["rates"],
        &data_dir().join("configs/rates_free_space.toml"),
        tmp.path(),
    );
    let (header, rows) = csv_rows(&tmp.path().join("rates.csv"));
    assert_eq!(header, ["d_nm", "d_over_lambda", "gamma12", "omega12"]);
    assert_eq!(rows.len(), 400);
    for r in &rows {
        let theta = 2.0 * std::f64::consts::PI * r[1];
        assert!((r[2] - lateral_z_gamma12(theta)).abs() < 1e-12);
        assert!(
            (r[3] - lateral_z_omega12(theta)).abs()
                < 1e-9 * lateral_z_omega12(theta).abs().max(1.0)
        );
    }
}

#[test]
fn missing_dipole_names_field_path() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[emitters]\nlambda0_nm = 552.0\n");
    let o = run(&["rates"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("emitters.p"));
}

#[test]
fn unknown_key_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[rates]\ngamma_11 = 1.0\n");
    let o = run(&["rates"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma_11"));
}

#[test]
fn simulate_md_rate_table() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["simulate"],
        &data_dir().join("configs/simulate_md_table.toml"),
        tmp.path(),
    );
    let s = json_result(&tmp.path().join("summary.json"));
    let (c, t) = (s["c_max"].as_f64().unwrap(), s["t_max"].as_f64().unwrap());
    assert!((c - 0.25).abs() <= 0.03, "c_max {c}");
    assert!((t - 0.10).abs() <= 0.03, "t_max {t}");
    let (header, rows) = csv_rows(&tmp.path().join("trajectory.csv"));
    assert_eq!(header.len(), 7);
    assert_eq!(rows.len(), 4001);
}

#[test]
fn simulate_ed_rate_table() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["simulate"],
        &data_dir().join("configs/simulate_ed_table.toml"),
        tmp.path(),
    );
    let s = json_result(&tmp.path().join("summary.json"));
    let (c, t) = (s["c_max"].as_f64().unwrap(), s["t_max"].as_f64().unwrap());
    assert!((c - 0.13).abs() <= 0.02, "c_max {c}");
    assert!((t - 0.02).abs() <= 0.01, "t_max {t}");
}

#[test]
fn simulate_mode_derived_rates_match_analytic_peak() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["simulate"],
        &data_dir().join("configs/simulate_md_mode.toml"),
        tmp.path(),
    );
    let s = json_result(&tmp.path().join("summary.json"));
    assert_eq!(s["rate_source"], "mode");
    let c = s["c_max"].as_f64().unwrap();
    let ca = s["c_max_analytic"].as_f64().unwrap();
    assert!((c - ca).abs() < 1e-5, "{c} vs {ca}");
}

#[test]
fn zero_rates_give_flat_trace() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[rates]\ngamma11 = 0.0\ngamma22 = 0.0\ngamma12 = 0.0\nomega12 = 0.0\n\n[simulation]\nt_end = 5.0\nn_steps = 50\n",
    );
    run_ok(&["simulate"], &cfg, &tmp.path().join("out"));
    let s = json_result(&tmp.path().join("out/summary.json"));
    assert_eq!(s["c_max"].as_f64().unwrap(), 0.0);
    let (_, rows) = csv_rows(&tmp.path().join("out/concurrence.csv"));
    assert!(rows.iter().all(|r| r[1] == 0.0));
    let (_, traj) = csv_rows(&tmp.path().join("out/trajectory.csv"));
    assert!(traj.iter().all(|r| r[1..] == traj[0][1..]));
}

#[test]
fn sweep_without_envelope_is_lattice_periodic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
[mode]
kind = "ed"
lambda_bic_nm = 552.0
a_nm = 400.0
purcell = 40.0
beta = 0.6
k_res_per_um = 0.0
c_n = [0.25, 0.5, 0.25]
fwhm_nm = 2.0

[scan]
d_min_nm = 2000.0
d_max_nm = 8000.0
n_points = 61
"#,
    );
    run_ok(&["sweep"], &cfg, &tmp.path().join("out"));
    let (header, rows) = csv_rows(&tmp.path().join("out/sweep.csv"));
    assert_eq!(
        header,
        ["d_nm", "d_over_a", "beta_bar", "c_max", "t_max", "clipped"]
    );
    let at_sites: Vec<f64> = rows.iter().step_by(4).map(|r| r[3]).collect();
    assert_eq!(at_sites.len(), 16);
    for c in &at_sites {
        assert!((c - at_sites[0]).abs() < 1e-12, "{c} vs {}", at_sites[0]);
    }
    // Half-way between sites osc = 0.25 - 0.5 + 0.25 = 0: clipped.
    let mid = &rows[2];
    assert!(mid[2].abs() < 1e-12);
    assert_eq!(mid[5], 1.0);
    assert_eq!(mid[3], 0.0);
}

#[test]
fn sweep_numeric_column_matches_analytic() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["sweep"],
        &data_dir().join("configs/sweep_ed_finite.toml"),
        tmp.path(),
    );
    let (header, rows) = csv_rows(&tmp.path().join("sweep.csv"));
    assert_eq!(header.last().unwrap(), "c_max_numeric");
    for r in rows.iter().filter(|r| r[5] == 0.0) {
        assert!((r[3] - r[6]).abs() < 1e-9, "{} vs {}", r[3], r[6]);
    }
}

#[test]
fn fit_bundled_md_dataset() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["fit"],
        &data_dir().join("configs/fit_md_synthetic.toml"),
        tmp.path(),
    );
    let r = json_result(&tmp.path().join("fit.json"));
    let beta = r["fit"]["params"]["beta"].as_f64().unwrap();
    assert!((beta / 0.8179 - 1.0).abs() < 0.02, "beta {beta}");
    assert_eq!(r["fit"]["converged"], true);
}

#[test]
fn fit_bundled_purcell_dataset() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["fit"],
        &data_dir().join("configs/fit_purcell_ed.toml"),
        tmp.path(),
    );
    let r = json_result(&tmp.path().join("fit.json"));
    let a = r["fit"]["params"]["A"].as_f64().unwrap();
    let b = r["fit"]["params"]["B"].as_f64().unwrap();
    assert!((a / 51.80 - 1.0).abs() < 0.02, "A {a}");
    assert!((b / 16.05 - 1.0).abs() < 0.02, "B {b}");
}

#[test]
fn malformed_csv_is_ingestion_error() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.csv"), "d_nm,y\n800,1.0\n840,oops\n").unwrap();
    let cfg = write_config(
        tmp.path(),
        "[mode]\npreset = \"md_finite\"\n\n[fit]\nmodel = \"cdos\"\ndata = \"bad.csv\"\n",
    );
    let o = run(&["fit"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.csv:3"), "{err}");
}

#[test]
fn missing_data_file_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[mode]\npreset = \"md_finite\"\n\n[fit]\nmodel = \"cdos\"\ndata = \"nope.csv\"\n",
    );
    let o = run(&["fit"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validity_weak_at_three_debye() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["validity"],
        &data_dir().join("configs/validity_ed.toml"),
        tmp.path(),
    );
    let r = json_result(&tmp.path().join("validity.json"));
    assert_eq!(r["regime"], "weak");
    assert_eq!(r["regime_simplified"], "weak");
    assert!(r["margin"].as_f64().unwrap() < 1.0);
}

#[test]
fn lattice_coefficients_json() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["lattice-coeffs", "--format", "json"],
        &data_dir().join("configs/lattice_ed.toml"),
        tmp.path(),
    );
    let r = json_result(&tmp.path().join("lattice_coeffs.json"));
    assert_eq!(r["columns"], serde_json::json!(["n", "gamma_raw", "c_n"]));
    let c1 = r["rows"][1][2].as_f64().unwrap();
    assert!((c1 / 0.516 - 1.0).abs() < 0.05, "c1 {c1}");
    assert!(r["notes"]["max_rel_change_on_doubling"].is_string());
}

#[test]
fn lattice_truncation_failure_is_numerical_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[lattice]\nkind = \"ed\"\nlambda_nm = 552.0\nz_nm = 1.0\nsum_terms = 1\n",
    );
    let o = run(&["lattice-coeffs"], &cfg, &tmp.path().join("out"));
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn unwritable_output_is_io_error() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = run(
        &["rates"],
        &data_dir().join("rates/md_table.toml"),
        &blocker.join("sub"),
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn outputs_embed_version_and_config() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &["cdos-model"],
        &data_dir().join("configs/cdos_ed_finite.toml"),
        tmp.path(),
    );
    let text = fs::read_to_string(tmp.path().join("cdos_model.csv")).unwrap();
    assert!(text.starts_with(&format!("# bic-entangle {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("#   preset = \"ed_finite\""));
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[mode]\npreset = \"ed_finite\"\n\n[fit]\nmodel = \"cdos\"\n\n[fit.synthetic]\nnoise = 0.01\n\n[sweep]\nnumeric = true\n",
    );
    for cmd in ["fit", "sweep"] {
        let (a, b) = (
            tmp.path().join(format!("{cmd}-a")),
            tmp.path().join(format!("{cmd}-b")),
        );
        run_ok(&[cmd, "--seed", "11"], &cfg, &a);
        run_ok(&[cmd, "--seed", "11"], &cfg, &b);
        let mut names: Vec<_> = fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(
                fs::read(a.join(&n)).unwrap(),
                fs::read(b.join(&n)).unwrap(),
                "{cmd}: {n:?}"
            );
        }
    }
    let c = tmp.path().join("fit-c");
    run_ok(&["fit", "--seed", "12"], &cfg, &c);
    assert_ne!(
        fs::read(tmp.path().join("fit-a/fit.json")).unwrap(),
        fs::read(c.join("fit.json")).unwrap()
    );
}
