//! End-to-end runs of the `pilotwave` binary on small scenarios.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const HARMONIC_PACKET: &str = r#"
[well]
kind = "harmonic"
omega = 1.0

[spec]
center_level = 120
band = 10
preset = "gaussian_packet"
seed = 42

[analysis.fig_rho]
times = [0.0, 0.25]
points = 400

[analysis.husimi]
x_points = 141
p_points = 141

[analysis.property_suite]
samples = 300
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn pilotwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotwave")).args(args).output().unwrap()
}

fn run_ok(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = pilotwave(&args);
    assert!(
        output.status.success(),
        "{command} failed: {}\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

/// Rows of a CSV as maps from column name to text.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn harmonic_levels_are_exact() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "h.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 10\npreset = \"eigenstate\"\n\
         [analysis.levels]\nlevels = [0, 5, 50, 200]\n",
    );
    let out = dir.path().join("out");
    run_ok("levels", &config, &out, &[]);
    let (header, rows) = read_csv(&out.join("levels.csv"));
    assert_eq!(header, ["n", "E_wkb", "E_exact", "rel_err", "a_minus", "a_plus", "T"]);
    assert_eq!(rows.len(), 4);
    assert!(column(&header, &rows, "rel_err").iter().all(|e| *e < 1e-10));
    let manifest = json(&out.join("levels.manifest.json"));
    assert_eq!(manifest["outputs"][0]["file"], "levels.csv");
}

#[test]
fn quartic_levels_converge_to_the_oracle() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "q.toml",
        "[well]\nkind = \"quartic\"\nstrength = 1.0\n[spec]\ncenter_level = 40\npreset = \"eigenstate\"\n\
         [analysis.levels]\nlevels = [20, 40, 60, 80, 100, 120]\n",
    );
    let out = dir.path().join("out");
    run_ok("levels", &config, &out, &[]);
    let (header, rows) = read_csv(&out.join("levels.csv"));
    let errors = column(&header, &rows, "rel_err");
    assert!(errors.iter().all(|e| *e < 1e-3));
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");

    // Without the oracle the comparison columns stay empty.
    let bare = dir.path().join("bare");
    run_ok("levels", &config, &bare, &["--oracle", "off"]);
    let (_, rows) = read_csv(&bare.join("levels.csv"));
    assert!(rows.iter().all(|r| r[2].is_empty() && r[3].is_empty()));
}

#[test]
fn validation_errors_exit_with_one_and_write_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let empty = write_config(
        dir.path(),
        "empty.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 10\npreset = \"eigenstate\"\n\
         [analysis.levels]\nlevels = []\n",
    );
    let output = pilotwave(&["levels", "--config", empty.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("analysis.levels.levels"));
    assert!(!out.exists());

    let unknown = write_config(
        dir.path(),
        "unknown.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\nomgea = 2.0\n[spec]\ncenter_level = 10\npreset = \"eigenstate\"\n",
    );
    let output = pilotwave(&["levels", "--config", unknown.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("omgea") && stderr.contains("line 4"), "{stderr}");
    assert!(!out.exists());

    let odd_band = write_config(
        dir.path(),
        "odd.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 50\nband = 3\npreset = \"gaussian_packet\"\n",
    );
    let output = pilotwave(&["fig-rho", "--config", odd_band.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let output = pilotwave(&["levels", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(output.status.code(), Some(1));
    let output = pilotwave(&["levels", "--config", empty.to_str().unwrap(), "--oracle", "maybe"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn envelope_snapshots_show_the_packet_and_its_reflection() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "p.toml", HARMONIC_PACKET);
    let out = dir.path().join("out");
    run_ok("fig-rho", &config, &out, &[]);
    let (header, rows) = read_csv(&out.join("rho_snapshots.csv"));
    assert_eq!(header, ["t", "x", "rho_plus", "rho_minus", "rho_bar"]);
    assert_eq!(rows.len(), 800);
    let t = column(&header, &rows, "t");
    let plus = column(&header, &rows, "rho_plus");
    let minus = column(&header, &rows, "rho_minus");
    let bar = column(&header, &rows, "rho_bar");
    let peak = bar[..400].iter().cloned().fold(0.0, f64::max);
    assert_eq!(t[0], 0.0);
    for k in 0..400 {
        if bar[k] > 0.01 * peak {
            assert!(minus[k] < 0.01 * peak);
        }
    }
    assert!(plus[..400].iter().cloned().fold(0.0, f64::max) > 0.99 * peak);
    let summary = json(&out.join("rho_summary.json"));
    assert!(summary[1]["two_branch_fraction"].as_f64().unwrap() > 0.05);

    let eigen = write_config(
        dir.path(),
        "e.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 60\npreset = \"eigenstate\"\n",
    );
    let out = dir.path().join("eigen");
    run_ok("fig-rho", &eigen, &out, &[]);
    let (header, rows) = read_csv(&out.join("rho_snapshots.csv"));
    let plus = column(&header, &rows, "rho_plus");
    let minus = column(&header, &rows, "rho_minus");
    assert!(plus.iter().zip(&minus).all(|(a, b)| (a - b).abs() <= 1e-14 * a));
}

fn trajectory_config(dir: &Path, chi0: f64) -> PathBuf {
    write_config(
        dir,
        &format!("t{chi0}.toml"),
        &format!(
            "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 10\npreset = \"eigenstate\"\n\
             [analysis.fig_trajectory]\nchi0 = {chi0}\nphi0 = 0.0\nlambda0 = 1.0\nv_cl = 1.0\n"
        ),
    )
}

#[test]
fn local_trajectories() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("spike");
    run_ok("fig-trajectory", &trajectory_config(dir.path(), 0.01), &out, &[]);
    let s = json(&out.join("trajectory_summary.json"));
    let peak = s["peak_velocity"].as_f64().unwrap();
    assert!((peak - 200.0).abs() < 0.02 * 200.0, "{peak}");
    let mean = s["time_averaged_velocity"].as_f64().unwrap();
    assert!((mean - 0.01f64.tanh()).abs() < 0.01 * 0.01f64.tanh());
    assert!(s["max_implicit_residual"].as_f64().unwrap() < 1e-3);
    let (header, rows) = read_csv(&out.join("trajectory.csv"));
    assert_eq!(header, ["t", "x", "v", "step_flag"]);
    let forward = column(&header, &rows, "x");

    let out = dir.path().join("uniform");
    run_ok("fig-trajectory", &trajectory_config(dir.path(), 3.0), &out, &[]);
    let s = json(&out.join("trajectory_summary.json"));
    assert!((s["time_averaged_velocity"].as_f64().unwrap() - 3f64.tanh()).abs() < 1e-3);
    // Staircase amplitude λ₀ sech χ₀ / 4π is below 1% of λ₀.
    let (header, rows) = read_csv(&out.join("trajectory.csv"));
    let (t, x) = (column(&header, &rows, "t"), column(&header, &rows, "x"));
    let wobble = t
        .iter()
        .zip(&x)
        .map(|(t, x)| (x - 3f64.tanh() * t).abs())
        .fold(0.0, f64::max);
    assert!(wobble < 0.01, "{wobble}");

    let out = dir.path().join("mirror");
    run_ok("fig-trajectory", &trajectory_config(dir.path(), -0.01), &out, &[]);
    let s = json(&out.join("trajectory_summary.json"));
    assert!((s["peak_velocity"].as_f64().unwrap() + peak).abs() < 1e-6 * peak);
    let (header, rows) = read_csv(&out.join("trajectory.csv"));
    let mirrored = column(&header, &rows, "x");
    assert!(mirrored.last().unwrap() < &-0.99);
    assert!((mirrored.last().unwrap() + forward.last().unwrap()).abs() < 1e-6);
}

#[test]
fn husimi_outputs_and_checks() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "p.toml", HARMONIC_PACKET);
    let out = dir.path().join("out");
    run_ok("husimi", &config, &out, &[]);
    let (header, rows) = read_csv(&out.join("husimi_grid.csv"));
    assert_eq!(header, ["x", "p", "Q", "mode"]);
    assert_eq!(rows.len(), 141 * 141);
    assert!(rows.iter().all(|r| r[3] == "exact"));
    let (header, _) = read_csv(&out.join("husimi_window.csv"));
    assert_eq!(header, ["x", "lambda_minus", "lambda_plus", "nonempty"]);
    let (header, rows) = read_csv(&out.join("husimi_limits.csv"));
    let regimes: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(regimes, ["small", "window", "large"]);
    assert!(column(&header, &rows, "relative_deviation").iter().all(|d| *d < 0.1));
    let (header, rows) = read_csv(&out.join("husimi_bohm_limit.csv"));
    let dev = column(&header, &rows, "deviation_exact");
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
    let s = json(&out.join("husimi_summary.json"));
    assert!((s["normalization"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(s["bohm_limit_pass"], true);
    assert_eq!(s["limits_pass"], true);

    let wkb = dir.path().join("wkb");
    run_ok("husimi", &config, &wkb, &["--oracle", "off"]);
    let (_, rows) = read_csv(&wkb.join("husimi_grid.csv"));
    assert!(!rows.is_empty() && rows.iter().all(|r| r[3] == "wkb"));
    assert!(!wkb.join("husimi_limits.csv").exists());
}

#[test]
fn small_ensemble_is_equivariant() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "two.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 20\nband = 2\npreset = \"two_level\"\n\
         [analysis.equivariance]\ntrajectories = 400\nks_tolerance = 0.1\n",
    );
    let out = dir.path().join("out");
    run_ok("equivariance", &config, &out, &[]);
    let s = json(&out.join("equivariance.json"));
    assert_eq!(s["excluded"], 0);
    assert!(s["ks"].as_f64().unwrap() < 0.1);
    let (header, rows) = read_csv(&out.join("ensemble.csv"));
    assert_eq!(header, ["trajectory_id", "t", "x"]);
    assert_eq!(rows.len(), 800);
}

#[test]
fn property_suite_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "p.toml", HARMONIC_PACKET);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok("property-suite", &config, &a, &[]);
    run_ok("property-suite", &config, &b, &[]);
    let report = fs::read(a.join("property_report.json")).unwrap();
    assert_eq!(report, fs::read(b.join("property_report.json")).unwrap());
    let r: Value = serde_json::from_slice(&report).unwrap();
    assert_eq!(r["failed"], 0);
    let (ma, mb) = (json(&a.join("property-suite.manifest.json")), json(&b.join("property-suite.manifest.json")));
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["config_hash"], mb["config_hash"]);

    // A different seed changes the component seeds and the config hash.
    let c = dir.path().join("c");
    run_ok("property-suite", &config, &c, &["--seed", "7"]);
    let mc = json(&c.join("property-suite.manifest.json"));
    assert_eq!(mc["seed"], 7);
    assert_ne!(mc["seeds"]["property_suite"], ma["seeds"]["property_suite"]);
    assert_ne!(mc["config_hash"], ma["config_hash"]);
}

#[test]
fn property_suite_flags_bad_normalization() {
    let dir = TempDir::new().unwrap();
    let mut rows = String::from("r,re,im\n");
    for r in -2i32..=2 {
        rows.push_str(&format!("{r},0.5,0.0\n"));
    }
    fs::write(dir.path().join("c.csv"), rows).unwrap();
    let config = write_config(
        dir.path(),
        "bad.toml",
        "[well]\nkind = \"harmonic\"\nomega = 1.0\n[spec]\ncenter_level = 60\nband = 4\npreset = \"file\"\n\
         coefficients = \"c.csv\"\n[analysis]\noracle = false\n[analysis.property_suite]\nsamples = 100\n",
    );
    let out = dir.path().join("out");
    let output = pilotwave(&["property-suite", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let report = json(&out.join("property_report.json"));
    assert_eq!(report["failed"], 1);
    let check = &report["checks"][0];
    assert_eq!(check["name"], "coefficient_normalization");
    assert_eq!(check["passed"], false);
    assert!((check["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(check["detail"].as_str().unwrap().contains("1.25"));
    assert!(out.join("property-suite.manifest.json").exists());

    // Other commands refuse the same coefficients up front.
    let output = pilotwave(&["fig-rho", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}
