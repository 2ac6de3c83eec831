use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn slowlight(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowlight"))
        .args(args)
        .env_remove("SLOWLIGHT_OUT_DIR")
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fig3_waveform_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["--scenario", "fig3", "--check"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("waveforms.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 42);
    assert_eq!(header[0], "t_s");
    assert_eq!(header[41], "v40_V");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12_001);
    assert!(rows.iter().all(|r| r.split(',').count() == 42));
    let last: f64 = rows[12_000].split(',').next().unwrap().parse().unwrap();
    assert!((last - 12.0).abs() < 1e-9);
}

#[test]
fn metrics_report_circuit_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["--scenario", "fig4", "--emit", "metrics"], dir.path());
    assert!(o.status.success());
    assert!(!dir.path().join("waveforms.csv").exists());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    let ratios: Vec<f64> = v["circuit_spectrum_ratio"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["ratio"].as_f64().unwrap())
        .collect();
    for (r, want) in ratios.iter().zip([0.31, 0.60, 6.4]) {
        assert!((r - want).abs() / want < 0.03, "{r} vs {want}");
    }
    assert_eq!(v["metrics"]["distortion_nrmse"].as_array().unwrap().len(), 41);
    assert_eq!(v["passed"], true);
}

#[test]
fn identical_runs_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--scenario", "fig6b", "--emit", "waveforms,metrics,spectra,oracle", "--decimate", "7"];
    assert!(slowlight(&args, a.path()).status.success());
    assert!(slowlight(&args, b.path()).status.success());
    for f in ["waveforms.csv", "metrics.json", "spectra.csv", "oracle_deltas.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn collapse_guard_fails_when_pulse_survives() {
    let dir = tempfile::tempdir().unwrap();
    // fig5 proper collapses and passes its own check
    let o = slowlight(&["--scenario", "fig5", "--check", "--emit", "metrics"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));

    // same layout with a mild second region: the collapse expectation must trip
    let cfg = dir.path().join("mild.toml");
    fs::write(
        &cfg,
        "name = \"mild\"\nhorizon = 12.0\n\
         [pulse]\ncenter = 2.5\nwidth = 1.0\nwindow = [0.0, 5.0]\n\
         [schedule]\nstages = 40\n[[schedule.breakpoint]]\nt = 0.0\n\
         regions = [{ stages = [0, 24], delay = 0.078 }, { stages = [25, 39], delay = 0.15 }]\n\
         [[expect]]\nkind = \"min_distortion\"\nstage = 40\nmin = 0.5\n",
    )
    .unwrap();
    let o = slowlight(&["--config", cfg.to_str().unwrap(), "--check", "--emit", "metrics"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL min_distortion"));

    // without --check the same run exits cleanly
    let o = slowlight(&["--config", cfg.to_str().unwrap(), "--emit", "metrics"], dir.path());
    assert!(o.status.success());
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "scenario = \"fig3\"\n[integrator]\ndt = 0\n").unwrap();
    let o = slowlight(&["--config", cfg.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("integrator.dt"));

    let o = slowlight(&["--scenario", "fig9"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig6b"));

    let o = slowlight(&["--scenario", "fig3", "--dt", "-1"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn shipped_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/fig4.toml");
    let o = slowlight(&["--config", path.to_str().unwrap(), "--check", "--emit", "metrics"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 7);
}

#[test]
fn sampled_input_replaces_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let mut text = String::from("t,v\n");
    for k in 0..=500 {
        let t = k as f64 * 0.01;
        let x = (t - 2.5) / 1.0;
        text.push_str(&format!("{t},{}\n", (-4.0 * x * x).exp()));
    }
    fs::write(&input, text).unwrap();
    let o = slowlight(&["--scenario", "fig3", "--input", input.to_str().unwrap(), "--emit", "metrics"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    let nu = v["metrics"]["velocity_stages_per_s"].as_f64().unwrap();
    assert!((nu - 13.0).abs() < 0.5, "{nu}");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_slowlight"))
        .args(["--scenario", "fig3", "--emit", "metrics"])
        .env("SLOWLIGHT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("metrics.json").exists());
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["--scenario", "fig5", "--dt", "0.002", "--print-config"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("scenario = \"fig5\""));
    assert!(text.contains("dt = 0.002"));
}
