use std::fs;
use std::path::Path;
use std::process::Command;

use chiral_lens::cli::{cmd_render, cmd_solve, cmd_sweep, cmd_trace_check, RunConfig, SweepRange};
use chiral_lens::sweeps::SweepParameter;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chiral-lens"))
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write_config(dir: &Path, config: &RunConfig) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, config.to_toml()).unwrap();
    path
}

#[test]
fn solve_default_gives_six_distinct_rows() {
    let dir = tempfile::tempdir().unwrap();
    cmd_solve(&RunConfig::default(), dir.path()).unwrap();
    let rows = read_csv(&dir.path().join("conjugates.csv"));
    assert_eq!(rows[0], ["channel", "mode", "d_i_m", "magnification", "f_m", "is_real", "status"]);
    let body = &rows[1..];
    assert_eq!(body.len(), 6);
    let keys: Vec<(String, String)> = body.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(
        keys,
        [("R", "LCP"), ("R", "RCP"), ("G", "LCP"), ("G", "RCP"), ("B", "LCP"), ("B", "RCP")]
            .map(|(a, b)| (a.to_string(), b.to_string()))
    );
    let mut distances: Vec<f64> = body.iter().map(|r| r[2].parse().unwrap()).collect();
    distances.sort_by(f64::total_cmp);
    distances.dedup();
    assert_eq!(distances.len(), 6);
}

#[test]
fn zero_kappa_collapses_the_modes() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.medium.kappa = 0.0;
    cmd_solve(&config, dir.path()).unwrap();
    let rows = read_csv(&dir.path().join("conjugates.csv"));
    for pair in rows[1..].chunks(2) {
        assert_eq!(pair[0][2..], pair[1][2..]);
    }
    let (paths, _) = cmd_render(&config, dir.path()).unwrap();
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn strong_chirality_flags_blue_lcp_virtual() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.medium.kappa = 1.3;
    cmd_solve(&config, dir.path()).unwrap();
    let rows = read_csv(&dir.path().join("conjugates.csv"));
    let blue_lcp = rows.iter().find(|r| r[0] == "B" && r[1] == "LCP").unwrap();
    let blue_rcp = rows.iter().find(|r| r[0] == "B" && r[1] == "RCP").unwrap();
    assert_eq!(blue_lcp[5], "false");
    assert!(blue_lcp[2].parse::<f64>().unwrap() < 0.0);
    assert_eq!(blue_rcp[5], "true");
}

fn report_blur(dir: &Path, channel: &str, mode: &str) -> f64 {
    let rows = read_csv(&dir.join("demo_report.csv"));
    let row = rows.iter().find(|r| r[0] == channel && r[1] == mode).unwrap();
    row[4].parse().unwrap()
}

#[test]
fn render_at_selected_conjugate_is_sharp_there() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.screen.target = Some("conjugate:R:RCP".into());
    cmd_render(&config, dir.path()).unwrap();
    assert!(report_blur(dir.path(), "R", "RCP") < 1e-12);
    assert!(report_blur(dir.path(), "G", "RCP") > 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let (paths, _) = cmd_render(&RunConfig::default(), dir.path()).unwrap();
    let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(names, ["demo_lcp.ppm", "demo_rcp.ppm", "demo_report.csv"]);
    let g = report_blur(dir.path(), "G", "LCP");
    for (c, m) in [("R", "LCP"), ("B", "LCP"), ("R", "RCP"), ("G", "RCP"), ("B", "RCP")] {
        assert!(g < report_blur(dir.path(), c, m), "{c} {m}");
    }
}

#[test]
fn virtual_conjugate_target_is_a_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.medium.kappa = 1.3;
    config.screen.target = Some("conjugate:B:LCP".into());
    let err = cmd_render(&config, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn kappa_sweep_reports_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let paths = cmd_sweep(
        &RunConfig::default(),
        dir.path(),
        SweepParameter::Kappa,
        SweepRange::default_for(SweepParameter::Kappa),
    )
    .unwrap();
    let text = fs::read_to_string(&paths[0]).unwrap();
    let thresholds: Vec<(String, f64)> = text
        .lines()
        .filter(|l| l.starts_with("#threshold"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(thresholds.len(), 3);
    let get = |c: &str| thresholds.iter().find(|t| t.0 == c).unwrap().1;
    assert!((get("R") - 1.8).abs() < 0.01);
    assert!((get("B") - 1.2).abs() < 0.01);
    assert!(get("B") < get("G") && get("G") < get("R"));

    let rows = read_csv(&paths[0]);
    assert_eq!(rows[0], ["kappa", "channel", "mode", "f_m", "status"]);
    assert_eq!(rows.len() - 1, 301 * 6);
    assert!(rows[1..].iter().filter(|r| r[2] == "RCP").all(|r| r[3].parse::<f64>().unwrap() > 0.0));
    assert!(paths[1].ends_with("image_sweep.csv"));
}

#[test]
fn sweeps_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::default();
    for parameter in [SweepParameter::Wavelength, SweepParameter::ScreenDistance] {
        let range = SweepRange::default_for(parameter);
        let first = cmd_sweep(&config, dir.path(), parameter, range).unwrap();
        let a = fs::read(&first[0]).unwrap();
        let second = cmd_sweep(&config, dir.path(), parameter, range).unwrap();
        assert_eq!(a, fs::read(&second[0]).unwrap());
    }
}

#[test]
fn trace_check_writes_one_file_per_channel_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let (paths, report) = cmd_trace_check(&RunConfig::default(), dir.path(), None).unwrap();
    assert_eq!(paths.len(), 6);
    assert!(paths[0].ends_with("trace_check_R_lcp.csv"));
    let rows = read_csv(&paths[0]);
    assert_eq!(rows.len(), 4);
    assert_eq!(report.lines().count(), 6);
}

#[test]
fn binary_defaults_round_trip_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("defaults").output().unwrap();
    assert!(out.status.success());
    let parsed = RunConfig::from_toml(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(parsed, RunConfig::default());

    let config = write_config(dir.path(), &parsed);
    let status = bin()
        .args(["--config", config.to_str().unwrap(), "--out"])
        .arg(dir.path().join("o"))
        .arg("solve")
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(dir.path().join("o/conjugates.csv").exists());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let mut bad = RunConfig::default();
    bad.lens.thickness_m = -1.0;
    let path = write_config(dir.path(), &bad);
    let out = bin().args(["--config", path.to_str().unwrap(), "solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lens.thickness_m"));

    let mut virt = RunConfig::default();
    virt.medium.kappa = 1.3;
    virt.screen.target = Some("conjugate:B:LCP".into());
    let path = write_config(dir.path(), &virt);
    let out = bin()
        .args(["--config", path.to_str().unwrap(), "--out"])
        .arg(dir.path().join("r"))
        .arg("render")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let missing = dir.path().join("missing.toml");
    let out = bin().args(["--config", missing.to_str().unwrap(), "solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));

    let out = bin().args(["sweep", "--param", "pressure"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_assets_load() {
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let default = RunConfig::load(&assets.join("default.toml")).unwrap();
    assert_eq!(default, RunConfig::default());

    let demo = chiral_lens::imaging::raster::read_image(&assets.join("demo.ppm")).unwrap();
    let regenerated = chiral_lens::imaging::demo_transparency(128, 2e-4).unwrap().to_rgb();
    assert_eq!(demo, regenerated);

    let config = RunConfig::load(&assets.join("red_rcp.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (paths, _) = cmd_render(&config, dir.path()).unwrap();
    assert!(paths[0].ends_with("demo_lcp.ppm"));
    assert!(report_blur(dir.path(), "R", "RCP") < 1e-12);
}
