use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::imaging::{
    self, conjugates_for_channels, demo_transparency, load_transparency, render_at_screen,
    save_screen_image, ScreenImage, Transparency,
};
use crate::media::PolarizationMode;
use crate::sweeps::{
    self, find_threshold, focal_sweep, focal_table, image_sweep, image_table, linear_grid,
    screen_sweep, screen_table, wavelength_sweep, wavelength_table, SweepParameter, SweepSpec,
};
use crate::table::{emit_csv, fmt_f64, Table};
use crate::trace::{convergence_orders, paraxial_agreement_report};

use super::config::{ConfigError, RunConfig, Scenario, ScreenSelector};

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("physics error: {0}")]
    Physics(Error),
    #[error("I/O error: {0}")]
    Io(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_io() {
            CliError::Io(e)
        } else {
            CliError::Physics(e)
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(Error::Io(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn prepare_out(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

/// The calibrated default configuration as TOML.
pub fn cmd_defaults() -> String {
    RunConfig::default().to_toml()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "inf".into())
}

/// Conjugate planes for every (channel, mode): writes `conjugates.csv` and
/// returns a human-readable report.
pub fn cmd_solve(config: &RunConfig, out: &Path) -> CliResult<String> {
    let scenario = config.validate()?;
    prepare_out(out)?;
    let lens = &scenario.lens;
    let rows = conjugates_for_channels(&scenario.channels, lens, scenario.object_distance)?;

    let mut table = Table::new(["channel", "mode", "d_i_m", "magnification", "f_m", "is_real", "status"]);
    let mut report = String::new();
    writeln!(
        report,
        "object distance {} m, kappa {}, background index {}",
        scenario.object_distance,
        lens.medium().kappa(),
        lens.background_index()
    )
    .unwrap();
    for mode in PolarizationMode::ALL {
        writeln!(report, "[{mode}]").unwrap();
        for row in rows.iter().filter(|r| r.mode == mode) {
            let spec = scenario.channels.iter().find(|c| c.name() == row.channel).unwrap();
            let omega = lens.medium().dispersion().channel_offset(spec)?;
            let n2 = lens.phase_index(omega, mode)?;
            match &row.solution {
                Ok(s) => {
                    let planes = lens
                        .cardinal_points(omega, mode)
                        .map(|cp| {
                            format!(
                                " H={:+.4e} m H'={:+.4e} m",
                                cp.front_principal_plane, cp.back_principal_plane
                            )
                        })
                        .unwrap_or_default();
                    writeln!(
                        report,
                        "  {}: n={n2:.6} f={} m d_i={:+.6e} m m={:+.6e} {}{planes}",
                        row.channel,
                        fmt_opt(s.focal_length),
                        s.image_distance,
                        s.magnification,
                        if s.is_real { "real" } else { "virtual" },
                    )
                    .unwrap();
                }
                Err(e) => writeln!(report, "  {}: n={n2:.6} {e}", row.channel).unwrap(),
            }
        }
    }
    for row in &rows {
        match &row.solution {
            Ok(s) => table.push_row([
                row.channel.to_string(),
                row.mode.to_string(),
                fmt_f64(s.image_distance),
                fmt_f64(s.magnification),
                s.focal_length.map(fmt_f64).unwrap_or_else(|| sweeps::POLE_TOKEN.into()),
                s.is_real.to_string(),
                "ok".to_string(),
            ]),
            Err(Error::ImageAtInfinity) => table.push_row([
                row.channel.to_string(),
                row.mode.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "image_at_infinity".to_string(),
            ]),
            Err(e) => return Err(CliError::Physics(Error::NonPhysical(e.to_string()))),
        }
    }
    emit_csv(&table, &out.join("conjugates.csv"))?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn default_for(parameter: SweepParameter) -> Self {
        match parameter {
            SweepParameter::Kappa => SweepRange {
                from: 0.0,
                to: 3.0,
                step: 0.01,
            },
            SweepParameter::Wavelength => SweepRange {
                from: 450e-9,
                to: 720e-9,
                step: 5e-9,
            },
            SweepParameter::ScreenDistance => SweepRange {
                from: 0.03,
                to: 0.09,
                step: 0.001,
            },
        }
    }
}

/// Runs a sweep; returns the paths written.
pub fn cmd_sweep(
    config: &RunConfig,
    out: &Path,
    parameter: SweepParameter,
    range: SweepRange,
) -> CliResult<Vec<PathBuf>> {
    let scenario = config.validate()?;
    let grid = linear_grid(range.from, range.to, range.step)
        .map_err(|e| ConfigError::new("range", e))?;
    let spec = SweepSpec::new(
        parameter,
        grid,
        scenario.channels.to_vec(),
        PolarizationMode::ALL.to_vec(),
        scenario.lens.clone(),
        scenario.object_distance,
    )
    .map_err(|e| ConfigError::new("range", e))?;
    prepare_out(out)?;

    let mut written = Vec::new();
    match parameter {
        SweepParameter::Kappa => {
            let mut table = focal_table(&focal_sweep(&spec)?);
            for channel in &scenario.channels {
                match find_threshold(&scenario.lens, channel, PolarizationMode::Lcp, sweeps::DEFAULT_KAPPA_MAX) {
                    Ok(t) => table.trailer.push(t.comment_line()),
                    Err(Error::NoThreshold { .. }) => {
                        table.trailer.push(format!("#threshold,{},LCP,none", channel.name()))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let path = out.join("focal_sweep.csv");
            emit_csv(&table, &path)?;
            written.push(path);
            let path = out.join("image_sweep.csv");
            emit_csv(&image_table(&image_sweep(&spec)?), &path)?;
            written.push(path);
        }
        SweepParameter::Wavelength => {
            let path = out.join("wavelength_sweep.csv");
            emit_csv(&wavelength_table(&wavelength_sweep(&spec)?), &path)?;
            written.push(path);
        }
        SweepParameter::ScreenDistance => {
            let path = out.join("screen_sweep.csv");
            emit_csv(&screen_table(&screen_sweep(&spec)?), &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Loads the configured object or builds the demo transparency.
pub fn load_object(scenario: &Scenario) -> CliResult<(Transparency, String)> {
    match &scenario.object_path {
        Some(path) => {
            let object = load_transparency(path, scenario.object_pitch, scenario.channels)?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("object")
                .to_string();
            Ok((object, stem))
        }
        None => Ok((
            demo_transparency(scenario.demo_size, scenario.object_pitch)?,
            "demo".to_string(),
        )),
    }
}

/// Screen distance behind V2 selected by the configuration.
pub fn resolve_screen(scenario: &Scenario) -> CliResult<f64> {
    match scenario.screen {
        ScreenSelector::Distance(d) => Ok(d),
        ScreenSelector::Conjugate(name, mode) => {
            let spec = scenario
                .channels
                .iter()
                .find(|c| c.name() == name)
                .expect("validated channels contain R, G and B");
            let omega = scenario.lens.medium().dispersion().channel_offset(spec)?;
            let sol = scenario.lens.solve_image(omega, mode, scenario.object_distance)?;
            if !sol.is_real {
                return Err(CliError::Physics(Error::NonPhysical(format!(
                    "conjugate of {name}/{mode} is virtual (d_i = {:e} m); no screen can capture it",
                    sol.image_distance
                ))));
            }
            Ok(sol.image_distance)
        }
    }
}

/// Renders both modes: `<stem>_lcp.ppm`, `<stem>_rcp.ppm`, `<stem>_report.csv`.
pub fn cmd_render(config: &RunConfig, out: &Path) -> CliResult<(Vec<PathBuf>, String)> {
    let scenario = config.validate()?;
    let (object, stem) = load_object(&scenario)?;
    let screen = resolve_screen(&scenario)?;
    prepare_out(out)?;

    let render = |mode| render_at_screen(&object, &scenario.lens, scenario.object_distance, screen, mode);
    let (lcp, rcp) = rayon::join(|| render(PolarizationMode::Lcp), || render(PolarizationMode::Rcp));
    let images: [ScreenImage; 2] = [lcp?, rcp?];

    let mut written = Vec::new();
    let mut report = format!("screen at {screen:.6e} m behind V2\n");
    let mut all = Vec::new();
    for image in &images {
        let path = out.join(format!("{stem}_{}.ppm", image.mode.as_str().to_ascii_lowercase()));
        save_screen_image(image, &path)?;
        written.push(path);
        writeln!(report, "[{}] pitch {:.4e} m/px", image.mode, image.pitch).unwrap();
        for r in &image.per_channel_report {
            writeln!(
                report,
                "  {}: blur radius {:.4e} m ({:.2} px), scale {:+.4e}, d_i {:+.4e} m {}",
                r.channel,
                r.blur_radius,
                r.blur_radius / image.pitch,
                r.scale,
                r.image_distance,
                if r.is_real { "real" } else { "virtual" }
            )
            .unwrap();
        }
        all.extend_from_slice(&image.per_channel_report);
    }
    let report_path = out.join(format!("{stem}_report.csv"));
    let mut buf = Vec::new();
    imaging::write_report_csv(&all, &mut buf)?;
    fs::write(&report_path, buf)?;
    written.push(report_path);
    Ok((written, report))
}

/// Exact trace vs paraxial matrix per (channel, mode); one CSV each.
pub fn cmd_trace_check(
    config: &RunConfig,
    out: &Path,
    heights: Option<Vec<f64>>,
) -> CliResult<(Vec<PathBuf>, String)> {
    let scenario = config.validate()?;
    let lens = &scenario.lens;
    let heights = match heights {
        Some(h) => h,
        None => {
            let h = 1e-3 * lens.r1().abs();
            vec![h / 4.0, h / 2.0, h]
        }
    };
    if heights.is_empty() || heights.iter().any(|h| !(*h >= 0.0 && *h < lens.aperture_radius())) {
        return Err(ConfigError::new("heights", "heights must lie in [0, aperture_m)").into());
    }
    if heights.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::new("heights", "heights must be strictly ascending").into());
    }
    prepare_out(out)?;

    let mut written = Vec::new();
    let mut report = String::new();
    for channel in &scenario.channels {
        let omega = lens.medium().dispersion().channel_offset(channel)?;
        for mode in PolarizationMode::ALL {
            let rows = paraxial_agreement_report(lens, omega, mode, &heights)?;
            let mut table = Table::new(["height_m", "exact_h", "exact_u", "parax_h", "parax_u", "residual"]);
            for r in &rows {
                table.push_row([
                    fmt_f64(r.height),
                    fmt_f64(r.exact.height),
                    fmt_f64(r.exact.reduced_angle),
                    fmt_f64(r.paraxial.height),
                    fmt_f64(r.paraxial.reduced_angle),
                    fmt_f64(r.residual),
                ]);
            }
            let path = out.join(format!(
                "trace_check_{}_{}.csv",
                channel.name(),
                mode.as_str().to_ascii_lowercase()
            ));
            emit_csv(&table, &path)?;
            written.push(path);
            let orders: Vec<String> = convergence_orders(&rows).iter().map(|o| format!("{o:.3}")).collect();
            writeln!(
                report,
                "{} {}: max residual {:.3e}, observed orders [{}]",
                channel.name(),
                mode,
                rows.iter().map(|r| r.residual).fold(0.0, f64::max),
                orders.join(", ")
            )
            .unwrap();
        }
    }
    Ok((written, report))
}
