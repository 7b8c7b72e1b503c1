//! Parameter sweeps over chirality, wavelength and screen position, and
//! location of the LCP sign-flip threshold in chirality.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::channel_geometry;
use crate::matrix::{bracket_numerator, ThickLensSpec};
use crate::media::{angular_frequency, mode_index, ChannelName, ChannelSpec, PolarizationMode};
use crate::table::{fmt_f64, Table};

/// Upper end of the chirality search range for [`find_threshold`].
pub const DEFAULT_KAPPA_MAX: f64 = 5.0;

/// Final bracket width of the threshold bisection.
pub const THRESHOLD_BRACKET: f64 = 1e-9;

/// Token written in the focal column for a pole.
pub const POLE_TOKEN: &str = "inf_pole";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Kappa,
    Wavelength,
    ScreenDistance,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Kappa => "kappa",
            SweepParameter::Wavelength => "wavelength",
            SweepParameter::ScreenDistance => "screen_distance",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(SweepParameter::Kappa),
            "wavelength" => Ok(SweepParameter::Wavelength),
            "screen_distance" => Ok(SweepParameter::ScreenDistance),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter `{s}` (expected kappa, wavelength or screen_distance)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub channels: Vec<ChannelSpec>,
    pub modes: Vec<PolarizationMode>,
    pub lens: ThickLensSpec,
    /// Needed by image-distance and screen sweeps.
    pub object_distance: f64,
}

impl SweepSpec {
    pub fn new(
        parameter: SweepParameter,
        grid: Vec<f64>,
        channels: Vec<ChannelSpec>,
        modes: Vec<PolarizationMode>,
        lens: ThickLensSpec,
        object_distance: f64,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "sweep grid must be finite and strictly ascending".into(),
            ));
        }
        if channels.is_empty() || modes.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one channel and mode".into()));
        }
        if !(object_distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "object distance must be positive, got {object_distance}"
            )));
        }
        let mut modes = modes;
        modes.sort();
        modes.dedup();
        Ok(Self {
            parameter,
            grid,
            channels,
            modes,
            lens,
            object_distance,
        })
    }

    fn require(&self, parameter: SweepParameter) -> Result<()> {
        if self.parameter != parameter {
            return Err(Error::InvalidParameter(format!(
                "sweep over {} requested on a {} grid",
                parameter.as_str(),
                self.parameter.as_str()
            )));
        }
        Ok(())
    }
}

/// Evenly spaced grid `from, from+step, ..., to` (endpoints included when
/// `to - from` is a whole number of steps).
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bad grid range from={from} to={to} step={step}"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FocalStatus {
    Ok,
    Pole,
    NonPhysical,
}

impl FocalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FocalStatus::Ok => "ok",
            FocalStatus::Pole => "pole",
            FocalStatus::NonPhysical => "nonphysical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalRow {
    pub kappa: f64,
    pub channel: ChannelName,
    pub mode: PolarizationMode,
    pub focal_length: Option<f64>,
    pub status: FocalStatus,
}

fn classify_focal(result: Result<f64>) -> Result<(Option<f64>, FocalStatus)> {
    match result {
        Ok(f) => Ok((Some(f), FocalStatus::Ok)),
        Err(Error::InfiniteFocus { .. }) => Ok((None, FocalStatus::Pole)),
        Err(Error::NonPhysical(_)) => Ok((None, FocalStatus::NonPhysical)),
        Err(e) => Err(e),
    }
}

/// Focal length per (κ, channel, mode), in grid order.
pub fn focal_sweep(spec: &SweepSpec) -> Result<Vec<FocalRow>> {
    spec.require(SweepParameter::Kappa)?;
    let offsets = channel_offsets(spec)?;
    let per_point: Result<Vec<Vec<FocalRow>>> = spec
        .grid
        .par_iter()
        .map(|&kappa| {
            let lens = spec.lens.with_kappa(kappa)?;
            let mut rows = Vec::with_capacity(offsets.len() * spec.modes.len());
            for &(channel, omega) in &offsets {
                for &mode in &spec.modes {
                    let (focal_length, status) = classify_focal(lens.focal_length(omega, mode))?;
                    rows.push(FocalRow {
                        kappa,
                        channel,
                        mode,
                        focal_length,
                        status,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    Ok(per_point?.into_iter().flatten().collect())
}

fn channel_offsets(spec: &SweepSpec) -> Result<Vec<(ChannelName, f64)>> {
    let dispersion = spec.lens.medium().dispersion();
    spec.channels
        .iter()
        .map(|c| Ok((c.name(), dispersion.channel_offset(c)?)))
        .collect()
}

/// Columns `kappa,channel,mode,f_m,status`; poles carry `inf_pole`.
pub fn focal_table(rows: &[FocalRow]) -> Table {
    let mut table = Table::new(["kappa", "channel", "mode", "f_m", "status"]);
    for r in rows {
        let f = match (r.status, r.focal_length) {
            (FocalStatus::Ok, Some(f)) => fmt_f64(f),
            (FocalStatus::Pole, _) => POLE_TOKEN.to_string(),
            _ => String::new(),
        };
        table.push_row([
            fmt_f64(r.kappa),
            r.channel.to_string(),
            r.mode.to_string(),
            f,
            r.status.as_str().to_string(),
        ]);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageRow {
    pub kappa: f64,
    pub channel: ChannelName,
    pub mode: PolarizationMode,
    pub image_distance: Option<f64>,
    pub magnification: Option<f64>,
    pub status: &'static str,
}

/// Image distance and magnification per (κ, channel, mode).
pub fn image_sweep(spec: &SweepSpec) -> Result<Vec<ImageRow>> {
    spec.require(SweepParameter::Kappa)?;
    let offsets = channel_offsets(spec)?;
    let per_point: Result<Vec<Vec<ImageRow>>> = spec
        .grid
        .par_iter()
        .map(|&kappa| {
            let lens = spec.lens.with_kappa(kappa)?;
            let mut rows = Vec::new();
            for &(channel, omega) in &offsets {
                for &mode in &spec.modes {
                    let (image_distance, magnification, status) =
                        match lens.solve_image(omega, mode, spec.object_distance) {
                            Ok(s) => (Some(s.image_distance), Some(s.magnification), "ok"),
                            Err(Error::ImageAtInfinity) => (None, None, "image_at_infinity"),
                            Err(Error::NonPhysical(_)) => (None, None, "nonphysical"),
                            Err(e) => return Err(e),
                        };
                    rows.push(ImageRow {
                        kappa,
                        channel,
                        mode,
                        image_distance,
                        magnification,
                        status,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    Ok(per_point?.into_iter().flatten().collect())
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn image_table(rows: &[ImageRow]) -> Table {
    let mut table = Table::new(["kappa", "channel", "mode", "d_i_m", "magnification", "is_real", "status"]);
    for r in rows {
        table.push_row([
            fmt_f64(r.kappa),
            r.channel.to_string(),
            r.mode.to_string(),
            opt(r.image_distance),
            opt(r.magnification),
            r.image_distance.map(|d| (d > 0.0).to_string()).unwrap_or_default(),
            r.status.to_string(),
        ]);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthRow {
    pub wavelength: f64,
    pub mode: PolarizationMode,
    pub focal_length: Option<f64>,
    pub status: &'static str,
}

/// Focal length vs vacuum wavelength at the lens template's chirality.
pub fn wavelength_sweep(spec: &SweepSpec) -> Result<Vec<WavelengthRow>> {
    spec.require(SweepParameter::Wavelength)?;
    let dispersion = spec.lens.medium().dispersion();
    let mut rows = Vec::with_capacity(spec.grid.len() * spec.modes.len());
    for &wavelength in &spec.grid {
        if !(wavelength > 0.0) {
            return Err(Error::InvalidParameter(format!("wavelength {wavelength} m")));
        }
        let omega = angular_frequency(wavelength) - dispersion.omega_ref();
        for &mode in &spec.modes {
            let (focal_length, status) = if dispersion.contains(omega) {
                let (f, s) = classify_focal(spec.lens.focal_length(omega, mode))?;
                (f, s.as_str())
            } else {
                (None, "out_of_band")
            };
            rows.push(WavelengthRow {
                wavelength,
                mode,
                focal_length,
                status,
            });
        }
    }
    Ok(rows)
}

pub fn wavelength_table(rows: &[WavelengthRow]) -> Table {
    let mut table = Table::new(["wavelength_m", "mode", "f_m", "status"]);
    for r in rows {
        let f = match r.status {
            "pole" => POLE_TOKEN.to_string(),
            _ => opt(r.focal_length),
        };
        table.push_row([fmt_f64(r.wavelength), r.mode.to_string(), f, r.status.to_string()]);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenRow {
    pub screen_distance: f64,
    pub channel: ChannelName,
    pub mode: PolarizationMode,
    pub scale: f64,
    pub blur_radius: f64,
}

/// Chief-ray scale and blur radius vs screen distance.
pub fn screen_sweep(spec: &SweepSpec) -> Result<Vec<ScreenRow>> {
    spec.require(SweepParameter::ScreenDistance)?;
    let offsets = channel_offsets(spec)?;
    let mut rows = Vec::new();
    for &screen_distance in &spec.grid {
        for &(channel, omega) in &offsets {
            for &mode in &spec.modes {
                let g = channel_geometry(&spec.lens, omega, mode, spec.object_distance, screen_distance)?;
                rows.push(ScreenRow {
                    screen_distance,
                    channel,
                    mode,
                    scale: g.scale,
                    blur_radius: g.blur_radius,
                });
            }
        }
    }
    Ok(rows)
}

pub fn screen_table(rows: &[ScreenRow]) -> Table {
    let mut table = Table::new(["screen_m", "channel", "mode", "scale", "blur_radius_m"]);
    for r in rows {
        table.push_row([
            fmt_f64(r.screen_distance),
            r.channel.to_string(),
            r.mode.to_string(),
            fmt_f64(r.scale),
            fmt_f64(r.blur_radius),
        ]);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    /// Lens index equals the background index: the focal power prefactor vanishes.
    IndexMatchPole,
    /// The curvature-plus-thickness factor of the focal power vanishes.
    BracketZero,
}

impl ThresholdKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdKind::IndexMatchPole => "index_match_pole",
            ThresholdKind::BracketZero => "bracket_zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub channel: ChannelName,
    pub mode: PolarizationMode,
    pub kappa_star: f64,
    pub kind: ThresholdKind,
    pub bracket: (f64, f64),
}

impl ThresholdResult {
    /// `#threshold,<channel>,<mode>,<kappa_star>,<kind>,<lo>,<hi>`
    pub fn comment_line(&self) -> String {
        format!(
            "#threshold,{},{},{},{},{},{}",
            self.channel,
            self.mode,
            fmt_f64(self.kappa_star),
            self.kind.as_str(),
            fmt_f64(self.bracket.0),
            fmt_f64(self.bracket.1)
        )
    }
}

/// Bisection on a sign change of `f` over `[lo, hi]` down to `width`.
fn bisect_sign(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> Option<(f64, f64)> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
        return None;
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            // keep the root strictly inside a tiny bracket
            let eps = 0.25 * width;
            return Some((mid - eps, mid + eps));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Smallest chirality at which the LCP focal length of `channel` changes sign.
pub fn find_threshold(
    lens: &ThickLensSpec,
    channel: &ChannelSpec,
    mode: PolarizationMode,
    kappa_max: f64,
) -> Result<ThresholdResult> {
    if mode != PolarizationMode::Lcp {
        return Err(Error::InvalidParameter(
            "chirality thresholds exist only for the LCP mode".into(),
        ));
    }
    if !(kappa_max > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa_max must be positive, got {kappa_max}")));
    }
    let dispersion = lens.medium().dispersion();
    let omega = dispersion.channel_offset(channel)?;
    let root = dispersion.relative_permittivity(omega)?.sqrt();
    let n1 = lens.background_index();
    let no_threshold = Error::NoThreshold { kappa_max };
    if mode_index(root, 0.0, mode) <= n1 {
        return Err(no_threshold);
    }
    // the LCP index reaches zero at κ = root
    let upper = if kappa_max < root { kappa_max } else { root * (1.0 - 1e-12) };

    let index = |k: f64| mode_index(root, k, mode);
    let pole = |k: f64| index(k) - n1;
    let (r1, r2, d) = (lens.r1(), lens.r2(), lens.thickness());
    let bracket_term = |k: f64| bracket_numerator(index(k), n1, r1, r2, d) / (index(k) * r1 * r2);

    let candidates = [
        (ThresholdKind::IndexMatchPole, bisect_sign(pole, 0.0, upper, THRESHOLD_BRACKET)),
        (ThresholdKind::BracketZero, bisect_sign(bracket_term, 0.0, upper, THRESHOLD_BRACKET)),
    ];
    candidates
        .into_iter()
        .filter_map(|(kind, b)| b.map(|b| (kind, b)))
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map(|(kind, bracket)| ThresholdResult {
            channel: channel.name(),
            mode,
            kappa_star: 0.5 * (bracket.0 + bracket.1),
            kind,
            bracket,
        })
        .ok_or(no_threshold)
}
