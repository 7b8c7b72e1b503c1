//! Dual-image rendering of an RGB transparency on an arbitrary screen plane.
//!
//! Each color channel is imaged independently: the chief ray through the
//! aperture center fixes its transverse scale, and the system matrix's B
//! entry fixes the radius of its circle of confusion.

pub mod kernel;
pub mod plane;
pub mod raster;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{ImagingSolution, ThickLensSpec};
use crate::media::{ChannelName, ChannelSpec, PolarizationMode};

pub use kernel::{disc_blur, disc_rect_overlap, DiscKernel};
pub use plane::Plane;
pub use raster::RgbImage;

/// Smallest accepted |transverse scale| of a channel.
pub const MIN_SCALE: f64 = 1e-9;

/// Input object: three channel planes with a physical pixel pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct Transparency {
    pitch: f64,
    planes: [Plane; 3],
    channels: [ChannelSpec; 3],
}

impl Transparency {
    pub fn new(pitch: f64, planes: [Plane; 3], channels: [ChannelSpec; 3]) -> Result<Self> {
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::InvalidParameter(format!("pixel pitch must be positive, got {pitch}")));
        }
        let (w, h) = (planes[0].width, planes[0].height);
        if w == 0 || h == 0 {
            return Err(Error::InvalidParameter("empty transparency".into()));
        }
        if planes.iter().any(|p| p.width != w || p.height != h) {
            return Err(Error::InvalidParameter("channel planes differ in size".into()));
        }
        if planes
            .iter()
            .flat_map(|p| &p.data)
            .any(|v| !(0.0..=1.0).contains(v))
        {
            return Err(Error::InvalidParameter("sample values must lie in [0, 1]".into()));
        }
        Ok(Self {
            pitch,
            planes,
            channels,
        })
    }

    pub fn from_rgb(image: &RgbImage, pitch: f64, channels: [ChannelSpec; 3]) -> Result<Self> {
        let planes = [0, 1, 2].map(|c| {
            Plane::from_fn(image.width, image.height, |x, y| {
                image.data[(y * image.width + x) * 3 + c] as f64 / 255.0
            })
        });
        Self::new(pitch, planes, channels)
    }

    pub fn to_rgb(&self) -> RgbImage {
        planes_to_rgb(&self.planes)
    }

    pub fn width(&self) -> usize {
        self.planes[0].width
    }

    pub fn height(&self) -> usize {
        self.planes[0].height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn planes(&self) -> &[Plane; 3] {
        &self.planes
    }

    pub fn channels(&self) -> &[ChannelSpec; 3] {
        &self.channels
    }
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn planes_to_rgb(planes: &[Plane; 3]) -> RgbImage {
    let (w, h) = (planes[0].width, planes[0].height);
    let mut data = Vec::with_capacity(w * h * 3);
    for i in 0..w * h {
        for p in planes {
            data.push(to_byte(p.data[i]));
        }
    }
    RgbImage::new(w, h, data).expect("planes share dimensions")
}

pub fn load_transparency(path: &Path, pitch: f64, channels: [ChannelSpec; 3]) -> Result<Transparency> {
    let image = raster::read_image(path)?;
    Transparency::from_rgb(&image, pitch, channels)
}

/// Per-channel imaging figures attached to a rendered screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    pub channel: ChannelName,
    pub mode: PolarizationMode,
    pub image_distance: f64,
    pub magnification: f64,
    /// Transverse scale of the chief ray at the screen.
    pub scale: f64,
    pub blur_radius: f64,
    pub is_real: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenImage {
    pub mode: PolarizationMode,
    pub screen_distance: f64,
    pub pitch: f64,
    pub planes: [Plane; 3],
    pub per_channel_report: Vec<ChannelReport>,
}

impl ScreenImage {
    pub fn width(&self) -> usize {
        self.planes[0].width
    }

    pub fn height(&self) -> usize {
        self.planes[0].height
    }

    pub fn to_rgb(&self) -> RgbImage {
        planes_to_rgb(&self.planes)
    }
}

pub fn save_screen_image(image: &ScreenImage, path: &Path) -> Result<()> {
    raster::write_image(&image.to_rgb(), path)
}

/// Chief-ray scale and circle-of-confusion radius of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    pub scale: f64,
    pub blur_radius: f64,
}

/// `scale = A_s - B_s·n_p1/d_o`, `blur = |B_s|·n_p1·a/d_o`.
pub fn channel_geometry(
    lens: &ThickLensSpec,
    omega_offset: f64,
    mode: PolarizationMode,
    object_distance: f64,
    screen_distance: f64,
) -> Result<ChannelGeometry> {
    let n1 = lens.background_index();
    let sys = lens.system_matrix(omega_offset, mode, object_distance, screen_distance)?;
    Ok(ChannelGeometry {
        scale: sys.a - sys.b * n1 / object_distance,
        blur_radius: sys.b.abs() * n1 * lens.aperture_radius() / object_distance,
    })
}

/// Renders the `mode` image of `object` on a screen `screen_distance` behind V2.
pub fn render_at_screen(
    object: &Transparency,
    lens: &ThickLensSpec,
    object_distance: f64,
    screen_distance: f64,
    mode: PolarizationMode,
) -> Result<ScreenImage> {
    if !(object_distance > 0.0) || !(screen_distance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "object and screen distances must be positive (got {object_distance}, {screen_distance})"
        )));
    }
    let dispersion = lens.medium().dispersion();
    let mut reports = Vec::with_capacity(3);
    for spec in object.channels() {
        let omega = dispersion.channel_offset(spec)?;
        let geom = channel_geometry(lens, omega, mode, object_distance, screen_distance)?;
        if geom.scale.abs() < MIN_SCALE {
            return Err(Error::DegenerateScale {
                channel: spec.name().to_string(),
                scale: geom.scale,
            });
        }
        let sol = lens.solve_image(omega, mode, object_distance)?;
        reports.push(ChannelReport {
            channel: spec.name(),
            mode,
            image_distance: sol.image_distance,
            magnification: sol.magnification,
            scale: geom.scale,
            blur_radius: geom.blur_radius,
            is_real: sol.is_real,
        });
    }

    let max_scale = reports.iter().map(|r| r.scale.abs()).fold(0.0, f64::max);
    let pitch = object.pitch() * max_scale;

    let planes: Vec<Plane> = object
        .planes()
        .par_iter()
        .zip(&reports)
        .map(|(plane, report)| {
            let oriented = if report.scale < 0.0 {
                plane.rotated_180()
            } else {
                plane.clone()
            };
            let scaled = oriented.scaled_about_center(report.scale.abs() / max_scale);
            let mut blurred = disc_blur(&scaled, report.blur_radius / pitch);
            blurred.clamp_unit();
            blurred
        })
        .collect();
    let planes: [Plane; 3] = planes.try_into().expect("three channels");

    Ok(ScreenImage {
        mode,
        screen_distance,
        pitch,
        planes,
        per_channel_report: reports,
    })
}

/// One (channel, mode) conjugate of [`conjugate_planes`].
#[derive(Debug)]
pub struct ConjugateRow {
    pub channel: ChannelName,
    pub mode: PolarizationMode,
    pub solution: Result<ImagingSolution>,
}

/// Image conjugates for every channel of `object` in both modes, ordered
/// (R, G, B) × (LCP, RCP).
pub fn conjugate_planes(
    object: &Transparency,
    lens: &ThickLensSpec,
    object_distance: f64,
) -> Result<Vec<ConjugateRow>> {
    conjugates_for_channels(object.channels(), lens, object_distance)
}

pub fn conjugates_for_channels(
    channels: &[ChannelSpec],
    lens: &ThickLensSpec,
    object_distance: f64,
) -> Result<Vec<ConjugateRow>> {
    if !(object_distance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "object distance must be positive, got {object_distance}"
        )));
    }
    let mut sorted = channels.to_vec();
    sorted.sort_by_key(|c| c.name());
    let mut rows = Vec::with_capacity(sorted.len() * 2);
    for spec in &sorted {
        let omega = lens.medium().dispersion().channel_offset(spec)?;
        for mode in PolarizationMode::ALL {
            rows.push(ConjugateRow {
                channel: spec.name(),
                mode,
                solution: lens.solve_image(omega, mode, object_distance),
            });
        }
    }
    Ok(rows)
}

/// Writes `channel,mode,d_i_m,magnification,blur_radius_m,is_real` rows.
pub fn write_report_csv<W: Write>(reports: &[ChannelReport], out: W) -> Result<()> {
    let mut table = crate::table::Table::new([
        "channel",
        "mode",
        "d_i_m",
        "magnification",
        "blur_radius_m",
        "is_real",
    ]);
    for r in reports {
        table.push_row([
            r.channel.to_string(),
            r.mode.to_string(),
            crate::table::fmt_f64(r.image_distance),
            crate::table::fmt_f64(r.magnification),
            crate::table::fmt_f64(r.blur_radius),
            r.is_real.to_string(),
        ]);
    }
    table.write_csv(out)
}

/// Procedural test object: three overlapping colored discs on a mid-gray
/// background.
pub fn demo_transparency(size: usize, pitch: f64) -> Result<Transparency> {
    let s = size as f64;
    let discs = [
        (0.38 * s, 0.40 * s, [0.95, 0.15, 0.10]),
        (0.62 * s, 0.40 * s, [0.10, 0.85, 0.20]),
        (0.50 * s, 0.62 * s, [0.15, 0.25, 0.95]),
    ];
    let radius = 0.2 * s;
    let planes = [0, 1, 2].map(|c| {
        Plane::from_fn(size, size, |x, y| {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let mut v = 0.5;
            for (cx, cy, color) in &discs {
                if (px - cx).powi(2) + (py - cy).powi(2) <= radius * radius {
                    v = color[c];
                }
            }
            v
        })
    });
    Transparency::new(pitch, planes, ChannelSpec::rgb_defaults())
}
