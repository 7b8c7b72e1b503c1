use std::io;

use thiserror::Error;

/// Errors raised by the optics, imaging and sweep layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("angular-frequency offset {omega:e} rad/s outside dispersion band [{lo:e}, {hi:e}]")]
    OutOfBand { omega: f64, lo: f64, hi: f64 },

    #[error("non-physical configuration: {0}")]
    NonPhysical(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("surface radius must be non-zero")]
    DegenerateSurface,

    #[error("infinite focal length (|1/f| = {inverse_focal:e} 1/m)")]
    InfiniteFocus { inverse_focal: f64 },

    #[error("object lies on the front focal plane; image at infinity")]
    ImageAtInfinity,

    #[error("total internal reflection at surface {surface}")]
    TotalInternalReflection { surface: usize },

    #[error("ray misses surface {surface} within the aperture")]
    MissedSurface { surface: usize },

    #[error("channel {channel} has a degenerate transverse scale ({scale:e})")]
    DegenerateScale { channel: String, scale: f64 },

    #[error("no sign-flip threshold in kappa range [0, {kappa_max}]")]
    NoThreshold { kappa_max: f64 },

    #[error("unsupported raster format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed file at byte {offset}: {reason}")]
    MalformedFile { offset: usize, reason: String },

    #[error("empty table; nothing to write")]
    EmptyTable,

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for I/O and file-format failures, as opposed to physics errors.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::UnsupportedFormat(_) | Error::MalformedFile { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
