//! Dispersive permittivity and the bimodal phase indices of a chiral lens
//! material.
//!
//! Frequencies are handled as signed angular-frequency offsets `Ω` from a
//! reference carrier `omega_ref`. The relative permittivity is affine in `Ω`
//! and the two circular modes see `sqrt(eps_r(Ω)) ∓ κ`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Half-width of the default dispersion band, rad/s (2π·130 THz).
pub const DEFAULT_BAND_HALF_WIDTH: f64 = 2.0 * PI * 130.0e12;

/// Phase index of the red channel in the default calibration.
pub const DEFAULT_RED_INDEX: f64 = 2.8;
/// Phase index of the blue channel in the default calibration.
pub const DEFAULT_BLUE_INDEX: f64 = 2.2;

/// Angular frequency `2πc/λ` of a vacuum wavelength.
pub fn angular_frequency(vacuum_wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / vacuum_wavelength
}

/// Linear (first-order) dispersion of the relative permittivity around a
/// reference angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionModel {
    eps_r_ref: f64,
    eps_r_slope: f64,
    omega_ref: f64,
    band_lo: f64,
    band_hi: f64,
}

impl DispersionModel {
    pub fn new(
        eps_r_ref: f64,
        eps_r_slope: f64,
        omega_ref: f64,
        band_lo: f64,
        band_hi: f64,
    ) -> Result<Self> {
        let all_finite = [eps_r_ref, eps_r_slope, omega_ref, band_lo, band_hi]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter(
                "dispersion parameters must be finite".into(),
            ));
        }
        if omega_ref <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "reference angular frequency must be positive, got {omega_ref:e}"
            )));
        }
        if !(band_lo < 0.0 && 0.0 < band_hi) {
            return Err(Error::InvalidParameter(format!(
                "dispersion band [{band_lo:e}, {band_hi:e}] must straddle the reference (lo < 0 < hi)"
            )));
        }
        // affine in Ω: positivity at both ends covers the whole band
        let model = Self {
            eps_r_ref,
            eps_r_slope,
            omega_ref,
            band_lo,
            band_hi,
        };
        for edge in [band_lo, band_hi] {
            let eps = model.eval(edge);
            if eps <= 0.0 {
                return Err(Error::NonPhysical(format!(
                    "relative permittivity {eps} <= 0 at band edge {edge:e} rad/s"
                )));
            }
        }
        Ok(model)
    }

    /// Frequency-independent permittivity with the default band.
    pub fn flat(eps_r: f64, omega_ref: f64) -> Result<Self> {
        Self::new(
            eps_r,
            0.0,
            omega_ref,
            -DEFAULT_BAND_HALF_WIDTH,
            DEFAULT_BAND_HALF_WIDTH,
        )
    }

    /// Linear fit of `eps_r` through two `(channel, phase index)` anchors,
    /// referenced to `reference`.
    pub fn through_anchors(
        reference: &ChannelSpec,
        first: (&ChannelSpec, f64),
        second: (&ChannelSpec, f64),
        band_half_width: f64,
    ) -> Result<Self> {
        let omega_ref = reference.angular_frequency();
        let w1 = first.0.angular_frequency() - omega_ref;
        let w2 = second.0.angular_frequency() - omega_ref;
        if w1 == w2 {
            return Err(Error::InvalidParameter(
                "calibration anchors must have distinct wavelengths".into(),
            ));
        }
        let e1 = first.1 * first.1;
        let e2 = second.1 * second.1;
        let slope = (e2 - e1) / (w2 - w1);
        let eps_ref = e1 - slope * w1;
        Self::new(eps_ref, slope, omega_ref, -band_half_width, band_half_width)
    }

    /// Default calibration: phase index 2.8 at 700 nm, 2.2 at 450 nm,
    /// referenced to the 550 nm green center.
    pub fn default_calibration() -> Self {
        let [red, green, blue] = ChannelSpec::rgb_defaults();
        Self::through_anchors(
            &green,
            (&red, DEFAULT_RED_INDEX),
            (&blue, DEFAULT_BLUE_INDEX),
            DEFAULT_BAND_HALF_WIDTH,
        )
        .expect("default calibration is physical")
    }

    pub fn eps_r_ref(&self) -> f64 {
        self.eps_r_ref
    }

    pub fn eps_r_slope(&self) -> f64 {
        self.eps_r_slope
    }

    pub fn omega_ref(&self) -> f64 {
        self.omega_ref
    }

    pub fn band(&self) -> (f64, f64) {
        (self.band_lo, self.band_hi)
    }

    pub fn contains(&self, omega_offset: f64) -> bool {
        (self.band_lo..=self.band_hi).contains(&omega_offset)
    }

    fn eval(&self, omega_offset: f64) -> f64 {
        self.eps_r_ref + omega_offset * self.eps_r_slope
    }

    /// `eps_r(Ω) = eps_r_ref + Ω·eps_r_slope`.
    pub fn relative_permittivity(&self, omega_offset: f64) -> Result<f64> {
        if !self.contains(omega_offset) {
            return Err(Error::OutOfBand {
                omega: omega_offset,
                lo: self.band_lo,
                hi: self.band_hi,
            });
        }
        let eps = self.eval(omega_offset);
        if eps <= 0.0 {
            return Err(Error::NonPhysical(format!(
                "relative permittivity {eps} <= 0 at offset {omega_offset:e} rad/s"
            )));
        }
        Ok(eps)
    }

    /// Signed offset of a channel center from the reference frequency.
    pub fn channel_offset(&self, channel: &ChannelSpec) -> Result<f64> {
        let omega = channel.angular_frequency() - self.omega_ref;
        if !self.contains(omega) {
            return Err(Error::OutOfBand {
                omega,
                lo: self.band_lo,
                hi: self.band_hi,
            });
        }
        Ok(omega)
    }
}

/// Circular polarization eigenmode of the chiral medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PolarizationMode {
    #[serde(rename = "LCP")]
    Lcp,
    #[serde(rename = "RCP")]
    Rcp,
}

impl PolarizationMode {
    pub const ALL: [PolarizationMode; 2] = [PolarizationMode::Lcp, PolarizationMode::Rcp];

    pub fn as_str(self) -> &'static str {
        match self {
            PolarizationMode::Lcp => "LCP",
            PolarizationMode::Rcp => "RCP",
        }
    }
}

impl fmt::Display for PolarizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolarizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LCP" => Ok(PolarizationMode::Lcp),
            "RCP" => Ok(PolarizationMode::Rcp),
            _ => Err(Error::InvalidParameter(format!(
                "unknown polarization mode `{s}` (expected LCP or RCP)"
            ))),
        }
    }
}

/// Phase index of one mode given `sqrt(eps_r)` and the chirality.
///
/// LCP sees `root_eps - kappa`, RCP sees `root_eps + kappa`. Negating `kappa`
/// exchanges the two modes exactly.
pub fn mode_index(root_eps: f64, kappa: f64, mode: PolarizationMode) -> f64 {
    match mode {
        PolarizationMode::Lcp => root_eps - kappa,
        PolarizationMode::Rcp => root_eps + kappa,
    }
}

/// Dispersive chiral lens material.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralMedium {
    dispersion: DispersionModel,
    kappa: f64,
    label: String,
}

impl ChiralMedium {
    pub fn new(dispersion: DispersionModel, kappa: f64, label: impl Into<String>) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "chirality must be finite and >= 0, got {kappa}"
            )));
        }
        Ok(Self {
            dispersion,
            kappa,
            label: label.into(),
        })
    }

    pub fn dispersion(&self) -> &DispersionModel {
        &self.dispersion
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same material with a different chirality.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.dispersion, kappa, self.label.clone())
    }

    /// `sqrt(eps_r(Ω)) ∓ κ` for LCP / RCP.
    pub fn phase_index(&self, omega_offset: f64, mode: PolarizationMode) -> Result<f64> {
        let root = self.dispersion.relative_permittivity(omega_offset)?.sqrt();
        let n = mode_index(root, self.kappa, mode);
        if n <= 0.0 {
            return Err(Error::NonPhysical(format!(
                "{mode} phase index {n} <= 0 (kappa = {}, offset {omega_offset:e} rad/s)",
                self.kappa
            )));
        }
        Ok(n)
    }

    /// Smallest LCP phase index over the declared band.
    pub fn min_lcp_index(&self) -> f64 {
        let (lo, hi) = self.dispersion.band();
        let eps = self.dispersion.eval(lo).min(self.dispersion.eval(hi));
        eps.sqrt() - self.kappa
    }
}

/// Uniform achiral, non-dispersive background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundMedium {
    n_p1: f64,
}

impl BackgroundMedium {
    pub fn new(n_p1: f64) -> Result<Self> {
        if !(n_p1.is_finite() && n_p1 >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "background index must be finite and >= 1, got {n_p1}"
            )));
        }
        Ok(Self { n_p1 })
    }

    pub fn vacuum() -> Self {
        Self { n_p1: 1.0 }
    }

    pub fn index(&self) -> f64 {
        self.n_p1
    }
}

impl Default for BackgroundMedium {
    fn default() -> Self {
        Self::vacuum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelName {
    R,
    G,
    B,
}

impl ChannelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelName::R => "R",
            ChannelName::G => "G",
            ChannelName::B => "B",
        }
    }
}

impl fmt::Display for ChannelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "R" => Ok(ChannelName::R),
            "G" => Ok(ChannelName::G),
            "B" => Ok(ChannelName::B),
            _ => Err(Error::InvalidParameter(format!(
                "unknown channel `{s}` (expected R, G or B)"
            ))),
        }
    }
}

/// A color channel represented by its center vacuum wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    name: ChannelName,
    vacuum_wavelength: f64,
}

impl ChannelSpec {
    pub const MIN_WAVELENGTH: f64 = 300e-9;
    pub const MAX_WAVELENGTH: f64 = 1100e-9;

    pub fn new(name: ChannelName, vacuum_wavelength: f64) -> Result<Self> {
        if !(vacuum_wavelength > Self::MIN_WAVELENGTH && vacuum_wavelength < Self::MAX_WAVELENGTH) {
            return Err(Error::InvalidParameter(format!(
                "channel {name} wavelength {vacuum_wavelength:e} m outside (300 nm, 1100 nm)"
            )));
        }
        Ok(Self {
            name,
            vacuum_wavelength,
        })
    }

    /// R = 700 nm, G = 550 nm, B = 450 nm.
    pub fn rgb_defaults() -> [ChannelSpec; 3] {
        [
            ChannelSpec {
                name: ChannelName::R,
                vacuum_wavelength: 700e-9,
            },
            ChannelSpec {
                name: ChannelName::G,
                vacuum_wavelength: 550e-9,
            },
            ChannelSpec {
                name: ChannelName::B,
                vacuum_wavelength: 450e-9,
            },
        ]
    }

    pub fn name(&self) -> ChannelName {
        self.name
    }

    pub fn vacuum_wavelength(&self) -> f64 {
        self.vacuum_wavelength
    }

    pub fn angular_frequency(&self) -> f64 {
        angular_frequency(self.vacuum_wavelength)
    }
}
