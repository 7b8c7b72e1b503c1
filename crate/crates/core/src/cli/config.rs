//! Run configuration (TOML). Key names and SI units are fixed; every
//! validation failure names the offending key.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{Composition, ThickLensSpec};
use crate::media::{
    BackgroundMedium, ChannelName, ChannelSpec, ChiralMedium, DispersionModel, PolarizationMode,
    DEFAULT_BAND_HALF_WIDTH,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub background_index: f64,
    #[serde(default)]
    pub composition: Composition,
    pub output_dir: PathBuf,
    pub lens: LensConfig,
    pub medium: MediumConfig,
    pub channels: Vec<ChannelConfig>,
    pub object: ObjectConfig,
    pub screen: ScreenConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensConfig {
    pub r1_m: f64,
    pub r2_m: f64,
    pub thickness_m: f64,
    pub aperture_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub eps_r_ref: f64,
    pub eps_r_slope: f64,
    pub omega_ref_rad_s: f64,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_lo_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_hi_rad_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub name: ChannelName,
    pub wavelength_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectConfig {
    /// Raster file; the procedural demo object is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub pitch_m: f64,
    pub distance_m: f64,
    /// Side length of the procedural demo object.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo_size_px: Option<usize>,
}

/// Exactly one of `distance_m` or `target` (`conjugate:<channel>:<mode>`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

pub const DEFAULT_OBJECT_PITCH: f64 = 2e-4;
pub const DEFAULT_OBJECT_DISTANCE: f64 = 0.5;
pub const DEFAULT_DEMO_SIZE: usize = 128;

impl Default for RunConfig {
    fn default() -> Self {
        let dispersion = DispersionModel::default_calibration();
        let (band_lo, band_hi) = dispersion.band();
        Self {
            background_index: 1.0,
            composition: Composition::Swapped,
            output_dir: PathBuf::from("out"),
            lens: LensConfig {
                r1_m: ThickLensSpec::DEFAULT_RADIUS,
                r2_m: -ThickLensSpec::DEFAULT_RADIUS,
                thickness_m: ThickLensSpec::DEFAULT_THICKNESS,
                aperture_m: ThickLensSpec::DEFAULT_APERTURE,
            },
            medium: MediumConfig {
                eps_r_ref: dispersion.eps_r_ref(),
                eps_r_slope: dispersion.eps_r_slope(),
                omega_ref_rad_s: dispersion.omega_ref(),
                kappa: ThickLensSpec::DEFAULT_KAPPA,
                band_lo_rad_s: Some(band_lo),
                band_hi_rad_s: Some(band_hi),
            },
            channels: ChannelSpec::rgb_defaults()
                .iter()
                .map(|c| ChannelConfig {
                    name: c.name(),
                    wavelength_m: c.vacuum_wavelength(),
                })
                .collect(),
            object: ObjectConfig {
                path: None,
                pitch_m: DEFAULT_OBJECT_PITCH,
                distance_m: DEFAULT_OBJECT_DISTANCE,
                demo_size_px: Some(DEFAULT_DEMO_SIZE),
            },
            screen: ScreenConfig {
                distance_m: None,
                target: Some("conjugate:G:LCP".into()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config key `{}`: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScreenSelector {
    Distance(f64),
    Conjugate(ChannelName, PolarizationMode),
}

impl ScreenSelector {
    pub fn parse_target(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["conjugate", ch, mode] => {
                let ch = ch.parse::<ChannelName>().map_err(|e| e.to_string())?;
                let mode = mode.parse::<PolarizationMode>().map_err(|e| e.to_string())?;
                Ok(ScreenSelector::Conjugate(ch, mode))
            }
            _ => Err(format!("`{s}` is not of the form conjugate:<R|G|B>:<LCP|RCP>")),
        }
    }
}

/// A validated configuration, ready for the commands.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub lens: ThickLensSpec,
    pub channels: [ChannelSpec; 3],
    pub object_path: Option<PathBuf>,
    pub object_pitch: f64,
    pub object_distance: f64,
    pub demo_size: usize,
    pub screen: ScreenSelector,
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("must be a positive number, got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("must be finite, got {v}")))
    }
}

fn nonzero(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v != 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("must be finite and non-zero, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            // serde reports the failing field inside the message
            ConfigError::new("", msg)
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file; a relative object path is resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
        let mut config = Self::from_toml(&text).map_err(LoadError::Config)?;
        if let (Some(obj), Some(dir)) = (config.object.path.as_mut(), path.parent()) {
            if obj.is_relative() {
                *obj = dir.join(&*obj);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<Scenario, ConfigError> {
        let n1 = self.background_index;
        let background = BackgroundMedium::new(n1)
            .map_err(|e| ConfigError::new("background_index", e))?;

        let m = &self.medium;
        finite("medium.eps_r_ref", m.eps_r_ref)?;
        finite("medium.eps_r_slope", m.eps_r_slope)?;
        positive("medium.omega_ref_rad_s", m.omega_ref_rad_s)?;
        if !(m.kappa.is_finite() && m.kappa >= 0.0) {
            return Err(ConfigError::new("medium.kappa", format!("must be >= 0, got {}", m.kappa)));
        }
        let band_lo = m.band_lo_rad_s.unwrap_or(-DEFAULT_BAND_HALF_WIDTH);
        let band_hi = m.band_hi_rad_s.unwrap_or(DEFAULT_BAND_HALF_WIDTH);
        if !(band_lo < 0.0) {
            return Err(ConfigError::new("medium.band_lo_rad_s", "must be negative"));
        }
        if !(band_hi > 0.0) {
            return Err(ConfigError::new("medium.band_hi_rad_s", "must be positive"));
        }
        let dispersion =
            DispersionModel::new(m.eps_r_ref, m.eps_r_slope, m.omega_ref_rad_s, band_lo, band_hi)
                .map_err(|e| ConfigError::new("medium.eps_r_slope", e))?;
        let medium = ChiralMedium::new(dispersion, m.kappa, "config")
            .map_err(|e| ConfigError::new("medium.kappa", e))?;

        let l = &self.lens;
        let r1 = nonzero("lens.r1_m", l.r1_m)?;
        let r2 = nonzero("lens.r2_m", l.r2_m)?;
        let d = positive("lens.thickness_m", l.thickness_m)?;
        let a = positive("lens.aperture_m", l.aperture_m)?;
        let lens = ThickLensSpec::new(r1, r2, d, a, medium, background)
            .map_err(|e| match e {
                Error::NonPhysical(_) => ConfigError::new("medium.kappa", e),
                other => ConfigError::new("lens", other),
            })?
            .with_composition(self.composition);

        if self.channels.len() != 3 {
            return Err(ConfigError::new(
                "channels",
                format!("expected three channels (R, G, B), got {}", self.channels.len()),
            ));
        }
        let mut specs = Vec::with_capacity(3);
        for (i, c) in self.channels.iter().enumerate() {
            let spec = ChannelSpec::new(c.name, c.wavelength_m)
                .map_err(|e| ConfigError::new(format!("channels[{i}].wavelength_m"), e))?;
            lens.medium()
                .dispersion()
                .channel_offset(&spec)
                .map_err(|e| ConfigError::new(format!("channels[{i}].wavelength_m"), e))?;
            specs.push(spec);
        }
        specs.sort_by_key(|c| c.name());
        if specs.windows(2).any(|w| w[0].name() == w[1].name()) {
            return Err(ConfigError::new("channels", "channel names must be R, G and B, each once"));
        }
        let channels: [ChannelSpec; 3] = specs.try_into().expect("three channels");

        let object_pitch = positive("object.pitch_m", self.object.pitch_m)?;
        let object_distance = positive("object.distance_m", self.object.distance_m)?;
        let demo_size = self.object.demo_size_px.unwrap_or(DEFAULT_DEMO_SIZE);
        if demo_size == 0 {
            return Err(ConfigError::new("object.demo_size_px", "must be positive"));
        }

        let screen = match (&self.screen.distance_m, &self.screen.target) {
            (Some(dist), None) => ScreenSelector::Distance(positive("screen.distance_m", *dist)?),
            (None, Some(target)) => ScreenSelector::parse_target(target)
                .map_err(|msg| ConfigError::new("screen.target", msg))?,
            _ => {
                return Err(ConfigError::new(
                    "screen",
                    "set exactly one of `distance_m` or `target`",
                ))
            }
        };

        Ok(Scenario {
            lens,
            channels,
            object_path: self.object.path.clone(),
            object_pitch,
            object_distance,
            demo_size,
            screen,
        })
    }
}

#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Config(ConfigError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "cannot read config: {e}"),
            LoadError::Config(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for LoadError {}
