//! Paraxial and exact ray optics of a chiral, first-order-dispersive thick
//! lens.
//!
//! A chiral lens splits light into left- and right-circularly polarized modes
//! whose phase indices differ by twice the chirality. Each mode gets its own
//! ray-transfer matrix, focal length and image conjugate, so a single
//! object forms two images whose positions and sizes also depend on color.
//!
//! - [`media`]: dispersive permittivity and per-mode phase indices
//! - [`matrix`]: ABCD matrices, focal lengths, image conjugates
//! - [`trace`]: exact meridional ray trace used to check the matrices
//! - [`imaging`]: rendering an RGB transparency on a screen plane
//! - [`sweeps`]: chirality/wavelength/screen sweeps and threshold search
//! - [`cli`]: TOML configuration and the command implementations
//!
//! ```
//! use chiral_lens::matrix::ThickLensSpec;
//! use chiral_lens::media::{ChannelSpec, PolarizationMode};
//!
//! let lens = ThickLensSpec::default_biconvex(0.5).unwrap();
//! let red = ChannelSpec::rgb_defaults()[0];
//! let omega = lens.medium().dispersion().channel_offset(&red).unwrap();
//! let lcp = lens.focal_length(omega, PolarizationMode::Lcp).unwrap();
//! let rcp = lens.focal_length(omega, PolarizationMode::Rcp).unwrap();
//! assert!(rcp < lcp);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod imaging;
pub mod matrix;
pub mod media;
pub mod sweeps;
pub mod table;
pub mod trace;

pub use error::{Error, Result};
pub use matrix::{Composition, ImagingSolution, Ray, RayTransferMatrix, ThickLensSpec};
pub use media::{BackgroundMedium, ChannelName, ChannelSpec, ChiralMedium, DispersionModel, PolarizationMode};
