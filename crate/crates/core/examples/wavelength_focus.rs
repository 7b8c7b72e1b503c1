//! Longitudinal chromatic split: focal length across the visible band for
//! both modes, as CSV on stdout.
//!
//!     cargo run --example wavelength_focus > focus.csv

use chiral_lens::sweeps::{linear_grid, wavelength_sweep, wavelength_table, SweepParameter, SweepSpec};
use chiral_lens::{ChannelSpec, PolarizationMode, ThickLensSpec};

fn main() -> chiral_lens::Result<()> {
    let spec = SweepSpec::new(
        SweepParameter::Wavelength,
        linear_grid(450e-9, 720e-9, 10e-9)?,
        ChannelSpec::rgb_defaults().to_vec(),
        PolarizationMode::ALL.to_vec(),
        ThickLensSpec::default_biconvex(1.0)?,
        0.5,
    )?;
    wavelength_table(&wavelength_sweep(&spec)?).write_csv(std::io::stdout().lock())
}
