//! Where the two circular-polarization images of each color land, and which
//! of them are real.
//!
//!     cargo run --example dual_images [object_distance_m]

use chiral_lens::imaging::conjugates_for_channels;
use chiral_lens::{ChannelSpec, ThickLensSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d_o: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.5);
    let channels = ChannelSpec::rgb_defaults();
    for kappa in [0.0, 0.5, 1.0, 1.3] {
        let lens = ThickLensSpec::default_biconvex(kappa)?;
        println!("kappa = {kappa}, object at {d_o} m");
        for row in conjugates_for_channels(&channels, &lens, d_o)? {
            match row.solution {
                Ok(s) => println!(
                    "  {} {}: d_i = {:+.5e} m, m = {:+.4e}, {}",
                    row.channel,
                    row.mode,
                    s.image_distance,
                    s.magnification,
                    if s.is_real { "real" } else { "virtual" }
                ),
                Err(e) => println!("  {} {}: {e}", row.channel, row.mode),
            }
        }
    }
    Ok(())
}
