//! Focal length against chirality for each color channel, plus the
//! chirality at which each LCP focal length changes sign.
//!
//!     cargo run --example focal_vs_chirality [kappa_step]

use chiral_lens::sweeps::{find_threshold, focal_sweep, linear_grid, SweepParameter, SweepSpec, DEFAULT_KAPPA_MAX};
use chiral_lens::{ChannelSpec, PolarizationMode, ThickLensSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let step: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.25);
    let lens = ThickLensSpec::default_biconvex(0.0)?;
    let channels = ChannelSpec::rgb_defaults();
    let spec = SweepSpec::new(
        SweepParameter::Kappa,
        linear_grid(0.0, 3.0, step)?,
        channels.to_vec(),
        PolarizationMode::ALL.to_vec(),
        lens.clone(),
        0.5,
    )?;

    println!("{:>6} {:>3} {:>4} {:>14} status", "kappa", "ch", "mode", "f (m)");
    for row in focal_sweep(&spec)? {
        let f = row.focal_length.map(|f| format!("{f:+.6e}")).unwrap_or_else(|| "-".into());
        println!("{:>6.3} {:>3} {:>4} {:>14} {}", row.kappa, row.channel, row.mode, f, row.status.as_str());
    }

    println!();
    for channel in &channels {
        let t = find_threshold(&lens, channel, PolarizationMode::Lcp, DEFAULT_KAPPA_MAX)?;
        println!(
            "{} LCP focal length flips sign at kappa = {:.6} ({})",
            channel.name(),
            t.kappa_star,
            t.kind.as_str()
        );
    }
    Ok(())
}
