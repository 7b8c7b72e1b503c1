//! Exact meridional trace against the ABCD matrix. The residual shrinks as
//! the cube of the ray height.
//!
//!     cargo run --example paraxial_check

use chiral_lens::trace::{convergence_orders, paraxial_agreement_report};
use chiral_lens::{ChannelSpec, PolarizationMode, ThickLensSpec};

fn main() -> chiral_lens::Result<()> {
    let lens = ThickLensSpec::default_biconvex(ThickLensSpec::DEFAULT_KAPPA)?;
    let h = 1e-3 * lens.r1().abs();
    let heights: Vec<f64> = (0..5).map(|k| h / f64::from(1 << (4 - k))).collect();
    for channel in ChannelSpec::rgb_defaults() {
        let omega = lens.medium().dispersion().channel_offset(&channel)?;
        for mode in PolarizationMode::ALL {
            let rows = paraxial_agreement_report(&lens, omega, mode, &heights)?;
            println!("{} {mode}", channel.name());
            for r in &rows {
                println!(
                    "  h = {:.3e}  exact ({:+.9e}, {:+.9e})  residual {:.3e}",
                    r.height, r.exact.height, r.exact.reduced_angle, r.residual
                );
            }
            let orders: Vec<String> = convergence_orders(&rows).iter().map(|p| format!("{p:.3}")).collect();
            println!("  orders {}", orders.join(" "));
        }
    }
    Ok(())
}
