//! Refraction into a chiral half-space: one incident ray, two transmitted
//! rays.
//!
//!     cargo run --example chiral_snell

use chiral_lens::trace::chiral_snell;
use chiral_lens::{Error, PolarizationMode};

fn main() {
    let (n1, eps_r2, kappa) = (1.0, 4.0, 0.5);
    println!("n1 = {n1}, eps_r2 = {eps_r2}, kappa = {kappa}");
    println!("{:>8} {:>12} {:>12}", "theta_i", "theta_t LCP", "theta_t RCP");
    for deg in [0.0, 10.0, 20.0, 30.0, 45.0, 60.0, 75.0, 89.0] {
        let theta = f64::to_radians(deg);
        let t = |mode| match chiral_snell(theta, n1, eps_r2, kappa, mode) {
            Ok(a) => format!("{:.4}", a.to_degrees()),
            Err(Error::TotalInternalReflection { .. }) => "TIR".into(),
            Err(e) => e.to_string(),
        };
        println!("{deg:>8.1} {:>12} {:>12}", t(PolarizationMode::Lcp), t(PolarizationMode::Rcp));
    }

    // from a dense background the LCP mode reflects first
    let theta = f64::to_radians(60.0);
    for mode in PolarizationMode::ALL {
        match chiral_snell(theta, 2.0, eps_r2, kappa, mode) {
            Ok(a) => println!("n1 = 2, 60 deg, {mode}: {:.4} deg", a.to_degrees()),
            Err(e) => println!("n1 = 2, 60 deg, {mode}: {e}"),
        }
    }
}
