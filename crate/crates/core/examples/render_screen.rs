//! Renders the demo transparency on a screen placed at the conjugate plane of
//! one (channel, mode), for both modes.
//!
//!     cargo run --release --example render_screen [out_dir] [R|G|B] [LCP|RCP]

use std::path::PathBuf;

use chiral_lens::imaging::{demo_transparency, render_at_screen, save_screen_image};
use chiral_lens::{ChannelName, ChannelSpec, PolarizationMode, ThickLensSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "render_out".into()));
    let channel: ChannelName = args.next().as_deref().unwrap_or("G").parse()?;
    let target: PolarizationMode = args.next().as_deref().unwrap_or("LCP").parse()?;
    std::fs::create_dir_all(&out)?;

    let lens = ThickLensSpec::default_biconvex(ThickLensSpec::DEFAULT_KAPPA)?;
    let object = demo_transparency(256, 1e-4)?;
    let d_o = 0.5;
    let spec = ChannelSpec::rgb_defaults()
        .into_iter()
        .find(|c| c.name() == channel)
        .expect("rgb channel");
    let omega = lens.medium().dispersion().channel_offset(&spec)?;
    let screen = lens.solve_image(omega, target, d_o)?;
    if !screen.is_real {
        return Err(format!("{channel} {target} image is virtual").into());
    }

    for mode in PolarizationMode::ALL {
        let image = render_at_screen(&object, &lens, d_o, screen.image_distance, mode)?;
        let path = out.join(format!("screen_{}.png", mode.as_str().to_ascii_lowercase()));
        save_screen_image(&image, &path)?;
        println!("{} ({} m behind V2)", path.display(), screen.image_distance);
        for r in &image.per_channel_report {
            println!("  {}: blur {:.2} px, scale {:+.4}", r.channel, r.blur_radius / image.pitch, r.scale);
        }
    }
    Ok(())
}
