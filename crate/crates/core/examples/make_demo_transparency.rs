//! Writes the procedural demo object as PPM and PNG.
//!
//!     cargo run --example make_demo_transparency [size_px] [out_dir]

use std::path::PathBuf;

use chiral_lens::imaging::demo_transparency;
use chiral_lens::imaging::raster::write_image;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(128);
    let out = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&out)?;
    let rgb = demo_transparency(size, 2e-4)?.to_rgb();
    for ext in ["ppm", "png"] {
        let path = out.join(format!("demo.{ext}"));
        write_image(&rgb, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
