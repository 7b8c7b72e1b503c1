//! Loads a TOML run configuration and prints the conjugate report, the same
//! way `chiral-lens solve` does.
//!
//!     cargo run --example run_config -- crates/core/assets/default.toml

use chiral_lens::cli::{cmd_solve, RunConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "crates/core/assets/default.toml".into());
    let config = match RunConfig::load(path.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    let out = std::env::temp_dir().join("chiral-lens-run-config");
    match cmd_solve(&config, &out) {
        Ok(report) => {
            print!("{report}");
            println!("conjugates.csv in {}", out.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
