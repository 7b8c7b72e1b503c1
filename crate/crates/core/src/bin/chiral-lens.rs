use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chiral_lens::cli::{self, CliError, RunConfig, SweepRange};
use chiral_lens::sweeps::SweepParameter;

#[derive(Parser)]
#[command(name = "chiral-lens", version, about = "Dual-image optics of a chiral dispersive thick lens")]
struct Args {
    /// TOML configuration; the calibrated defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and rendering.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Image conjugates for every channel and mode.
    Solve,
    /// Parameter sweep written as CSV.
    Sweep {
        #[arg(long, default_value = "kappa")]
        param: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Render the LCP and RCP screen images.
    Render,
    /// Compare the exact ray trace with the paraxial matrices.
    TraceCheck {
        /// Comma-separated ascending heights in meters.
        #[arg(long, value_delimiter = ',')]
        heights: Option<Vec<f64>>,
    },
    /// Print the calibrated default configuration.
    Defaults,
}

fn run(args: Args) -> Result<String, CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| cli::ConfigError::new("--threads", e))?;
    }
    if let Command::Defaults = args.command {
        return Ok(cli::cmd_defaults());
    }
    let config = match &args.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            cli::config::LoadError::Io(io) => CliError::from(io),
            cli::config::LoadError::Config(c) => CliError::Config(c),
        })?,
        None => RunConfig::default(),
    };
    let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());

    let mut text = String::new();
    match args.command {
        Command::Solve => text = cli::cmd_solve(&config, &out)?,
        Command::Sweep { param, from, to, step } => {
            let parameter: SweepParameter = param
                .parse()
                .map_err(|e| cli::ConfigError::new("--param", e))?;
            let d = SweepRange::default_for(parameter);
            let range = SweepRange {
                from: from.unwrap_or(d.from),
                to: to.unwrap_or(d.to),
                step: step.unwrap_or(d.step),
            };
            for path in cli::cmd_sweep(&config, &out, parameter, range)? {
                writeln!(text, "wrote {}", path.display()).unwrap();
            }
        }
        Command::Render => {
            let (paths, report) = cli::cmd_render(&config, &out)?;
            text = report;
            for path in paths {
                writeln!(text, "wrote {}", path.display()).unwrap();
            }
        }
        Command::TraceCheck { heights } => {
            let (paths, report) = cli::cmd_trace_check(&config, &out, heights)?;
            text = report;
            for path in paths {
                writeln!(text, "wrote {}", path.display()).unwrap();
            }
        }
        Command::Defaults => unreachable!(),
    }
    Ok(text)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(text) => match io::stdout().lock().write_all(text.as_bytes()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(4)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
