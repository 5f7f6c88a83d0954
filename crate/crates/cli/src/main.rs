mod commands;
mod config;
mod error;
mod svg;

use clap::{Parser, Subcommand};
use commands::Context;
use config::Config;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "tfl", version, about = "Three-fluid capillarity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment file with one `key = value` per line
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: `out` key, else ./tfl-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides the `seed` key)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only print errors
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Per-fluid weights and Neumann angles
    Tensions,
    /// Good triangle and its weighted Fermat point
    Fermat,
    /// Classify a sector cone and build an improving competitor
    Cones,
    /// Energy of a grid, polyline configuration or cone
    Energy,
    /// Anneal a labelled grid
    Minimize,
    /// Rescale a grid about a point and re-measure the junction
    Blowup,
    /// Scaled energy and radial-deviation trace of a polyline configuration
    Monotonicity,
    /// First variation against a test field
    Variation,
    /// Elimination scan and optional local deviation estimate
    Scan,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Tensions => "tensions",
            Command::Fermat => "fermat",
            Command::Cones => "cones",
            Command::Energy => "energy",
            Command::Minimize => "minimize",
            Command::Blowup => "blowup",
            Command::Monotonicity => "monotonicity",
            Command::Variation => "variation",
            Command::Scan => "scan",
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TFL_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("TFL_THREADS = `{v}` is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.set("seed", seed.to_string());
    }
    let seed = config.usize_or("seed", 0)? as u64;
    let out = match &cli.out {
        Some(p) => p.clone(),
        None => PathBuf::from(config.str_or("out", "tfl-out")),
    };
    let out = commands::out_dir(&out)?;
    let name = cli.command.name();
    let ctx = Context {
        config: &config,
        out: out.clone(),
        seed,
    };
    let result = commands::run(name, &ctx)?;
    let text = serde_json::to_string_pretty(&result)? + "\n";
    std::fs::write(out.join(format!("{name}.json")), &text)?;
    let log = format!("# command = {name}\n{}", config.resolved());
    std::fs::write(out.join(format!("{name}.config.txt")), &log)?;
    if !cli.quiet {
        eprint!("{log}");
        for key in config.unused() {
            eprintln!("warning: config key `{key}` is not used by `{name}`");
        }
        print!("{text}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
