use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use pcw_cli::suites::SuiteName;
use pcw_cli::{Backend, Command, RunConfig, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "pcw", version, about = "Piecewise contractions of the unit interval")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the configured backend.
    #[arg(long, global = true, value_parser = ["exact", "float"])]
    backend: Option<String>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for `survey` and `suite`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Attractor sets A_0 … A_{k_max}.
    Aks,
    /// Orbit of `orbit.x0` with cycle detection.
    Orbit,
    /// Q, the invariant quasi-partition, periodic orbits and classes.
    Partition,
    /// Breakpoints and branches of the k-th iterate.
    Power,
    /// Capped, highly contractive system.
    Cap,
    /// Random sample survey.
    Survey,
    /// Seeded property suite: attractor, capping or power.
    Suite { name: SuiteName },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    let mut cfg = match &cli.config {
        Some(path) => pcw_cli::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(b) = &cli.backend {
        cfg.backend = b.parse::<Backend>().map_err(anyhow::Error::msg)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let cmd = match &cli.command {
        Cmd::Aks => Command::Aks,
        Cmd::Orbit => Command::Orbit,
        Cmd::Partition => Command::Partition,
        Cmd::Power => Command::Power,
        Cmd::Cap => Command::Cap,
        Cmd::Survey => Command::Survey,
        Cmd::Suite { name } => Command::Suite(*name),
    };
    let output = pcw_cli::run(cmd, &cfg, cli.jobs)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &output.csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", output.csv),
    }
    Ok(output.status.code())
}
