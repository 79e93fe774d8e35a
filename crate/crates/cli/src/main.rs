//! `cornermhd <command> --config <path> [--out <dir>] [--seed <u64>] [--jobs <n>]`
//!
//! Exit codes: 0 all checks pass, 1 a check or data precondition failed,
//! 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::{error, info};

use cornermhd_cli::commands::{execute, Failure, Output};
use cornermhd_cli::config::{parse_config_for, Command};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    RunLinear,
    RunPicard,
    EllipticSuite,
    SingularityScan,
    NormStudy,
    CheckSymmetrizer,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::RunLinear => Command::RunLinear,
            Cmd::RunPicard => Command::RunPicard,
            Cmd::EllipticSuite => Command::EllipticSuite,
            Cmd::SingularityScan => Command::SingularityScan,
            Cmd::NormStudy => Command::NormStudy,
            Cmd::CheckSymmetrizer => Command::CheckSymmetrizer,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cornermhd", version, about = "Compressible ideal MHD experiments on corner domains")]
struct Cli {
    command: Cmd,
    /// Run configuration (sectioned `key = value` file).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent sub-runs.
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(cli: Cli) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", cli.config.display())))?;
    let mut cfg = parse_config_for(&text, Some(cli.command.into()))
        .map_err(|e| Failure::Config(format!("{}: {e}", cli.config.display())))?;
    cfg.finalize(cli.seed, cli.out)
        .map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Failure::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let mut out = Output::new(&cfg)?;
    info!("{} config={} -> {}", cfg.command.name(), cfg.hash(), out.path().display());
    execute(&cfg, &mut out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(failed) if failed.is_empty() => {
            println!("PASS");
            ExitCode::SUCCESS
        }
        Ok(failed) => {
            for f in &failed {
                error!("check failed: {f}");
            }
            println!("FAIL ({} checks)", failed.len());
            ExitCode::from(1)
        }
        Err(f) => {
            error!("{}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
