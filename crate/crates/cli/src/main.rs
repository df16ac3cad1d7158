use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evolab::config::ExperimentConfig;
use evolab::convergence::registry;
use evolab::{runner, Error};

#[derive(Parser)]
#[command(name = "evolab", version, about = "Convergence experiments for stochastic evolution equations")]
struct Cli {
    /// Worker threads (defaults to the number of cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory, overriding the config's `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed, overriding the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every sweep in a config file.
    Run { config: PathBuf },
    /// List registered theorem ids, optionally filtered by id substring or group.
    List { filter: Option<String> },
}

fn run(cli: &Cli, path: &PathBuf) -> Result<bool, Error> {
    let (mut cfg, bytes) = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::ConfigInvalid("--workers must be >= 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
    let manifest = pool.install(|| runner::run(&cfg, &bytes, &out))?;
    for e in &manifest.experiments {
        let status = if e.pass { "pass" } else { "FAIL" };
        match &e.error {
            Some(msg) => println!("{:<16} {status}  {}  ({msg})", e.theorem, e.dir),
            None => println!("{:<16} {status}  {}", e.theorem, e.dir),
        }
    }
    println!("reports in {}", out.display());
    Ok(manifest.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::List { filter } => {
            for t in registry::list(filter.as_deref()) {
                println!("{:<16} {:<14} {}", t.id, t.group, t.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { config } => match run(&cli, config) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e @ (Error::ConfigInvalid(_) | Error::UnknownTheorem(_) | Error::UnknownFamily(_))) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
