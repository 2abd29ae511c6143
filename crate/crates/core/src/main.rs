use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cyclic_wcl::harness::{emit_csv, run_sweep, Algorithm, SweepConfig};

#[derive(Parser)]
#[command(name = "cwcl", version, about = "Monte Carlo sweeps of weighted-centroid localizers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the sweep described by a config file and write a CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated, e.g. `WCL,ImprovedCyclicWCL`.
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        /// Add theoretical RMSE rows.
        #[arg(long)]
        theory: bool,
    },
}

fn run(cmd: Cmd) -> cyclic_wcl::Result<()> {
    let Cmd::Run { config, out, trials, seed, algorithms, theory } = cmd;
    let mut cfg = SweepConfig::from_file(&config)?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(names) = algorithms {
        cfg.algorithms = names
            .iter()
            .map(|n| {
                Algorithm::parse(n.trim())
                    .ok_or_else(|| cyclic_wcl::Error::InvalidArgument(format!("unknown algorithm '{n}'")))
            })
            .collect::<cyclic_wcl::Result<_>>()?;
    }
    cfg.theory |= theory;
    let result = run_sweep(&cfg)?;
    emit_csv(&result, &out)
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cwcl: error: {e}");
            ExitCode::FAILURE
        }
    }
}
