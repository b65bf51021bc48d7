use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sideinfo_cli::verify;
use sideinfo_cli::{emit_report, run_with_workers, to_csv_string, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sideinfo", version, about = "Source coding with side information: experiments and checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a JSON config and write a CSV report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output path; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run every invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn workers(n: Option<usize>) -> usize {
    n.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Run { config, seed, out, workers: w } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rows = run_with_workers(&cfg, workers(w))?;
            match out.or(cfg.output_path.map(PathBuf::from)) {
                Some(path) => emit_report(&rows, path)?,
                None => print!("{}", to_csv_string(&rows)),
            }
            Ok(())
        }
        Cmd::Verify { seed, workers: w } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers(w))
                .build()
                .map_err(|e| CliError::Resource(e.to_string()))?;
            let outcomes = pool.install(|| verify::run_all(seed));
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed()).count();
            if failed > 0 {
                return Err(CliError::Verify(format!("{failed} suite(s) failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sideinfo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
