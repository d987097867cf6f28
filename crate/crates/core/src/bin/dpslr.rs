use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpslr::experiment::{
    ledger_report, run_datagen, run_fit, run_sweep, AlgorithmSpec, ExperimentConfig, InputSource,
};

#[derive(Parser)]
#[command(name = "dpslr", version, about = "Differentially private simple linear regression experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated trials of each algorithm on each dataset.
    Fit {
        /// Dataset CSV with an `x,y` header; overrides the config input.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Mean error ratio across a grid of one generating parameter.
    Sweep(Common),
    /// Write the configured synthetic or family input as CSV.
    Datagen(Common),
    /// Print the privacy ledger each algorithm would record.
    Ledger(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Repeat or comma-separate for several values.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    /// e.g. `noisy_stats` or `dp_exp_theilsen:k=10:range=-2..2`; repeatable.
    #[arg(long)]
    algo: Vec<AlgorithmSpec>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Reject CSV values outside [0, 1] instead of clipping them.
    #[arg(long)]
    strict_csv: bool,
    /// Omit wall-clock timestamps so repeated runs are byte-identical.
    #[arg(long)]
    no_header_timestamp: bool,
}

impl Common {
    fn resolve(self) -> dpslr::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(trials) = self.trials {
            c.trials = trials;
        }
        if !self.epsilon.is_empty() {
            c.epsilons = self.epsilon;
        }
        if !self.algo.is_empty() {
            c.algorithms = self.algo;
        }
        if let Some(out) = self.out {
            c.out = out;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        c.strict_csv |= self.strict_csv;
        c.header_timestamp &= !self.no_header_timestamp;
        Ok(c)
    }
}

fn run(cli: Cli) -> dpslr::Result<()> {
    let files = match cli.command {
        Command::Fit { input, common } => {
            let mut config = common.resolve()?;
            if let Some(path) = input {
                config.input = InputSource::Csv { path };
            }
            run_fit(&config)?
        }
        Command::Sweep(common) => run_sweep(&common.resolve()?)?,
        Command::Datagen(common) => run_datagen(&common.resolve()?)?,
        Command::Ledger(common) => {
            print!("{}", ledger_report(&common.resolve()?)?);
            return Ok(());
        }
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
