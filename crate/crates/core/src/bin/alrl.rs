use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use alrl::bench::{
    aggregate, exit_code, read_results_from, run_experiment, sensitivity_sweep, write_rows, write_rows_to,
    ExperimentConfig, ResultRow, SynthSpec,
};
use alrl::data::save_dense_csv;
use alrl::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Cold-start active learning benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every dataset x method x trial x budget cell of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path`; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun the config's alrl methods for several annotator counts.
    SweepM {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,4,8,10,12,16,20,24")]
        m: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a Gaussian cluster dataset as dense CSV.
    Synth {
        #[arg(long, default_value_t = 4)]
        clusters: usize,
        #[arg(long, default_value_t = 2)]
        classes: usize,
        #[arg(long, default_value_t = 50)]
        per_cluster: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-cell means and standard deviations of a results file.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<T: serde::Serialize>(rows: &[T], out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_rows_to(rows, path),
        None => write_rows(rows, std::io::stdout().lock()),
    }
}

fn results(rows: Vec<ResultRow>, out: Option<PathBuf>, cfg: &ExperimentConfig) -> Result<()> {
    emit(&rows, out.or_else(|| cfg.output_path.clone()))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let rows = run_experiment(&cfg)?;
            results(rows, out, &cfg)
        }
        Command::SweepM { config, m, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let rows = sensitivity_sweep(&cfg, &m)?;
            results(rows, out, &cfg)
        }
        Command::Synth {
            clusters,
            classes,
            per_cluster,
            sigma,
            seed,
            out,
        } => {
            let spec = SynthSpec {
                clusters,
                classes,
                per_cluster,
                sigma,
                seed,
                ..Default::default()
            };
            let ds = spec.generate().map_err(|e| match e {
                Error::InvalidDataset(m) | Error::InvalidParameter(m) => Error::Config(m),
                e => e,
            })?;
            save_dense_csv(&ds, out)
        }
        Command::Aggregate { input, out } => emit(&aggregate(&read_results_from(input)?), out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
