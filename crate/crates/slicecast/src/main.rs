use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slicecast::cli::{self, CliError};
use slicecast::{PredictorConfig, SimConfig, Technique};

#[derive(Parser)]
#[command(
    name = "slicecast",
    version,
    about = "Replay bandwidth traces and score network-slice GBR request strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic bandwidth traces as stream_<i>.csv files
    Generate {
        /// Generator config JSON
        #[arg(long)]
        config: PathBuf,
        /// Number of streams to generate
        #[arg(long)]
        count: usize,
        /// Output directory (created if missing)
        #[arg(long)]
        out_dir: PathBuf,
        /// Override the config's base seed; stream i uses seed + i
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay traces under one technique and write the result JSON
    Simulate {
        /// Trace CSV files (one per stream)
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Simulation config JSON
        #[arg(long)]
        config: PathBuf,
        /// Result JSON path
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON-lines log of every slice modification
        #[arg(long)]
        qos_log: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Replay traces under several techniques and rank them by cost
    Compare {
        /// Trace CSV files (one per stream)
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Simulation config JSON; defaults apply when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated technique names, at least two
        #[arg(long, value_delimiter = ',', required = true)]
        techniques: Vec<String>,
        /// Report JSON path
        #[arg(long)]
        out: PathBuf,
        /// Long-format technique,metric,value CSV for plotting
        #[arg(long)]
        plot_csv: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Config knobs exposed directly on the command line; each one
/// replaces the corresponding config-file field when given.
#[derive(Args)]
struct Overrides {
    /// Reconfiguration interval in seconds
    #[arg(long)]
    interval: Option<f64>,
    /// Deviation lookback, in intervals
    #[arg(long)]
    window_t: Option<usize>,
    /// Undersubscription penalty per reserved-but-idle bit
    #[arg(long)]
    pu: Option<f64>,
    /// Oversubscription penalty per dropped bit
    #[arg(long)]
    po: Option<f64>,
    /// Aggregate slice capacity in bits per second
    #[arg(long)]
    capacity: Option<f64>,
    /// Intervals excluded from metrics while predictors warm up
    #[arg(long)]
    warmup: Option<u32>,
}

impl Overrides {
    fn apply(&self, config: &mut SimConfig) {
        if let Some(interval) = self.interval {
            config.interval = interval;
        }
        if let Some(window_t) = self.window_t {
            config.predictor.window_t = window_t;
        }
        if let Some(pu) = self.pu {
            config.cost.p_u = pu;
        }
        if let Some(po) = self.po {
            config.cost.p_o = po;
        }
        if let Some(capacity) = self.capacity {
            config.slice_capacity = Some(capacity);
        }
        if let Some(warmup) = self.warmup {
            config.warmup_intervals = warmup;
        }
    }
}

fn parse_techniques(names: &[String]) -> Result<Vec<Technique>, CliError> {
    names
        .iter()
        .map(|n| n.trim().parse::<Technique>().map_err(CliError::Usage))
        .collect()
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate { config, count, out_dir, seed } => {
            let mut generator = cli::load_synth_config(&config)?;
            if let Some(seed) = seed {
                generator.seed = seed;
            }
            let paths = cli::cmd_generate(&generator, count, &out_dir)?;
            println!("wrote {} traces to {}", paths.len(), out_dir.display());
        }
        Command::Simulate { traces, config, out, qos_log, overrides } => {
            let mut sim_config = cli::load_sim_config(&config)?;
            overrides.apply(&mut sim_config);
            let result = cli::cmd_simulate(&traces, &sim_config, &out, qos_log.as_deref())?;
            println!(
                "{}: total cost {} over {} intervals, result in {}",
                result.technique,
                result.aggregate.subscription.total_cost,
                result.aggregate.requests.len(),
                out.display()
            );
        }
        Command::Compare { traces, config, techniques, out, plot_csv, overrides } => {
            let mut sim_config = match config {
                Some(path) => cli::load_sim_config(&path)?,
                None => SimConfig::new(PredictorConfig::new(Technique::Max)),
            };
            overrides.apply(&mut sim_config);
            let techniques = parse_techniques(&techniques)?;
            let report = cli::cmd_compare(&traces, &sim_config, &techniques, &out, &plot_csv)?;
            let best = &report.ranking[0];
            println!(
                "best technique: {best} (total cost {}), report in {}",
                report.techniques[best].total_cost,
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
