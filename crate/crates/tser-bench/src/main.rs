use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use tser_bench::config::ExperimentConfig;
use tser_bench::runner::{self, RunOptions};
use tser_bench::{report, BenchError};
use tser_core::resample::{augment, label, ResampleMethod, ResamplePlan};

/// Benchmark harness for entity-targeted resampling of time series
/// collections.
#[derive(Parser)]
#[command(name = "tser", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leave-one-series-out benchmark over the configured methods.
    Run(RunArgs),
    /// Data-integration study: Global, Local, TSER, TSER(Local), TSER(all).
    Integration(RunArgs),
    /// Sampling-ratio sweep from no resampling to a balanced dataset.
    RatioSweep(RunArgs),
    /// Generate a synthetic collection and write it in the long format.
    Gen(GenArgs),
    /// Resample the training matrix towards one target series and dump the
    /// resampled rows.
    Resample(ResampleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's run seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate at most this many target series.
    #[arg(long)]
    max_series: Option<usize>,
    /// Worker threads for target iterations.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResampleArgs {
    #[arg(long)]
    config: PathBuf,
    /// Series of interest whose rows are oversampled (or kept, for NearMiss).
    #[arg(long)]
    target: String,
    /// smote | adasyn | bsmote | nearmiss
    #[arg(long, default_value = "smote")]
    method: String,
    #[arg(long, default_value_t = 1.0)]
    ratio: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(
    config: &std::path::Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<ExperimentConfig, BenchError> {
    Ok(ExperimentConfig::load(config)?.with_overrides(seed, out))
}

fn run_verb(
    args: RunArgs,
    verb: fn(&ExperimentConfig, &RunOptions) -> Result<runner::RunOutput, BenchError>,
) -> Result<(), BenchError> {
    let config = load(&args.config, args.seed, args.out)?;
    let out_dir = config.output_dir()?.to_path_buf();
    let opts = RunOptions {
        max_series: args.max_series,
        jobs: args.jobs,
    };
    let output = verb(&config, &opts)?;
    let written = report::write_report(&out_dir, &config, &output)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_gen(args: GenArgs) -> Result<(), BenchError> {
    let config = load(&args.config, None, args.out)?;
    let out_dir = config.output_dir()?.to_path_buf();
    let mut config = config;
    if let Some(seed) = args.seed {
        if let Some(generator) = config.data.generator.as_mut() {
            generator.seed = seed;
        }
    }
    if config.data.generator.is_none() {
        return Err(BenchError::Config(
            "gen requires a [data.generator] section".into(),
        ));
    }
    let (collection, _, deviant) = runner::load_raw(&config)?;
    std::fs::create_dir_all(&out_dir).map_err(BenchError::io(&out_dir))?;
    let path = out_dir.join("series.csv");
    tser_bench::io::save_collection(&path, &collection)?;
    println!("wrote {}", path.display());
    if let Some(deviant) = deviant {
        println!("deviant series: {deviant}");
    }
    Ok(())
}

fn run_resample(args: ResampleArgs) -> Result<(), BenchError> {
    let config = load(&args.config, args.seed, args.out)?;
    let out_dir = config.output_dir()?.to_path_buf();
    let method =
        ResampleMethod::from_str(&args.method).map_err(|e| BenchError::Config(e.to_string()))?;
    let prepared = runner::prepare(&config)?;
    let labeled = label(&prepared.train_embedded, &args.target)
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let plan = ResamplePlan::new(method, args.k, args.ratio, config.seed, &args.target)
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let outcome = augment(&labeled, &plan)?;
    let dump = if method.is_oversampler() {
        outcome.dataset.filtered(|s| s.synthetic)
    } else {
        outcome.dataset
    };
    std::fs::create_dir_all(&out_dir).map_err(BenchError::io(&out_dir))?;
    let path = out_dir.join("resampled.csv");
    std::fs::write(&path, tser_bench::io::dataset_to_csv(&dump)).map_err(BenchError::io(&path))?;
    println!("wrote {} ({} rows)", path.display(), dump.len());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run_verb(args, runner::run_loo),
        Command::Integration(args) => run_verb(args, runner::run_integration),
        Command::RatioSweep(args) => run_verb(args, runner::run_ratio_sweep),
        Command::Gen(args) => run_gen(args),
        Command::Resample(args) => run_resample(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(u8::try_from(error.exit_code()).unwrap_or(1))
        }
    }
}
