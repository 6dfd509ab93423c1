//! Command-line driver. Exit codes: 0 success, 1 usage error,
//! 2 validation failure, 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use echelon_cli::aggregate;
use echelon_cli::csvio;
use echelon_cli::error::CliError;
use echelon_cli::manifest::{Algorithm, AlgoParams, ExperimentManifest};
use echelon_cli::metrics_cmd;
use echelon_cli::operational;
use echelon_cli::runner;
use echelon_core::demand::sample_trace;
use echelon_core::scenario::{save_scenario, validate_scenario, BuiltinScenario};

#[derive(Parser)]
#[command(
    name = "echelon",
    about = "Multi-echelon, multi-objective supply chain optimisation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scenario inspection and validation.
    Scenario {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
    /// Demand trace utilities.
    Demand {
        #[command(subcommand)]
        command: DemandCommand,
    },
    /// Run a solver across one or more seeds.
    Run {
        #[command(subcommand)]
        command: RunCommand,
    },
    /// Quality indicators.
    Metrics {
        #[command(subcommand)]
        command: MetricsCommand,
    },
    /// Merge runs into a cross-run report.
    Aggregate {
        /// Directories holding runs (searched recursively).
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derived reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Validate a scenario file.
    Validate { path: PathBuf },
    /// Print a builtin scenario in the scenario file format.
    Show { builtin: String },
}

#[derive(Subcommand)]
enum DemandCommand {
    /// Sample a seeded demand trace to CSV (t, market_id, demand).
    Sample {
        /// Builtin name or scenario file path.
        scenario: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct RunCommon {
    /// Builtin name (simple|moderate|complex) or scenario file path.
    #[arg(long)]
    scenario: String,
    /// Seeds to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Overwrite existing run directories.
    #[arg(long)]
    force: bool,
    /// Parallel runs; the ECHELON_JOBS environment variable overrides
    /// this flag.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum RunCommand {
    /// Constrained genetic search over whole-horizon decision vectors.
    Nsga2 {
        #[command(flatten)]
        common: RunCommon,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        population: Option<usize>,
        #[arg(long)]
        offspring: Option<usize>,
        /// Demand traces averaged per evaluation.
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Weighted-sum policy search over a fixed weight lattice.
    Scalarised {
        #[command(flatten)]
        common: RunCommon,
        /// Candidate evaluations per weight.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        es_population: Option<usize>,
        #[arg(long)]
        eval_episodes: Option<usize>,
        /// Simplex-lattice partitions for the weight set.
        #[arg(long)]
        weight_partitions: Option<usize>,
    },
    /// Decomposition policy search with an external archive.
    Morld {
        #[command(flatten)]
        common: RunCommon,
        /// Candidate evaluations per subproblem.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        es_population: Option<usize>,
        #[arg(long)]
        eval_episodes: Option<usize>,
        #[arg(long)]
        population: Option<usize>,
        /// Improvement iterations between exchange points.
        #[arg(long)]
        exchange_interval: Option<usize>,
        /// Enable weight adaptation.
        #[arg(long)]
        psa: bool,
        /// Enable cross-subproblem candidate adoption.
        #[arg(long)]
        shared_pool: bool,
    },
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// Compute indicators for a front CSV.
    Compute {
        #[arg(long)]
        front: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Hypervolume reference point "profit,neg_emission,neg_sl".
        #[arg(long = "ref")]
        reference: String,
        /// Normalisation bounds "lo,hi;lo,hi;lo,hi" (defaults to the
        /// widened envelope of the inputs).
        #[arg(long)]
        bounds: Option<String>,
        /// Simplex-lattice partitions of the expected-utility weights.
        #[arg(long, default_value_t = 12)]
        weight_partitions: usize,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Per-solution operational series from a run's episode logs.
    Operational {
        run_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn jobs_override(flag: usize) -> usize {
    match std::env::var("ECHELON_JOBS") {
        Ok(value) => value.parse().unwrap_or(flag).max(1),
        Err(_) => flag.max(1),
    }
}

fn make_manifest(common: &RunCommon, algorithm: Algorithm, params: AlgoParams) -> ExperimentManifest {
    ExperimentManifest {
        scenario: common.scenario.clone(),
        algorithm,
        seeds: common.seed.clone(),
        out_dir: common.out.clone(),
        force: common.force,
        jobs: jobs_override(common.jobs),
        params,
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scenario { command } => match command {
            ScenarioCommand::Validate { path } => {
                let cfg = echelon_core::scenario::load_scenario(&path).map_err(|e| match e {
                    echelon_core::scenario::ScenarioError::Validation(report) => {
                        CliError::Validation(format!("{}:\n{report}", path.display()))
                    }
                    echelon_core::scenario::ScenarioError::Parse { message } => {
                        CliError::Validation(format!("{}: {message}", path.display()))
                    }
                    other => CliError::Runtime(other.to_string()),
                })?;
                let report = validate_scenario(&cfg);
                debug_assert!(report.is_empty());
                println!(
                    "{}: ok ({} nodes, {} routes, action dim {})",
                    path.display(),
                    cfg.nodes.len(),
                    cfg.routes.len(),
                    cfg.action_dim()
                );
                Ok(())
            }
            ScenarioCommand::Show { builtin } => {
                let which = BuiltinScenario::parse(&builtin).ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown builtin '{builtin}' (expected simple|moderate|complex)"
                    ))
                })?;
                print!("{}", save_scenario(&echelon_core::scenario::builtin_scenario(which)));
                Ok(())
            }
        },
        Command::Demand { command } => match command {
            DemandCommand::Sample { scenario, seed, out } => {
                let cfg = echelon_cli::manifest::resolve_scenario(&scenario)?;
                let trace = sample_trace(&cfg, seed);
                csvio::write_trace(&out, &trace)?;
                println!(
                    "wrote {} ({} markets x {} periods)",
                    out.display(),
                    trace.per_market.len(),
                    cfg.horizon
                );
                Ok(())
            }
        },
        Command::Run { command } => {
            let manifest = match &command {
                RunCommand::Nsga2 {
                    common,
                    generations,
                    population,
                    offspring,
                    replicates,
                } => make_manifest(
                    common,
                    Algorithm::Nsga2,
                    AlgoParams {
                        generations: *generations,
                        population: *population,
                        offspring: *offspring,
                        replicates: *replicates,
                        ..AlgoParams::default()
                    },
                ),
                RunCommand::Scalarised {
                    common,
                    budget,
                    es_population,
                    eval_episodes,
                    weight_partitions,
                } => make_manifest(
                    common,
                    Algorithm::Scalarised,
                    AlgoParams {
                        budget: *budget,
                        es_population: *es_population,
                        eval_episodes: *eval_episodes,
                        weight_partitions: *weight_partitions,
                        ..AlgoParams::default()
                    },
                ),
                RunCommand::Morld {
                    common,
                    budget,
                    es_population,
                    eval_episodes,
                    population,
                    exchange_interval,
                    psa,
                    shared_pool,
                } => make_manifest(
                    common,
                    Algorithm::Morld,
                    AlgoParams {
                        budget: *budget,
                        es_population: *es_population,
                        eval_episodes: *eval_episodes,
                        population: *population,
                        exchange_interval: *exchange_interval,
                        psa: Some(*psa),
                        shared_pool: Some(*shared_pool),
                        ..AlgoParams::default()
                    },
                ),
            };
            let records = runner::run_experiment(&manifest)?;
            for record in &records {
                println!(
                    "{} seed {}: {} front points in {:.2}s -> {}",
                    record.algorithm.name(),
                    record.seed,
                    csvio::read_front(&record.front_path)?.0.len(),
                    record.wall_time_s,
                    record.run_dir.display()
                );
            }
            Ok(())
        }
        Command::Metrics { command } => match command {
            MetricsCommand::Compute {
                front,
                truth,
                reference,
                bounds,
                weight_partitions,
                out,
            } => {
                let reference = metrics_cmd::parse_point(&reference)?;
                let bounds = bounds.as_deref().map(metrics_cmd::parse_bounds).transpose()?;
                let report = metrics_cmd::compute(
                    &front,
                    truth.as_deref(),
                    &reference,
                    bounds,
                    weight_partitions,
                )?;
                let json = serde_json::to_string_pretty(&report)?;
                println!("{json}");
                if let Some(out) = out {
                    std::fs::write(out, json)?;
                }
                Ok(())
            }
        },
        Command::Aggregate { dirs, out } => {
            let runs = aggregate::discover_runs(&dirs)?;
            let outcome = aggregate::aggregate(&runs)?;
            std::fs::create_dir_all(&out)?;
            aggregate::write_outputs(&runs, &outcome, &out)?;
            println!(
                "aggregated {} runs over {} scenarios -> {}",
                outcome.rows.len(),
                outcome.truths.len(),
                out.display()
            );
            Ok(())
        }
        Command::Report { command } => match command {
            ReportCommand::Operational { run_dir, out } => {
                let n = operational::operational_report(&run_dir, &out)?;
                println!("wrote operational series for {n} solutions -> {}", out.display());
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
