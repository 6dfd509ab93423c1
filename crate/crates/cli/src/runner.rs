//! Experiment execution: runs each (algorithm, seed) pair of a
//! manifest, persisting `front.csv`, `history.csv`, per-solution
//! episode logs, policy snapshots, a manifest echo and a machine
//! readable `summary.json` per run. Runs execute in parallel up to the
//! manifest's job bound; every run writes only its own directory, so
//! parallelism never changes any file's content.

use std::path::{Path, PathBuf};
use std::time::Instant;

use echelon_core::demand::{sample_trace, DemandTrace};
use echelon_core::env::Simulator;
use echelon_core::horizon::DecisionVector;
use echelon_core::nsga2::{self, Nsga2Config};
use echelon_core::pareto::{self, das_dennis, Front, NormalisationBounds};
use echelon_core::policy::{
    self, PolicyNet, SearchConfig,
};
use echelon_core::scenario::ScenarioConfig;
use echelon_core::seeding::{self, DOMAIN_LOGGING, DOMAIN_NSGA_TRACE};

use crate::csvio;
use crate::error::CliError;
use crate::manifest::{Algorithm, ExperimentManifest, RunRecord, RunSummary};
use crate::snapshots;

/// Runs every seed of the manifest. Existing run directories abort the
/// experiment unless `force` is set.
pub fn run_experiment(manifest: &ExperimentManifest) -> Result<Vec<RunRecord>, CliError> {
    manifest.validate()?;
    let cfg = crate::manifest::resolve_scenario(&manifest.scenario)?;
    let hash = manifest.hash();

    // Collision check up front so nothing is half-written.
    let mut run_dirs = Vec::new();
    for &seed in &manifest.seeds {
        let dir = manifest
            .out_dir
            .join(format!("{}-seed{}", manifest.algorithm.name(), seed));
        if dir.exists() && !manifest.force {
            return Err(CliError::Runtime(format!(
                "output {} already exists; pass --force to overwrite",
                dir.display()
            )));
        }
        run_dirs.push(dir);
    }

    let jobs = manifest.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(CliError::runtime)?;
    let results: Vec<Result<RunRecord, CliError>> = pool.install(|| {
        use rayon::prelude::*;
        manifest
            .seeds
            .par_iter()
            .zip(run_dirs.par_iter())
            .map(|(&seed, dir)| run_one(manifest, &cfg, seed, dir, &hash))
            .collect()
    });
    results.into_iter().collect()
}

fn run_one(
    manifest: &ExperimentManifest,
    cfg: &ScenarioConfig,
    seed: u64,
    dir: &Path,
    hash: &str,
) -> Result<RunRecord, CliError> {
    if dir.exists() {
        std::fs::remove_dir_all(dir)?;
    }
    std::fs::create_dir_all(dir.join("logs"))?;
    std::fs::write(dir.join("manifest-echo.toml"), manifest.echo())?;

    let started = Instant::now();
    let outcome = match manifest.algorithm {
        Algorithm::Nsga2 => run_nsga2(manifest, cfg, seed, dir)?,
        Algorithm::Scalarised => run_scalarised(manifest, cfg, seed, dir)?,
        Algorithm::Morld => run_morld(manifest, cfg, seed, dir)?,
    };
    let wall_time_s = started.elapsed().as_secs_f64();

    let front_path = dir.join("front.csv");
    csvio::write_front(&front_path, &outcome.front)?;

    let reference = cfg.reference_point.as_array();
    let hypervolume = pareto::hypervolume(&outcome.front.points, &reference);
    let sparsity = outcome
        .metric_bounds
        .as_ref()
        .and_then(|b| pareto::sparsity(&outcome.front.points, b));
    let eum = outcome.metric_bounds.as_ref().and_then(|b| {
        pareto::eum(&outcome.front.points, &das_dennis(3, 12), b).ok()
    });

    let summary = RunSummary {
        algorithm: manifest.algorithm.name().to_string(),
        scenario: cfg.name.clone(),
        seed,
        manifest_hash: hash.to_string(),
        wall_time_s,
        n_front_points: outcome.front.len(),
        hypervolume,
        eum,
        sparsity,
        reference_point: reference,
        budget: manifest.params.clone(),
    };
    let summary_path = dir.join("summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;

    Ok(RunRecord {
        manifest_hash: hash.to_string(),
        algorithm: manifest.algorithm,
        scenario: cfg.name.clone(),
        seed,
        wall_time_s,
        run_dir: dir.to_path_buf(),
        front_path,
        history_path: dir.join("history.csv"),
        summary_path,
        log_paths: outcome.log_paths,
    })
}

struct AlgoOutcome {
    front: Front,
    /// Bounds for normalised indicators, when the algorithm derived
    /// them (policy searches); the genetic run reports none.
    metric_bounds: Option<NormalisationBounds>,
    log_paths: Vec<PathBuf>,
}

fn search_config(manifest: &ExperimentManifest, seed: u64) -> SearchConfig {
    let p = &manifest.params;
    let mut search = SearchConfig {
        seed,
        ..SearchConfig::default()
    };
    if let Some(es_population) = p.es_population {
        search.es_population = es_population.max(1);
    }
    if let Some(budget) = p.budget {
        search.iterations = budget.div_ceil(search.es_population);
    }
    if let Some(eval_episodes) = p.eval_episodes {
        search.eval_episodes = eval_episodes.max(1);
    }
    if let Some(exchange_interval) = p.exchange_interval {
        search.exchange_interval = exchange_interval.max(1);
    }
    if let Some(population) = p.population {
        search.population_size = population.max(1);
    }
    search.psa_enabled = p.psa.unwrap_or(false);
    search.shared_pool_enabled = p.shared_pool.unwrap_or(false);
    search
}

/// Replays one decision vector on the primary trace and logs it.
fn log_decision_vector(
    dir: &Path,
    cfg: &ScenarioConfig,
    trace: &DemandTrace,
    dv: &DecisionVector,
    id: usize,
) -> Result<PathBuf, CliError> {
    let sim = Simulator::new(cfg, trace).map_err(CliError::runtime)?;
    let dim = cfg.action_dim();
    let mut source = |_: &[f64], t: u32| {
        echelon_core::env::ActionVector::from_flat(cfg, &dv.genes[t as usize * dim..(t as usize + 1) * dim])
    };
    let rollout = sim.rollout(&mut source, 1.0).map_err(CliError::runtime)?;
    let path = dir.join("logs").join(format!("sol-{id}.csv"));
    csvio::write_episode_log(&path, cfg, &rollout.log)?;
    Ok(path)
}

/// Replays one policy on a logging trace and logs the episode.
fn log_policy(
    dir: &Path,
    cfg: &ScenarioConfig,
    net: &PolicyNet,
    seed: u64,
    id: usize,
) -> Result<PathBuf, CliError> {
    let trace = sample_trace(cfg, seeding::derive_seed(seed, DOMAIN_LOGGING, 0));
    let sim = Simulator::new(cfg, &trace).map_err(CliError::runtime)?;
    let mut source = |obs: &[f64], _t: u32| policy::act(net, obs, cfg);
    let rollout = sim.rollout(&mut source, 1.0).map_err(CliError::runtime)?;
    let path = dir.join("logs").join(format!("sol-{id}.csv"));
    csvio::write_episode_log(&path, cfg, &rollout.log)?;
    Ok(path)
}

fn run_nsga2(
    manifest: &ExperimentManifest,
    cfg: &ScenarioConfig,
    seed: u64,
    dir: &Path,
) -> Result<AlgoOutcome, CliError> {
    let p = &manifest.params;
    let nsga = Nsga2Config {
        population_size: p.population.unwrap_or(300).max(4),
        offspring_per_generation: p.offspring.unwrap_or(30).max(1),
        generations: p.generations.unwrap_or(200),
        seed,
        ..Nsga2Config::default()
    };
    let replicates = p.replicates.unwrap_or(1).max(1);
    let traces: Vec<DemandTrace> = (0..replicates)
        .map(|r| sample_trace(cfg, seeding::derive_seed(seed, DOMAIN_NSGA_TRACE, r as u64)))
        .collect();
    let outcome = nsga2::run(cfg, &nsga, &traces).map_err(CliError::runtime)?;

    let header = [
        "generation",
        "evaluations",
        "archive_hypervolume",
        "archive_sparsity",
        "archive_size",
        "best_violation",
        "feasible_in_population",
    ];
    let rows: Vec<Vec<Option<f64>>> = outcome
        .history
        .iter()
        .map(|s| {
            vec![
                Some(s.generation as f64),
                Some(s.evaluations as f64),
                Some(s.archive_hypervolume),
                s.archive_sparsity,
                Some(s.archive_size as f64),
                Some(s.best_violation),
                Some(s.feasible_in_population as f64),
            ]
        })
        .collect();
    csvio::write_history(&dir.join("history.csv"), &header, &rows)?;

    let mut log_paths = Vec::new();
    for (id, dv) in outcome.front_solutions.iter().enumerate() {
        log_paths.push(log_decision_vector(dir, cfg, &traces[0], dv, id)?);
    }
    // Re-key provenance onto stable per-run solution ids.
    let front = Front {
        points: outcome.front.points,
        provenance: (0..outcome.front_solutions.len()).collect(),
    };
    Ok(AlgoOutcome {
        front,
        metric_bounds: None,
        log_paths,
    })
}

fn run_scalarised(
    manifest: &ExperimentManifest,
    cfg: &ScenarioConfig,
    seed: u64,
    dir: &Path,
) -> Result<AlgoOutcome, CliError> {
    let search = search_config(manifest, seed);
    let weights = manifest
        .params
        .weight_partitions
        .map(|h| das_dennis(3, h.max(1)));
    let outcome = policy::run_scalarised_baseline(cfg, &search, weights);

    let header = [
        "weight_index",
        "w_profit",
        "w_neg_emission",
        "w_neg_sl_inequality",
        "iterations",
        "fitness",
        "profit",
        "neg_emission",
        "neg_sl_inequality",
    ];
    let rows: Vec<Vec<Option<f64>>> = outcome
        .per_weight
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                Some(i as f64),
                Some(r.weight.0[0]),
                Some(r.weight.0[1]),
                Some(r.weight.0[2]),
                Some(search.iterations as f64),
                Some(r.fitness),
                Some(r.raw.profit),
                Some(r.raw.neg_emission),
                Some(r.raw.neg_sl_inequality),
            ]
        })
        .collect();
    csvio::write_history(&dir.join("history.csv"), &header, &rows)?;

    let policies_dir = dir.join("policies");
    std::fs::create_dir_all(&policies_dir)?;
    let mut log_paths = Vec::new();
    for (id, &weight_index) in outcome.front.provenance.iter().enumerate() {
        let result = &outcome.per_weight[weight_index];
        snapshots::write_policy(&policies_dir.join(format!("sol-{id}.bin")), &result.policy)?;
        log_paths.push(log_policy(dir, cfg, &result.policy, seed, id)?);
    }
    let front = Front {
        points: outcome.front.points,
        provenance: (0..log_paths.len()).collect(),
    };
    Ok(AlgoOutcome {
        front,
        metric_bounds: Some(outcome.bounds),
        log_paths,
    })
}

fn run_morld(
    manifest: &ExperimentManifest,
    cfg: &ScenarioConfig,
    seed: u64,
    dir: &Path,
) -> Result<AlgoOutcome, CliError> {
    let search = search_config(manifest, seed);
    let outcome = policy::run_morld(cfg, &search);

    let header = [
        "round",
        "iterations",
        "archive_hypervolume",
        "archive_eum",
        "archive_sparsity",
        "archive_size",
    ];
    let rows: Vec<Vec<Option<f64>>> = outcome
        .history
        .iter()
        .map(|s| {
            vec![
                Some(s.round as f64),
                Some(s.iterations_done as f64),
                Some(s.archive_hypervolume),
                s.archive_eum,
                s.archive_sparsity,
                Some(s.archive_size as f64),
            ]
        })
        .collect();
    csvio::write_history(&dir.join("history.csv"), &header, &rows)?;

    // The archive is the front; handles carry the policy parameters.
    let policies_dir = dir.join("policies");
    std::fs::create_dir_all(&policies_dir)?;
    let arch_template = PolicyNet::zeroed(
        policy::observation_dim(cfg),
        search.hidden.clone(),
        cfg.action_dim(),
    );
    let mut log_paths = Vec::new();
    let mut points = Vec::new();
    for (id, (point, params)) in outcome
        .archive
        .points()
        .iter()
        .zip(outcome.archive.handles())
        .enumerate()
    {
        let net = arch_template.with_params(params.clone());
        snapshots::write_policy(&policies_dir.join(format!("sol-{id}.bin")), &net)?;
        log_paths.push(log_policy(dir, cfg, &net, seed, id)?);
        points.push(point.clone());
    }
    // archive.csv mirrors front.csv for the cumulative archive.
    let archive_front = Front {
        provenance: (0..points.len()).collect(),
        points,
    };
    csvio::write_front(&dir.join("archive.csv"), &archive_front)?;
    Ok(AlgoOutcome {
        front: archive_front,
        metric_bounds: Some(outcome.bounds),
        log_paths,
    })
}
