//! Experiment manifests and run records.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use echelon_core::scenario::{
    builtin_scenario, load_scenario, BuiltinScenario, ScenarioConfig,
};

use crate::error::CliError;

/// Solver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nsga2,
    Scalarised,
    Morld,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Scalarised => "scalarised",
            Algorithm::Morld => "morld",
        }
    }
}

/// Algorithm knobs carried by the manifest; unset fields fall back to
/// the solver defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct AlgoParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offspring: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    /// Candidate evaluations per weight or subproblem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub es_population: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_episodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exchange_interval: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_partitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psa: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_pool: Option<bool>,
}

/// Everything one `run` invocation is going to execute.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentManifest {
    /// Builtin name (`simple`, `moderate`, `complex`) or a file path.
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub force: bool,
    pub jobs: usize,
    pub params: AlgoParams,
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::Validation("seeds must be non-empty".into()));
        }
        if self.jobs == 0 {
            return Err(CliError::Validation("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Canonical TOML echo of the manifest, used for hashing and the
    /// per-run `manifest-echo.toml`.
    pub fn echo(&self) -> String {
        toml::to_string_pretty(self).expect("manifest serialises")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.echo().as_bytes());
        format!("{digest:x}")
    }
}

/// Resolves a scenario argument: a builtin name or a scenario file.
pub fn resolve_scenario(name_or_path: &str) -> Result<ScenarioConfig, CliError> {
    if let Some(builtin) = BuiltinScenario::parse(name_or_path) {
        return Ok(builtin_scenario(builtin));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "'{name_or_path}' is neither a builtin scenario (simple|moderate|complex) nor an existing file"
        )));
    }
    load_scenario(path).map_err(|e| match e {
        echelon_core::scenario::ScenarioError::Validation(report) => {
            CliError::Validation(format!("{name_or_path}:\n{report}"))
        }
        other => CliError::Runtime(other.to_string()),
    })
}

/// Where one run's artefacts land and how they hang together.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub manifest_hash: String,
    pub algorithm: Algorithm,
    pub scenario: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub run_dir: PathBuf,
    pub front_path: PathBuf,
    pub history_path: PathBuf,
    pub summary_path: PathBuf,
    pub log_paths: Vec<PathBuf>,
}

/// Per-run machine-readable summary persisted as `summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub scenario: String,
    pub seed: u64,
    pub manifest_hash: String,
    pub wall_time_s: f64,
    pub n_front_points: usize,
    pub hypervolume: f64,
    pub eum: Option<f64>,
    pub sparsity: Option<f64>,
    pub reference_point: [f64; 3],
    pub budget: AlgoParams,
}
