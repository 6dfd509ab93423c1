//! Cross-run aggregation: merges every discovered run's front into a
//! best-known front per scenario, recomputes the indicator set of each
//! run against it, and emits `report.csv`, the merged fronts and
//! plot-ready history copies.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use echelon_core::pareto::{self, das_dennis, Front, NormalisationBounds};

use crate::csvio;
use crate::error::CliError;
use crate::manifest::RunSummary;

#[derive(Debug)]
pub struct DiscoveredRun {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub front: Vec<Vec<f64>>,
}

/// Recursively finds run directories (anything holding `summary.json`).
pub fn discover_runs(roots: &[PathBuf]) -> Result<Vec<DiscoveredRun>, CliError> {
    let mut runs = Vec::new();
    for root in roots {
        walk(root, &mut runs)?;
    }
    runs.sort_by(|a, b| a.dir.cmp(&b.dir));
    Ok(runs)
}

fn walk(dir: &Path, runs: &mut Vec<DiscoveredRun>) -> Result<(), CliError> {
    let summary_path = dir.join("summary.json");
    if summary_path.is_file() {
        let text = std::fs::read_to_string(&summary_path)?;
        let summary: RunSummary = serde_json::from_str(&text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", summary_path.display())))?;
        let (front, _) = csvio::read_front(&dir.join("front.csv"))?;
        runs.push(DiscoveredRun {
            dir: dir.to_path_buf(),
            summary,
            front,
        });
        return Ok(());
    }
    if dir.is_dir() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        entries.sort();
        for entry in entries {
            walk(&entry, runs)?;
        }
    }
    Ok(())
}

/// One `report.csv` row.
#[derive(Debug)]
pub struct ReportRow {
    pub run: String,
    pub algorithm: String,
    pub scenario: String,
    pub seed: u64,
    pub hv: f64,
    pub eum: Option<f64>,
    pub sparsity: Option<f64>,
    pub gd: Option<f64>,
    pub igd: Option<f64>,
    pub ahd: Option<f64>,
    pub n_points: usize,
}

pub struct AggregateOutcome {
    pub rows: Vec<ReportRow>,
    /// Best-known front per scenario.
    pub truths: BTreeMap<String, Front>,
}

/// Builds the cross-run report. Runs group by scenario; indicators
/// normalise on the widened envelope of every point in the group.
pub fn aggregate(runs: &[DiscoveredRun]) -> Result<AggregateOutcome, CliError> {
    if runs.is_empty() {
        return Err(CliError::Validation(
            "no runs found (directories holding summary.json)".into(),
        ));
    }
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, run) in runs.iter().enumerate() {
        groups
            .entry(run.summary.scenario.clone())
            .or_default()
            .push(i);
    }

    let mut rows = Vec::new();
    let mut truths = BTreeMap::new();
    for (scenario, members) in &groups {
        let fronts: Vec<Front> = members
            .iter()
            .map(|&i| pareto::pareto_filter(&runs[i].front))
            .collect();
        let truth = pareto::estimate_true_front(&fronts);
        let all_points: Vec<Vec<f64>> = members
            .iter()
            .flat_map(|&i| runs[i].front.iter().cloned())
            .collect();
        let bounds = NormalisationBounds::from_points(&all_points).ok();
        let weights = das_dennis(3, 12);

        for &i in members {
            let run = &runs[i];
            let reference = run.summary.reference_point;
            let hv = pareto::hypervolume(&run.front, &reference);
            let eum = bounds
                .as_ref()
                .and_then(|b| pareto::eum(&run.front, &weights, b).ok());
            let sparsity = bounds.as_ref().and_then(|b| pareto::sparsity(&run.front, b));
            let (gd, igd, ahd) = match &bounds {
                Some(b) if !truth.is_empty() && !run.front.is_empty() => (
                    pareto::generational_distance(&run.front, &truth.points, b, 2.0).ok(),
                    pareto::generational_distance(&truth.points, &run.front, b, 2.0).ok(),
                    pareto::ahd(&run.front, &truth.points, b, 2.0).ok(),
                ),
                _ => (None, None, None),
            };
            rows.push(ReportRow {
                run: run.dir.display().to_string(),
                algorithm: run.summary.algorithm.clone(),
                scenario: scenario.clone(),
                seed: run.summary.seed,
                hv,
                eum,
                sparsity,
                gd,
                igd,
                ahd,
                n_points: run.front.len(),
            });
        }
        truths.insert(scenario.clone(), truth);
    }
    Ok(AggregateOutcome { rows, truths })
}

/// Writes `report.csv`, `truth_<scenario>.csv` and `plotdata/` under
/// `out_dir`.
pub fn write_outputs(
    runs: &[DiscoveredRun],
    outcome: &AggregateOutcome,
    out_dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir.join("plotdata"))?;
    let mut w = csv::Writer::from_path(out_dir.join("report.csv"))?;
    w.write_record([
        "run", "algorithm", "scenario", "seed", "hv", "eum", "sparsity", "gd", "igd", "ahd",
        "n_points",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    for row in &outcome.rows {
        w.write_record([
            row.run.clone(),
            row.algorithm.clone(),
            row.scenario.clone(),
            row.seed.to_string(),
            format!("{}", row.hv),
            opt(row.eum),
            opt(row.sparsity),
            opt(row.gd),
            opt(row.igd),
            opt(row.ahd),
            row.n_points.to_string(),
        ])?;
    }
    w.flush()?;

    for (scenario, truth) in &outcome.truths {
        csvio::write_front(&out_dir.join(format!("truth_{scenario}.csv")), truth)?;
    }

    // Indicator-vs-budget series: one history copy per run.
    for run in runs {
        let history = run.dir.join("history.csv");
        if history.is_file() {
            let name = format!(
                "{}_{}_seed{}.csv",
                run.summary.algorithm, run.summary.scenario, run.summary.seed
            );
            std::fs::copy(&history, out_dir.join("plotdata").join(name))?;
        }
    }
    Ok(())
}
