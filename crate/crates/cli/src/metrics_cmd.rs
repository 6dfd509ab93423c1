//! `metrics compute`: quality indicators for a front CSV, optionally
//! against a reference front.

use std::path::Path;

use serde::Serialize;

use echelon_core::pareto::{self, das_dennis, NormalisationBounds};

use crate::csvio;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct MetricsReport {
    pub hypervolume: f64,
    pub eum: Option<f64>,
    pub sparsity: Option<f64>,
    pub gd: Option<f64>,
    pub igd: Option<f64>,
    pub ahd: Option<f64>,
    pub n_points: usize,
}

/// Parses `a,b,c` into a point.
pub fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("cannot parse point '{text}': {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "expected 3 comma-separated values, got '{text}'"
        )));
    }
    Ok(parts)
}

/// Parses `lo,hi;lo,hi;lo,hi` into bounds.
pub fn parse_bounds(text: &str) -> Result<NormalisationBounds, CliError> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for pair in text.split(';') {
        let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(CliError::Usage(format!("bad bounds segment '{pair}'")));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad bound '{s}': {e}")))
        };
        lower.push(parse(parts[0])?);
        upper.push(parse(parts[1])?);
    }
    NormalisationBounds::new(lower, upper).map_err(|e| CliError::Usage(e.to_string()))
}

/// Computes the indicator set for a front file. Normalisation bounds
/// default to the widened envelope of front and reference points.
pub fn compute(
    front_path: &Path,
    truth_path: Option<&Path>,
    reference: &[f64],
    bounds: Option<NormalisationBounds>,
    weight_partitions: usize,
) -> Result<MetricsReport, CliError> {
    let (front, _) = csvio::read_front(front_path)?;
    let truth = match truth_path {
        Some(path) => Some(csvio::read_front(path)?.0),
        None => None,
    };

    let bounds = match bounds {
        Some(b) => Some(b),
        None => {
            let mut all = front.clone();
            if let Some(t) = &truth {
                all.extend(t.iter().cloned());
            }
            NormalisationBounds::from_points(&all).ok()
        }
    };

    let hypervolume = pareto::hypervolume(&front, reference);
    let weights = das_dennis(3, weight_partitions.max(1));
    let eum = bounds
        .as_ref()
        .and_then(|b| pareto::eum(&front, &weights, b).ok());
    let sparsity = bounds.as_ref().and_then(|b| pareto::sparsity(&front, b));
    let (gd, igd, ahd) = match (&truth, &bounds) {
        (Some(truth), Some(bounds)) if !truth.is_empty() && !front.is_empty() => {
            let gd = pareto::generational_distance(&front, truth, bounds, 2.0).ok();
            let igd = pareto::generational_distance(truth, &front, bounds, 2.0).ok();
            let ahd = pareto::ahd(&front, truth, bounds, 2.0).ok();
            (gd, igd, ahd)
        }
        _ => (None, None, None),
    };

    Ok(MetricsReport {
        hypervolume,
        eum,
        sparsity,
        gd,
        igd,
        ahd,
        n_points: front.len(),
    })
}
