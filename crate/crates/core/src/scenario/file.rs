//! Scenario file format.
//!
//! Scenarios are stored as TOML with the sections `[echelons]`,
//! `[[node]]`, `[[route]]`, `[[demand]]`, `[economics]` and
//! `[simulation]`. Units: inventories and quantities in product units,
//! costs in currency per unit (per day for transport), emissions in
//! emission units per unit (per day for transport). Saving and
//! re-loading a config is a fixed point of the serialisation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    validate_scenario, DemandKind, DemandSpec, EchelonSets, NodeId, NodeParams, RouteParams,
    ScenarioConfig, ValidationReport,
};
use crate::objective::ObjectiveVector;

#[derive(Debug)]
pub enum ScenarioError {
    Io { path: String, source: std::io::Error },
    Parse { message: String },
    Validation(ValidationReport),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io { path, source } => {
                write!(f, "failed to read scenario file '{path}': {source}")
            }
            ScenarioError::Parse { message } => write!(f, "failed to parse scenario: {message}"),
            ScenarioError::Validation(report) => {
                write!(f, "scenario validation failed:\n{report}")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    name: String,
    echelons: EchelonsSection,
    #[serde(rename = "node", default)]
    nodes: Vec<NodeEntry>,
    #[serde(rename = "route", default)]
    routes: Vec<RouteEntry>,
    #[serde(rename = "demand", default)]
    demands: Vec<DemandEntry>,
    economics: EconomicsSection,
    simulation: SimulationSection,
}

#[derive(Debug, Serialize, Deserialize)]
struct EchelonsSection {
    suppliers: Vec<u32>,
    manufacturers: Vec<u32>,
    #[serde(default)]
    warehouses: Vec<Vec<u32>>,
    #[serde(default)]
    distribution_centres: Vec<u32>,
    retailers: Vec<u32>,
    markets: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeEntry {
    id: u32,
    initial_inventory: f64,
    holding_cost: f64,
    holding_emission: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    production_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yield_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    production_emission: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RouteEntry {
    from: u32,
    to: u32,
    transport_cost: f64,
    transport_emission: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DemandEntry {
    market: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    std_dev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    seasonal_amplitude: f64,
    seasonal_period: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EconomicsSection {
    big_m: f64,
    prices: Vec<PriceEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PriceEntry {
    retailer: u32,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SimulationSection {
    horizon: i64,
    lead_time: i64,
    capacity: f64,
    reference_point: [f64; 3],
}

fn to_file(cfg: &ScenarioConfig) -> ScenarioFile {
    ScenarioFile {
        name: cfg.name.clone(),
        echelons: EchelonsSection {
            suppliers: cfg.echelons.suppliers.iter().map(|n| n.0).collect(),
            manufacturers: cfg.echelons.manufacturers.iter().map(|n| n.0).collect(),
            warehouses: cfg
                .echelons
                .warehouses_by_level
                .iter()
                .map(|level| level.iter().map(|n| n.0).collect())
                .collect(),
            distribution_centres: cfg
                .echelons
                .distribution_centres
                .iter()
                .map(|n| n.0)
                .collect(),
            retailers: cfg.echelons.retailers.iter().map(|n| n.0).collect(),
            markets: cfg.echelons.markets.iter().map(|n| n.0).collect(),
        },
        nodes: cfg
            .nodes
            .iter()
            .map(|(id, p)| NodeEntry {
                id: id.0,
                initial_inventory: p.initial_inventory,
                holding_cost: p.holding_cost,
                holding_emission: p.holding_emission,
                production_cost: p.production_cost,
                yield_ratio: p.yield_ratio,
                production_emission: p.production_emission,
            })
            .collect(),
        routes: cfg
            .routes
            .iter()
            .map(|r| RouteEntry {
                from: r.from.0,
                to: r.to.0,
                transport_cost: r.transport_cost,
                transport_emission: r.transport_emission,
            })
            .collect(),
        demands: cfg
            .demands
            .iter()
            .map(|(market, spec)| {
                let (kind, mean, std_dev, rate) = match spec.kind {
                    DemandKind::Normal { mean, std_dev } => {
                        ("normal", Some(mean), Some(std_dev), None)
                    }
                    DemandKind::Poisson { rate } => ("poisson", None, None, Some(rate)),
                };
                DemandEntry {
                    market: market.0,
                    kind: kind.into(),
                    mean,
                    std_dev,
                    rate,
                    seasonal_amplitude: spec.seasonal_amplitude,
                    seasonal_period: spec.seasonal_period,
                }
            })
            .collect(),
        economics: EconomicsSection {
            big_m: cfg.big_m,
            prices: cfg
                .prices
                .iter()
                .map(|(retailer, value)| PriceEntry {
                    retailer: retailer.0,
                    value: *value,
                })
                .collect(),
        },
        simulation: SimulationSection {
            horizon: cfg.horizon as i64,
            lead_time: cfg.lead_time as i64,
            capacity: cfg.capacity,
            reference_point: cfg.reference_point.as_array(),
        },
    }
}

fn from_file(file: ScenarioFile) -> Result<ScenarioConfig, ScenarioError> {
    let mut report = ValidationReport::default();

    let echelons = EchelonSets {
        suppliers: file.echelons.suppliers.into_iter().map(NodeId).collect(),
        manufacturers: file.echelons.manufacturers.into_iter().map(NodeId).collect(),
        warehouses_by_level: file
            .echelons
            .warehouses
            .into_iter()
            .map(|level| level.into_iter().map(NodeId).collect())
            .collect(),
        distribution_centres: file
            .echelons
            .distribution_centres
            .into_iter()
            .map(NodeId)
            .collect(),
        retailers: file.echelons.retailers.into_iter().map(NodeId).collect(),
        markets: file.echelons.markets.into_iter().map(NodeId).collect(),
    };

    let mut nodes = BTreeMap::new();
    for entry in file.nodes {
        let id = NodeId(entry.id);
        if nodes
            .insert(
                id,
                NodeParams {
                    initial_inventory: entry.initial_inventory,
                    holding_cost: entry.holding_cost,
                    holding_emission: entry.holding_emission,
                    production_cost: entry.production_cost,
                    yield_ratio: entry.yield_ratio,
                    production_emission: entry.production_emission,
                },
            )
            .is_some()
        {
            report.violations.push(super::Violation {
                path: format!("nodes.{id}"),
                message: "duplicate node entry".into(),
            });
        }
    }

    let routes = file
        .routes
        .into_iter()
        .map(|r| RouteParams {
            from: NodeId(r.from),
            to: NodeId(r.to),
            transport_cost: r.transport_cost,
            transport_emission: r.transport_emission,
        })
        .collect();

    let mut demands = BTreeMap::new();
    for entry in file.demands {
        let market = NodeId(entry.market);
        let kind = match entry.kind.as_str() {
            "normal" => match (entry.mean, entry.std_dev) {
                (Some(mean), Some(std_dev)) => Some(DemandKind::Normal { mean, std_dev }),
                _ => {
                    report.violations.push(super::Violation {
                        path: format!("demands.{market}"),
                        message: "normal demand requires mean and std_dev".into(),
                    });
                    None
                }
            },
            "poisson" => match entry.rate {
                Some(rate) => Some(DemandKind::Poisson { rate }),
                None => {
                    report.violations.push(super::Violation {
                        path: format!("demands.{market}"),
                        message: "poisson demand requires rate".into(),
                    });
                    None
                }
            },
            other => {
                report.violations.push(super::Violation {
                    path: format!("demands.{market}.kind"),
                    message: format!("unknown demand kind '{other}'"),
                });
                None
            }
        };
        if let Some(kind) = kind {
            demands.insert(
                market,
                DemandSpec {
                    kind,
                    seasonal_amplitude: entry.seasonal_amplitude,
                    seasonal_period: entry.seasonal_period,
                },
            );
        }
    }

    let prices = file
        .economics
        .prices
        .into_iter()
        .map(|p| (NodeId(p.retailer), p.value))
        .collect();

    if file.simulation.horizon < 0 {
        report.violations.push(super::Violation {
            path: "simulation.horizon".into(),
            message: format!("must be >= 1, got {}", file.simulation.horizon),
        });
    }
    if file.simulation.lead_time < 0 {
        report.violations.push(super::Violation {
            path: "simulation.lead_time".into(),
            message: format!("must be >= 1, got {}", file.simulation.lead_time),
        });
    }

    let cfg = ScenarioConfig {
        name: file.name,
        echelons,
        nodes,
        routes,
        demands,
        prices,
        horizon: file.simulation.horizon.max(0) as u32,
        lead_time: file.simulation.lead_time.max(0) as u32,
        capacity: file.simulation.capacity,
        big_m: file.economics.big_m,
        reference_point: ObjectiveVector::from_array(file.simulation.reference_point),
    };

    report.violations.extend(validate_scenario(&cfg).violations);
    if report.is_empty() {
        Ok(cfg)
    } else {
        Err(ScenarioError::Validation(report))
    }
}

/// Serialises a config to the scenario file text.
pub fn save_scenario(cfg: &ScenarioConfig) -> String {
    toml::to_string_pretty(&to_file(cfg)).expect("scenario serialisation cannot fail")
}

/// Writes the scenario file to `path`.
pub fn save_scenario_to(cfg: &ScenarioConfig, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, save_scenario(cfg)).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_scenario_str(&text)
}

/// Parses and validates scenario file text.
pub fn load_scenario_str(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
        message: e.to_string(),
    })?;
    from_file(file)
}
