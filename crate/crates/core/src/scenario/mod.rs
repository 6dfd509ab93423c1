//! Static description of a supply-chain network.
//!
//! A [`ScenarioConfig`] names the echelon sets, the per-node and
//! per-route parameters, the market demand specifications, prices, and
//! the simulation constants (horizon, lead time, transport capacity,
//! penalty coefficient, hypervolume reference point). Configs are
//! immutable after construction and safe to share across threads.

mod builtin;
mod file;
mod validate;

pub use builtin::{builtin_scenario, BuiltinScenario};
pub use file::{load_scenario, load_scenario_str, save_scenario, save_scenario_to, ScenarioError};
pub use validate::{validate_scenario, ValidationReport, Violation};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::objective::ObjectiveVector;

/// Identifier of a network node. Builtin scenarios number nodes from 1
/// upstream to downstream.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The echelon sets of a network, upstream to downstream. Warehouses
/// and distribution centres are optional; retailers pair positionally
/// with markets (retailer `k` serves market `k`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EchelonSets {
    pub suppliers: Vec<NodeId>,
    pub manufacturers: Vec<NodeId>,
    /// Mid-level warehouse echelons, possibly several, possibly none.
    pub warehouses_by_level: Vec<Vec<NodeId>>,
    pub distribution_centres: Vec<NodeId>,
    pub retailers: Vec<NodeId>,
    pub markets: Vec<NodeId>,
}

impl EchelonSets {
    /// Echelon levels that dispatch shipments, upstream to downstream:
    /// suppliers, manufacturers, each warehouse level, then the
    /// distribution centres when declared. Retailers receive but do not
    /// dispatch; markets are not shipping nodes at all.
    pub fn shipping_levels(&self) -> Vec<&[NodeId]> {
        let mut levels: Vec<&[NodeId]> = vec![&self.suppliers, &self.manufacturers];
        for level in &self.warehouses_by_level {
            levels.push(level);
        }
        if !self.distribution_centres.is_empty() {
            levels.push(&self.distribution_centres);
        }
        levels
    }

    /// All echelon levels that hold inventory, i.e. every shipment
    /// destination: manufacturers, warehouses, distribution centres,
    /// retailers, in that order.
    pub fn destination_levels(&self) -> Vec<&[NodeId]> {
        let mut levels: Vec<&[NodeId]> = vec![&self.manufacturers];
        for level in &self.warehouses_by_level {
            levels.push(level);
        }
        if !self.distribution_centres.is_empty() {
            levels.push(&self.distribution_centres);
        }
        levels.push(&self.retailers);
        levels
    }

    /// Destination nodes flattened in echelon order.
    pub fn destination_nodes(&self) -> Vec<NodeId> {
        self.destination_levels().concat()
    }

    pub fn all_nodes(&self) -> Vec<NodeId> {
        let mut nodes = vec![];
        nodes.extend_from_slice(&self.suppliers);
        nodes.extend(self.destination_nodes());
        nodes.extend_from_slice(&self.markets);
        nodes
    }
}

/// Per-node parameters. The production fields are present exactly for
/// manufacturers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    /// Opening inventory in units.
    pub initial_inventory: f64,
    /// Holding cost per unit per period.
    pub holding_cost: f64,
    /// Emission per held unit per period.
    pub holding_emission: f64,
    /// Manufacturing cost per unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub production_cost: Option<f64>,
    /// Manufacturing yield ratio in (0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yield_ratio: Option<f64>,
    /// Emission per manufactured unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub production_emission: Option<f64>,
}

impl NodeParams {
    pub fn storage(initial_inventory: f64, holding_cost: f64, holding_emission: f64) -> Self {
        Self {
            initial_inventory,
            holding_cost,
            holding_emission,
            production_cost: None,
            yield_ratio: None,
            production_emission: None,
        }
    }

    pub fn manufacturing(
        initial_inventory: f64,
        holding_cost: f64,
        holding_emission: f64,
        production_cost: f64,
        yield_ratio: f64,
        production_emission: f64,
    ) -> Self {
        Self {
            initial_inventory,
            holding_cost,
            holding_emission,
            production_cost: Some(production_cost),
            yield_ratio: Some(yield_ratio),
            production_emission: Some(production_emission),
        }
    }

    pub fn has_production(&self) -> bool {
        self.production_cost.is_some()
            || self.yield_ratio.is_some()
            || self.production_emission.is_some()
    }
}

/// One directed transport route between adjacent echelons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteParams {
    pub from: NodeId,
    pub to: NodeId,
    /// Cost per unit per day in transit.
    pub transport_cost: f64,
    /// Emission per unit per day in transit.
    pub transport_emission: f64,
}

/// Base demand distribution of one market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DemandKind {
    Normal { mean: f64, std_dev: f64 },
    Poisson { rate: f64 },
}

impl DemandKind {
    /// Mean of the base distribution before seasonal modulation.
    pub fn mean(&self) -> f64 {
        match self {
            DemandKind::Normal { mean, .. } => *mean,
            DemandKind::Poisson { rate } => *rate,
        }
    }
}

/// Market demand: a base distribution modulated by a sinusoidal
/// seasonal factor `1 + a * sin(2*pi*t / P)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSpec {
    pub kind: DemandKind,
    pub seasonal_amplitude: f64,
    pub seasonal_period: f64,
}

impl DemandSpec {
    pub fn seasonal_factor(&self, t: u32) -> f64 {
        1.0 + self.seasonal_amplitude
            * (2.0 * std::f64::consts::PI * t as f64 / self.seasonal_period).sin()
    }
}

/// A complete static scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub echelons: EchelonSets,
    /// Parameters for every destination node.
    pub nodes: BTreeMap<NodeId, NodeParams>,
    /// Fully-connected adjacent-echelon routes, upstream echelon first.
    pub routes: Vec<RouteParams>,
    pub demands: BTreeMap<NodeId, DemandSpec>,
    /// Selling price per unit at each retailer.
    pub prices: BTreeMap<NodeId, f64>,
    /// Number of periods simulated per episode.
    pub horizon: u32,
    /// Periods between dispatch and arrival of a shipment.
    pub lead_time: u32,
    /// Per-route shipment cap per period.
    pub capacity: f64,
    /// Penalty coefficient applied to negative inventory.
    pub big_m: f64,
    /// Hypervolume reference point in raw objective units.
    pub reference_point: ObjectiveVector,
}

impl ScenarioConfig {
    /// Per-period action dimensionality: one manufacturing quantity per
    /// manufacturer plus one shipment quantity per route.
    pub fn action_dim(&self) -> usize {
        self.echelons.manufacturers.len() + self.routes.len()
    }

    /// Whole-horizon decision-vector dimensionality.
    pub fn decision_dim(&self) -> usize {
        self.horizon as usize * self.action_dim()
    }

    /// Upper bound used for manufacturing genes and policy outputs: the
    /// largest per-period production any manufacturer can execute, i.e.
    /// all supplier routes into it at full capacity.
    pub fn manufacturing_upper(&self) -> f64 {
        self.echelons.suppliers.len() as f64 * self.capacity
    }

    pub fn market_index(&self, market: NodeId) -> Option<usize> {
        self.echelons.markets.iter().position(|&m| m == market)
    }
}
