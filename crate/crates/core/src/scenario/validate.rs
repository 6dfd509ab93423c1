//! Structural validation of scenario configs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{NodeId, ScenarioConfig};

/// One invariant breach, locating the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Result of [`validate_scenario`]; empty when every invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

// Negated comparisons double as NaN guards: a NaN fails every order
// test and must be reported.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_nonneg(report: &mut ValidationReport, path: String, value: f64) {
    if !(value >= 0.0) {
        report.push(path, format!("must be >= 0, got {value}"));
    }
}

/// Checks every scenario invariant and returns the full list of
/// breaches. An empty report means the config is well-formed.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the checks
pub fn validate_scenario(cfg: &ScenarioConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let ech = &cfg.echelons;

    // Echelon sets: required sets non-empty, declared ones non-empty,
    // node ids unique across the whole network.
    if ech.suppliers.is_empty() {
        report.push("echelons.suppliers", "must be non-empty");
    }
    if ech.manufacturers.is_empty() {
        report.push("echelons.manufacturers", "must be non-empty");
    }
    if ech.retailers.is_empty() {
        report.push("echelons.retailers", "must be non-empty");
    }
    if ech.markets.is_empty() {
        report.push("echelons.markets", "must be non-empty");
    }
    for (i, level) in ech.warehouses_by_level.iter().enumerate() {
        if level.is_empty() {
            report.push(
                format!("echelons.warehouses[{i}]"),
                "declared warehouse level must be non-empty",
            );
        }
    }
    if ech.retailers.len() != ech.markets.len() {
        report.push(
            "echelons.markets",
            format!(
                "retailers and markets must pair positionally: {} retailers vs {} markets",
                ech.retailers.len(),
                ech.markets.len()
            ),
        );
    }
    let mut seen = BTreeSet::new();
    for id in ech.all_nodes() {
        if !seen.insert(id) {
            report.push("echelons", format!("node id {id} appears in more than one set"));
        }
    }

    // Node parameters: cover exactly the destination nodes; production
    // fields present iff the node is a manufacturer.
    let destinations: BTreeSet<NodeId> = ech.destination_nodes().into_iter().collect();
    let manufacturers: BTreeSet<NodeId> = ech.manufacturers.iter().copied().collect();
    for id in &destinations {
        match cfg.nodes.get(id) {
            None => report.push(format!("nodes.{id}"), "missing parameters for destination node"),
            Some(params) => {
                check_nonneg(
                    &mut report,
                    format!("nodes.{id}.initial_inventory"),
                    params.initial_inventory,
                );
                check_nonneg(&mut report, format!("nodes.{id}.holding_cost"), params.holding_cost);
                check_nonneg(
                    &mut report,
                    format!("nodes.{id}.holding_emission"),
                    params.holding_emission,
                );
                let is_mfg = manufacturers.contains(id);
                if is_mfg {
                    match (params.production_cost, params.yield_ratio, params.production_emission) {
                        (Some(cost), Some(yield_ratio), Some(emission)) => {
                            check_nonneg(&mut report, format!("nodes.{id}.production_cost"), cost);
                            check_nonneg(
                                &mut report,
                                format!("nodes.{id}.production_emission"),
                                emission,
                            );
                            if !(yield_ratio > 0.0 && yield_ratio <= 1.0) {
                                report.push(
                                    format!("nodes.{id}.yield_ratio"),
                                    format!("must be in (0, 1], got {yield_ratio}"),
                                );
                            }
                        }
                        _ => report.push(
                            format!("nodes.{id}"),
                            "manufacturer must declare production_cost, yield_ratio and production_emission",
                        ),
                    }
                } else if params.has_production() {
                    report.push(
                        format!("nodes.{id}"),
                        "production fields are only allowed on manufacturers",
                    );
                }
            }
        }
    }
    for id in cfg.nodes.keys() {
        if !destinations.contains(id) {
            report.push(format!("nodes.{id}"), "not a destination node");
        }
    }

    // Routes: costs non-negative, endpoints on adjacent echelons, the
    // fully-connected topology present exactly once per pair.
    let mut level_of: BTreeMap<NodeId, usize> = BTreeMap::new();
    let shipping = ech.shipping_levels();
    for (level, nodes) in shipping.iter().enumerate() {
        for &id in *nodes {
            level_of.insert(id, level);
        }
    }
    let mut dest_level_of: BTreeMap<NodeId, usize> = BTreeMap::new();
    // Destination level k receives from shipping level k.
    for (level, nodes) in ech.destination_levels().iter().enumerate() {
        for &id in *nodes {
            dest_level_of.insert(id, level);
        }
    }

    let mut expected: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let dest_levels = ech.destination_levels();
    for (k, from_nodes) in shipping.iter().enumerate() {
        for &from in *from_nodes {
            for &to in dest_levels[k] {
                expected.insert((from, to));
            }
        }
    }

    let mut seen_routes: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for (i, route) in cfg.routes.iter().enumerate() {
        let key = (route.from, route.to);
        if !seen_routes.insert(key) {
            report.push(
                format!("routes[{i}]"),
                format!("duplicate route ({}, {})", route.from, route.to),
            );
        }
        check_nonneg(
            &mut report,
            format!("routes[{i}].transport_cost"),
            route.transport_cost,
        );
        check_nonneg(
            &mut report,
            format!("routes[{i}].transport_emission"),
            route.transport_emission,
        );
        match (level_of.get(&route.from), dest_level_of.get(&route.to)) {
            (Some(&from_level), Some(&to_level)) if from_level == to_level => {}
            (Some(_), Some(_)) => report.push(
                format!("routes[{i}]"),
                format!(
                    "route ({}, {}) does not connect adjacent echelons",
                    route.from, route.to
                ),
            ),
            _ => report.push(
                format!("routes[{i}]"),
                format!("route ({}, {}) references an unknown shipping or destination node", route.from, route.to),
            ),
        }
    }
    for (from, to) in &expected {
        if !seen_routes.contains(&(*from, *to)) {
            report.push(
                "routes",
                format!("missing route ({from}, {to}) required by the fully-connected topology"),
            );
        }
    }

    // Demands: exactly one spec per market, parameters in range.
    for market in &ech.markets {
        match cfg.demands.get(market) {
            None => report.push(format!("demands.{market}"), "missing demand spec for market"),
            Some(spec) => {
                match &spec.kind {
                    super::DemandKind::Normal { std_dev, .. } => {
                        check_nonneg(&mut report, format!("demands.{market}.std_dev"), *std_dev)
                    }
                    super::DemandKind::Poisson { rate } => {
                        check_nonneg(&mut report, format!("demands.{market}.rate"), *rate)
                    }
                }
                check_nonneg(
                    &mut report,
                    format!("demands.{market}.seasonal_amplitude"),
                    spec.seasonal_amplitude,
                );
                if !(spec.seasonal_period > 0.0) {
                    report.push(
                        format!("demands.{market}.seasonal_period"),
                        format!("must be > 0, got {}", spec.seasonal_period),
                    );
                }
            }
        }
    }
    for market in cfg.demands.keys() {
        if !ech.markets.contains(market) {
            report.push(format!("demands.{market}"), "not a market node");
        }
    }

    // Prices: exactly one per retailer.
    for retailer in &ech.retailers {
        match cfg.prices.get(retailer) {
            None => report.push(format!("prices.{retailer}"), "missing price for retailer"),
            Some(price) => check_nonneg(&mut report, format!("prices.{retailer}"), *price),
        }
    }
    for retailer in cfg.prices.keys() {
        if !ech.retailers.contains(retailer) {
            report.push(format!("prices.{retailer}"), "not a retailer node");
        }
    }

    // Simulation constants.
    if cfg.horizon < 1 {
        report.push("horizon", "must be >= 1");
    }
    if cfg.lead_time < 1 {
        report.push("lead_time", "must be >= 1");
    }
    if !(cfg.capacity > 0.0) {
        report.push("capacity", format!("must be > 0, got {}", cfg.capacity));
    }
    if !(cfg.big_m > 0.0) {
        report.push("big_m", format!("must be > 0, got {}", cfg.big_m));
    }
    if !cfg.reference_point.is_finite() {
        report.push("reference_point", "components must be finite");
    }

    report
}
