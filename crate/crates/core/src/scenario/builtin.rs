//! The three built-in networks.
//!
//! All three share the same simulation constants: 100 periods, a lead
//! time of 2, a per-route capacity of 200, sinusoidal seasonality with
//! amplitude 0.5 over one full cycle per horizon, and a penalty
//! coefficient of 1e6. Node parameter rows map positionally onto the
//! destination nodes in echelon order; route parameter rows follow the
//! fully-connected topology grouped by origin node.

use std::collections::BTreeMap;

use super::{
    DemandKind, DemandSpec, EchelonSets, NodeId, NodeParams, RouteParams, ScenarioConfig,
};
use crate::objective::ObjectiveVector;

/// Selects one of the built-in networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinScenario {
    /// 1 supplier, 2 manufacturers, 2 retailers/markets; 6 routes.
    Simple,
    /// 2 suppliers, 3 manufacturers, 2 warehouses, 3 retailers/markets;
    /// 18 routes.
    Moderate,
    /// 3 suppliers, 5 manufacturers, 3 warehouses, 3 distribution
    /// centres, 5 retailers/markets; 54 routes.
    Complex,
}

impl BuiltinScenario {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "simple" => Some(Self::Simple),
            "moderate" => Some(Self::Moderate),
            "complex" => Some(Self::Complex),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Simple => "simple",
            Self::Moderate => "moderate",
            Self::Complex => "complex",
        }
    }
}

const HORIZON: u32 = 100;
const LEAD_TIME: u32 = 2;
const CAPACITY: f64 = 200.0;
const BIG_M: f64 = 1e6;
const SEASONAL_AMPLITUDE: f64 = 0.5;

fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&n| NodeId(n)).collect()
}

/// Node rows: (initial inventory, holding cost, holding emission,
/// optionally (production cost, yield ratio, production emission)).
type NodeRow = (f64, f64, f64, Option<(f64, f64, f64)>);

fn node_map(order: &[NodeId], rows: &[NodeRow]) -> BTreeMap<NodeId, NodeParams> {
    assert_eq!(order.len(), rows.len(), "node rows must cover the destination nodes");
    order
        .iter()
        .zip(rows)
        .map(|(&id, &(inv, hc, he, prod))| {
            let params = match prod {
                Some((pc, yr, pe)) => NodeParams::manufacturing(inv, hc, he, pc, yr, pe),
                None => NodeParams::storage(inv, hc, he),
            };
            (id, params)
        })
        .collect()
}

fn routes(rows: &[(u32, u32, f64, f64)]) -> Vec<RouteParams> {
    rows.iter()
        .map(|&(from, to, cost, emission)| RouteParams {
            from: NodeId(from),
            to: NodeId(to),
            transport_cost: cost,
            transport_emission: emission,
        })
        .collect()
}

fn demand(kind: DemandKind) -> DemandSpec {
    DemandSpec {
        kind,
        seasonal_amplitude: SEASONAL_AMPLITUDE,
        seasonal_period: HORIZON as f64,
    }
}

fn normal(mean: f64, std_dev: f64) -> DemandKind {
    DemandKind::Normal { mean, std_dev }
}

fn poisson(rate: f64) -> DemandKind {
    DemandKind::Poisson { rate }
}

/// Returns the fully-populated built-in scenario.
pub fn builtin_scenario(which: BuiltinScenario) -> ScenarioConfig {
    match which {
        BuiltinScenario::Simple => simple(),
        BuiltinScenario::Moderate => moderate(),
        BuiltinScenario::Complex => complex(),
    }
}

fn simple() -> ScenarioConfig {
    let echelons = EchelonSets {
        suppliers: ids(&[1]),
        manufacturers: ids(&[2, 3]),
        warehouses_by_level: vec![],
        distribution_centres: vec![],
        retailers: ids(&[4, 5]),
        markets: ids(&[6, 7]),
    };
    let nodes = node_map(
        &echelons.destination_nodes(),
        &[
            (380.0, 0.11, 0.0002, Some((2.0, 1.0, 5.0126))),
            (350.0, 0.13, 0.0002, Some((2.2, 1.0, 4.5754))),
            (400.0, 0.12, 0.0002, None),
            (80.0, 0.15, 0.0002, None),
        ],
    );
    let route_rows = [
        (1, 2, 0.22, 0.1258),
        (1, 3, 0.69, 0.3947),
        (2, 4, 1.055, 0.6035),
        (2, 5, 0.43, 0.246),
        (3, 4, 0.485, 0.2774),
        (3, 5, 0.75, 0.429),
    ];
    let demands = BTreeMap::from([
        (NodeId(6), demand(normal(150.0, 60.0))),
        (NodeId(7), demand(normal(100.0, 40.0))),
    ]);
    let prices = BTreeMap::from([(NodeId(4), 20.0), (NodeId(5), 20.0)]);
    ScenarioConfig {
        name: "simple".into(),
        echelons,
        nodes,
        routes: routes(&route_rows),
        demands,
        prices,
        horizon: HORIZON,
        lead_time: LEAD_TIME,
        capacity: CAPACITY,
        big_m: BIG_M,
        reference_point: ObjectiveVector::new(0.0, -2e5, -100.0),
    }
}

fn moderate() -> ScenarioConfig {
    let echelons = EchelonSets {
        suppliers: ids(&[1, 2]),
        manufacturers: ids(&[3, 4, 5]),
        warehouses_by_level: vec![ids(&[6, 7])],
        distribution_centres: vec![],
        retailers: ids(&[8, 9, 10]),
        markets: ids(&[11, 12, 13]),
    };
    let nodes = node_map(
        &echelons.destination_nodes(),
        &[
            (380.0, 0.11, 0.0002, Some((2.0, 1.0, 5.0126))),
            (350.0, 0.13, 0.0002, Some((2.2, 1.0, 4.5754))),
            (400.0, 0.12, 0.0002, Some((2.3, 1.0, 5.4491))),
            (80.0, 0.15, 0.0002, None),
            (110.0, 0.20, 0.0002, None),
            (100.0, 0.25, 0.0002, None),
            (80.0, 0.30, 0.0002, None),
            (120.0, 0.20, 0.0002, None),
        ],
    );
    let route_rows = [
        (1, 3, 0.22, 0.1258),
        (1, 4, 0.69, 0.3947),
        (1, 5, 0.565, 0.3232),
        (2, 3, 1.055, 0.6035),
        (2, 4, 0.65, 0.3718),
        (2, 5, 0.63, 0.3604),
        (3, 6, 0.075, 0.0429),
        (3, 7, 0.43, 0.246),
        (4, 6, 0.63, 0.3604),
        (4, 7, 0.23, 0.1316),
        (5, 6, 0.495, 0.2831),
        (5, 7, 0.075, 0.0429),
        (6, 8, 1.095, 0.6263),
        (6, 9, 0.625, 0.3575),
        (6, 10, 0.95, 0.5434),
        (7, 8, 1.64, 0.9381),
        (7, 9, 1.16, 0.6635),
        (7, 10, 0.58, 0.3318),
    ];
    let demands = BTreeMap::from([
        (NodeId(11), demand(normal(150.0, 60.0))),
        (NodeId(12), demand(normal(100.0, 40.0))),
        (NodeId(13), demand(poisson(200.0))),
    ]);
    let prices = BTreeMap::from([
        (NodeId(8), 20.0),
        (NodeId(9), 21.0),
        (NodeId(10), 20.5),
    ]);
    ScenarioConfig {
        name: "moderate".into(),
        echelons,
        nodes,
        routes: routes(&route_rows),
        demands,
        prices,
        horizon: HORIZON,
        lead_time: LEAD_TIME,
        capacity: CAPACITY,
        big_m: BIG_M,
        reference_point: ObjectiveVector::new(0.0, -4e5, -200.0),
    }
}

fn complex() -> ScenarioConfig {
    let echelons = EchelonSets {
        suppliers: ids(&[1, 2, 3]),
        manufacturers: ids(&[4, 5, 6, 7, 8]),
        warehouses_by_level: vec![ids(&[9, 10, 11])],
        distribution_centres: ids(&[12, 13, 14]),
        retailers: ids(&[15, 16, 17, 18, 19]),
        markets: ids(&[20, 21, 22, 23, 24]),
    };
    let nodes = node_map(
        &echelons.destination_nodes(),
        &[
            (155.0, 0.23, 0.0002, Some((2.0, 1.0, 5.0126))),
            (267.0, 0.35, 0.0002, Some((2.2, 1.0, 4.5754))),
            (342.0, 0.22, 0.0002, Some((2.1, 1.0, 5.4491))),
            (211.0, 0.11, 0.0002, Some((2.0, 1.0, 6.1232))),
            (162.0, 0.29, 0.0002, Some((2.3, 1.0, 5.5157))),
            (195.0, 0.37, 0.0002, None),
            (333.0, 0.11, 0.0002, None),
            (96.0, 0.36, 0.0002, None),
            (285.0, 0.33, 0.0002, None),
            (68.0, 0.26, 0.0002, None),
            (379.0, 0.30, 0.0002, None),
            (344.0, 0.17, 0.0002, None),
            (66.0, 0.29, 0.0002, None),
            (356.0, 0.27, 0.0002, None),
            (382.0, 0.23, 0.0002, None),
            (362.0, 0.37, 0.0002, None),
        ],
    );
    // Warehouse 10 and 11 rows target the distribution centres 12..14;
    // the listed cost/emission values are kept in row order.
    let route_rows = [
        (1, 4, 0.535, 0.306),
        (1, 5, 0.265, 0.1516),
        (1, 6, 1.845, 1.0553),
        (1, 7, 1.6, 0.9152),
        (1, 8, 1.44, 0.8237),
        (2, 4, 0.36, 0.2059),
        (2, 5, 0.295, 0.1687),
        (2, 6, 1.235, 0.7064),
        (2, 7, 0.625, 0.3575),
        (2, 8, 1.855, 1.0611),
        (3, 4, 0.6, 0.3432),
        (3, 5, 0.175, 0.1001),
        (3, 6, 0.745, 0.4261),
        (3, 7, 1.33, 0.7608),
        (3, 8, 0.17, 0.0972),
        (4, 9, 1.99, 1.1383),
        (4, 10, 0.34, 0.1945),
        (4, 11, 0.81, 0.4633),
        (5, 9, 1.515, 0.8666),
        (5, 10, 0.66, 0.3775),
        (5, 11, 0.645, 0.3689),
        (6, 9, 1.695, 0.9695),
        (6, 10, 1.58, 0.9038),
        (6, 11, 0.815, 0.4662),
        (7, 9, 1.615, 0.9238),
        (7, 10, 1.26, 0.7207),
        (7, 11, 0.675, 0.3861),
        (8, 9, 1.03, 0.5892),
        (8, 10, 1.09, 0.6235),
        (8, 11, 1.63, 0.9324),
        (9, 12, 1.965, 1.124),
        (9, 13, 1.925, 1.1011),
        (9, 14, 1.62, 0.9266),
        (10, 12, 1.49, 0.8523),
        (10, 13, 1.96, 1.1211),
        (10, 14, 0.635, 0.3632),
        (11, 12, 1.87, 1.0696),
        (11, 13, 0.2, 0.1144),
        (11, 14, 1.855, 1.0611),
        (12, 15, 1.945, 1.1125),
        (12, 16, 0.965, 0.552),
        (12, 17, 1.905, 1.0897),
        (12, 18, 0.9, 0.5148),
        (12, 19, 0.69, 0.3947),
        (13, 15, 0.805, 0.4605),
        (13, 16, 1.065, 0.6092),
        (13, 17, 1.84, 1.0525),
        (13, 18, 0.83, 0.4748),
        (13, 19, 1.885, 1.0782),
        (14, 15, 1.66, 0.9495),
        (14, 16, 1.51, 0.8637),
        (14, 17, 0.59, 0.3375),
        (14, 18, 0.4, 0.2288),
        (14, 19, 1.395, 0.7979),
    ];
    let demands = BTreeMap::from([
        (NodeId(20), demand(normal(150.0, 60.0))),
        (NodeId(21), demand(normal(100.0, 40.0))),
        (NodeId(22), demand(poisson(200.0))),
        (NodeId(23), demand(poisson(100.0))),
        (NodeId(24), demand(poisson(150.0))),
    ]);
    let prices = BTreeMap::from([
        (NodeId(15), 100.0),
        (NodeId(16), 101.0),
        (NodeId(17), 105.0),
        (NodeId(18), 103.0),
        (NodeId(19), 104.0),
    ]);
    ScenarioConfig {
        name: "complex".into(),
        echelons,
        nodes,
        routes: routes(&route_rows),
        demands,
        prices,
        horizon: HORIZON,
        lead_time: LEAD_TIME,
        capacity: CAPACITY,
        big_m: BIG_M,
        reference_point: ObjectiveVector::new(0.0, -1e6, -500.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_match_the_three_networks() {
        let cases = [
            (BuiltinScenario::Simple, 8, 800, 6),
            (BuiltinScenario::Moderate, 21, 2100, 18),
            (BuiltinScenario::Complex, 59, 5900, 54),
        ];
        for (which, action_dim, decision_dim, n_routes) in cases {
            let cfg = builtin_scenario(which);
            assert_eq!(cfg.action_dim(), action_dim, "{which:?}");
            assert_eq!(cfg.decision_dim(), decision_dim, "{which:?}");
            assert_eq!(cfg.routes.len(), n_routes, "{which:?}");
        }
    }

    #[test]
    fn simple_node_rows_map_onto_destination_order() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let first_mfg = &cfg.nodes[&NodeId(2)];
        assert_eq!(first_mfg.initial_inventory, 380.0);
        assert_eq!(first_mfg.holding_cost, 0.11);
        assert_eq!(first_mfg.holding_emission, 0.0002);
        assert_eq!(first_mfg.production_cost, Some(2.0));
        assert_eq!(first_mfg.yield_ratio, Some(1.0));
        assert_eq!(first_mfg.production_emission, Some(5.0126));
        assert_eq!(cfg.nodes[&NodeId(3)].initial_inventory, 350.0);
        assert_eq!(cfg.nodes[&NodeId(4)].initial_inventory, 400.0);
        assert_eq!(cfg.nodes[&NodeId(5)].initial_inventory, 80.0);
    }

    #[test]
    fn simple_routes_carry_the_listed_values() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let first = &cfg.routes[0];
        assert_eq!((first.from, first.to), (NodeId(1), NodeId(2)));
        assert_eq!(first.transport_cost, 0.22);
        assert_eq!(first.transport_emission, 0.1258);
    }

    #[test]
    fn complex_prices_and_reference_point() {
        let cfg = builtin_scenario(BuiltinScenario::Complex);
        let prices: Vec<f64> = cfg.prices.values().copied().collect();
        assert_eq!(prices, vec![100.0, 101.0, 105.0, 103.0, 104.0]);
        assert_eq!(cfg.reference_point.neg_emission, -1e6);
        assert_eq!(cfg.reference_point.neg_sl_inequality, -500.0);
    }

    #[test]
    fn complex_rewired_warehouse_routes_keep_row_values() {
        let cfg = builtin_scenario(BuiltinScenario::Complex);
        let r = cfg
            .routes
            .iter()
            .find(|r| r.from == NodeId(10) && r.to == NodeId(14))
            .unwrap();
        assert_eq!((r.transport_cost, r.transport_emission), (0.635, 0.3632));
        let r = cfg
            .routes
            .iter()
            .find(|r| r.from == NodeId(11) && r.to == NodeId(13))
            .unwrap();
        assert_eq!((r.transport_cost, r.transport_emission), (0.2, 0.1144));
    }
}
