//! Sequential supply-chain simulator with vector rewards.
//!
//! One step covers a single period, in order: shipments in transit age
//! by one period and the oldest slot arrives; manufacturing executes
//! exactly the supplier arrivals (the requested production is recorded
//! but never executed); inventories update by inflow minus dispatched
//! outflow; markets absorb the period's retailer arrivals up to demand,
//! with unsold arrivals stocked at the retailer; new shipments enter
//! the transit pipeline; rewards, penalty and the cumulative trackers
//! are computed from the post-transition quantities.
//!
//! Rewards follow the maximisation convention (profit, -emission,
//! -service-level inequality). Negative inventory is a penalised
//! bookkeeping state, not physical stock: holding cost and emission
//! clamp inventory at zero, and the penalty adds
//! `sum(min(I, 0)) * big_m` to the profit and emission components.

use std::fmt;

use crate::demand::DemandTrace;
use crate::objective::ObjectiveVector;
use crate::scenario::{validate_scenario, NodeId, ScenarioConfig};

#[derive(Debug)]
pub enum EnvError {
    InvalidScenario(String),
    TraceMismatch(String),
    EpisodeTerminal,
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvError::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            EnvError::TraceMismatch(msg) => write!(f, "trace does not match scenario: {msg}"),
            EnvError::EpisodeTerminal => write!(f, "episode already ran to the horizon"),
        }
    }
}

impl std::error::Error for EnvError {}

/// Per-period decision: manufacturing quantities (one per manufacturer,
/// scenario order) and shipment quantities (one per route, scenario
/// order). Shipments outside `[0, capacity]` and negative production
/// requests are clipped during the step and flagged in the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionVector {
    pub production: Vec<f64>,
    pub shipments: Vec<f64>,
}

impl ActionVector {
    pub fn zeros(cfg: &ScenarioConfig) -> Self {
        Self {
            production: vec![0.0; cfg.echelons.manufacturers.len()],
            shipments: vec![0.0; cfg.routes.len()],
        }
    }

    /// Builds an action from one flat period slice laid out as
    /// manufacturers first, then routes.
    pub fn from_flat(cfg: &ScenarioConfig, genes: &[f64]) -> Self {
        let n_mfg = cfg.echelons.manufacturers.len();
        assert_eq!(genes.len(), cfg.action_dim(), "flat action length");
        Self {
            production: genes[..n_mfg].to_vec(),
            shipments: genes[n_mfg..].to_vec(),
        }
    }
}

/// Dynamic simulator state. Inventories are indexed by destination-node
/// position; the pipeline holds one ring of `lead_time` slots per
/// route, slot 0 arriving next.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub inventories: Vec<f64>,
    pub pipeline: Vec<Vec<f64>>,
    pub cumulative_emission: f64,
    pub avg_sl_inequality: f64,
    pub clock: u32,
    /// Cumulative units arrived at each retailer.
    pub sl_numerators: Vec<f64>,
    /// Cumulative demand faced by each retailer's market.
    pub sl_denominators: Vec<f64>,
    /// Demand the markets will express in the period about to run.
    pub current_demands: Vec<f64>,
}

/// Per-period diagnostics emitted by every step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub period: u32,
    pub revenue: f64,
    pub production_cost: f64,
    pub transport_cost: f64,
    pub inventory_cost: f64,
    pub emission: f64,
    pub sl_inequality: f64,
    pub penalty: f64,
    /// Executed production per manufacturer (supplier arrivals).
    pub production: Vec<f64>,
    /// Production requested by the action, recorded but not executed.
    pub requested_production: Vec<f64>,
    /// Shipments dispatched this period, after clipping.
    pub shipments: Vec<f64>,
    /// Post-transition inventories per destination node.
    pub inventories: Vec<f64>,
    /// Per-market service level this period.
    pub service_levels: Vec<f64>,
    /// Per-market demand this period.
    pub demand: Vec<f64>,
    /// Units the markets absorbed.
    pub absorbed: Vec<f64>,
    /// Unmet demand; lost, never backordered.
    pub demand_loss: Vec<f64>,
    /// True when the action was clipped into its bounds.
    pub clipped: bool,
}

/// Result of one step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    /// Penalised reward: raw reward plus the penalty on the profit and
    /// emission components.
    pub reward: ObjectiveVector,
    /// Pre-penalty reward.
    pub raw_reward: ObjectiveVector,
    /// Non-positive; zero exactly when no inventory went negative.
    pub penalty: f64,
    /// Normalised observation of the post-step state.
    pub observation: Vec<f64>,
    pub info: StepInfo,
}

/// Full-episode result.
#[derive(Debug, Clone)]
pub struct RolloutResult {
    /// Undiscounted sums of the raw per-period rewards; the episode
    /// totals of profit, emission and inequality.
    pub totals: ObjectiveVector,
    /// Discount-weighted sums of the penalised per-period rewards.
    pub discounted: ObjectiveVector,
    pub log: Vec<StepInfo>,
}

/// Anything that can drive an episode.
pub trait ActionSource {
    fn action(&mut self, observation: &[f64], period: u32) -> ActionVector;
}

impl<F: FnMut(&[f64], u32) -> ActionVector> ActionSource for F {
    fn action(&mut self, observation: &[f64], period: u32) -> ActionVector {
        self(observation, period)
    }
}

/// Precomputed index structures for one scenario plus one demand trace.
/// Instances are immutable; run as many episodes from one as you like,
/// in parallel if desired.
pub struct Simulator<'a> {
    cfg: &'a ScenarioConfig,
    /// Destination nodes in echelon order.
    to_nodes: Vec<NodeId>,
    initial_inventory: Vec<f64>,
    holding_cost: Vec<f64>,
    holding_emission: Vec<f64>,
    route_cost: Vec<f64>,
    route_emission: Vec<f64>,
    /// Inbound route indices per destination position.
    inbound: Vec<Vec<usize>>,
    /// Outbound route indices per destination position.
    outbound: Vec<Vec<usize>>,
    /// Manufacturer metadata: destination position, production cost,
    /// yield ratio, production emission, supplier route indices.
    mfg_pos: Vec<usize>,
    mfg_cost: Vec<f64>,
    mfg_yield: Vec<f64>,
    mfg_emission: Vec<f64>,
    mfg_supplier_routes: Vec<Vec<usize>>,
    /// Retailer metadata, aligned with markets positionally.
    retailer_pos: Vec<usize>,
    retailer_price: Vec<f64>,
    /// Demand per market position per period.
    demand: Vec<Vec<u32>>,
    /// Observation scaling upper bounds.
    inv_upper: Vec<f64>,
    emission_upper: f64,
    inequality_upper: f64,
    demand_upper: Vec<f64>,
}

impl<'a> Simulator<'a> {
    pub fn new(cfg: &'a ScenarioConfig, trace: &DemandTrace) -> Result<Self, EnvError> {
        let report = validate_scenario(cfg);
        if !report.is_empty() {
            return Err(EnvError::InvalidScenario(report.to_string()));
        }
        let markets = &cfg.echelons.markets;
        if trace.per_market.len() != markets.len()
            || markets.iter().any(|m| !trace.per_market.contains_key(m))
        {
            return Err(EnvError::TraceMismatch(format!(
                "trace covers {} markets, scenario declares {:?}",
                trace.per_market.len(),
                markets
            )));
        }
        for (market, series) in &trace.per_market {
            if series.len() != cfg.horizon as usize {
                return Err(EnvError::TraceMismatch(format!(
                    "market {market} has {} periods, horizon is {}",
                    series.len(),
                    cfg.horizon
                )));
            }
        }

        let to_nodes = cfg.echelons.destination_nodes();
        let pos_of = |id: NodeId| to_nodes.iter().position(|&n| n == id);

        let mut inbound = vec![vec![]; to_nodes.len()];
        let mut outbound = vec![vec![]; to_nodes.len()];
        for (r, route) in cfg.routes.iter().enumerate() {
            let to_pos = pos_of(route.to).expect("validated route target");
            if let Some(p) = pos_of(route.from) {
                outbound[p].push(r);
            }
            inbound[to_pos].push(r);
        }

        let suppliers = &cfg.echelons.suppliers;
        let mut mfg_pos = vec![];
        let mut mfg_cost = vec![];
        let mut mfg_yield = vec![];
        let mut mfg_emission = vec![];
        let mut mfg_supplier_routes = vec![];
        for &m in &cfg.echelons.manufacturers {
            let p = pos_of(m).expect("manufacturer is a destination");
            let params = &cfg.nodes[&m];
            mfg_pos.push(p);
            mfg_cost.push(params.production_cost.expect("validated manufacturer"));
            mfg_yield.push(params.yield_ratio.expect("validated manufacturer"));
            mfg_emission.push(params.production_emission.expect("validated manufacturer"));
            let from_suppliers = inbound[p]
                .iter()
                .copied()
                .filter(|&r| suppliers.contains(&cfg.routes[r].from))
                .collect();
            mfg_supplier_routes.push(from_suppliers);
        }

        let retailer_pos: Vec<usize> = cfg
            .echelons
            .retailers
            .iter()
            .map(|&r| pos_of(r).expect("retailer is a destination"))
            .collect();
        let retailer_price: Vec<f64> = cfg
            .echelons
            .retailers
            .iter()
            .map(|r| cfg.prices[r])
            .collect();

        let demand: Vec<Vec<u32>> = markets.iter().map(|m| trace.per_market[m].clone()).collect();

        let initial_inventory: Vec<f64> = to_nodes
            .iter()
            .map(|id| cfg.nodes[id].initial_inventory)
            .collect();
        let holding_cost: Vec<f64> = to_nodes.iter().map(|id| cfg.nodes[id].holding_cost).collect();
        let holding_emission: Vec<f64> = to_nodes
            .iter()
            .map(|id| cfg.nodes[id].holding_emission)
            .collect();

        // Observation bounds: a node can never hold more than its
        // opening stock plus every inbound route at capacity for the
        // whole horizon; cumulative emission is scaled by the scenario
        // reference magnitude; the inequality average is bounded by the
        // number of retailer pairs; demand by the seasonal peak of a
        // high quantile of the base distribution.
        let inv_upper: Vec<f64> = (0..to_nodes.len())
            .map(|p| {
                initial_inventory[p]
                    + cfg.capacity * inbound[p].len() as f64 * cfg.horizon as f64
            })
            .map(|b| b.max(1.0))
            .collect();
        let emission_upper = cfg.reference_point.neg_emission.abs().max(1.0);
        let n_retailers = cfg.echelons.retailers.len() as f64;
        let inequality_upper = (n_retailers * (n_retailers - 1.0) / 2.0).max(1.0);
        let demand_upper: Vec<f64> = markets
            .iter()
            .map(|m| {
                let spec = &cfg.demands[m];
                let peak = match spec.kind {
                    crate::scenario::DemandKind::Normal { mean, std_dev } => mean + 4.0 * std_dev,
                    crate::scenario::DemandKind::Poisson { rate } => rate + 4.0 * rate.sqrt(),
                };
                ((1.0 + spec.seasonal_amplitude) * peak).max(1.0)
            })
            .collect();

        Ok(Self {
            cfg,
            to_nodes,
            initial_inventory,
            holding_cost,
            holding_emission,
            route_cost: cfg.routes.iter().map(|r| r.transport_cost).collect(),
            route_emission: cfg.routes.iter().map(|r| r.transport_emission).collect(),
            inbound,
            outbound,
            mfg_pos,
            mfg_cost,
            mfg_yield,
            mfg_emission,
            mfg_supplier_routes,
            retailer_pos,
            retailer_price,
            demand,
            inv_upper,
            emission_upper,
            inequality_upper,
            demand_upper,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        self.cfg
    }

    pub fn destination_nodes(&self) -> &[NodeId] {
        &self.to_nodes
    }

    pub fn horizon(&self) -> u32 {
        self.cfg.horizon
    }

    /// Observation layout: inventories, flattened pipeline, cumulative
    /// emission, average inequality, current demands.
    pub fn observation_dim(&self) -> usize {
        self.to_nodes.len()
            + self.cfg.routes.len() * self.cfg.lead_time as usize
            + 2
            + self.demand.len()
    }

    fn demands_at(&self, t: u32) -> Vec<f64> {
        if t < self.cfg.horizon {
            self.demand.iter().map(|d| d[t as usize] as f64).collect()
        } else {
            vec![0.0; self.demand.len()]
        }
    }

    /// Fresh state at period zero: opening inventories, empty pipeline,
    /// zeroed accumulators.
    pub fn reset(&self) -> SimState {
        let lead = self.cfg.lead_time as usize;
        SimState {
            inventories: self.initial_inventory.clone(),
            pipeline: vec![vec![0.0; lead]; self.cfg.routes.len()],
            cumulative_emission: 0.0,
            avg_sl_inequality: 0.0,
            clock: 0,
            sl_numerators: vec![0.0; self.retailer_pos.len()],
            sl_denominators: vec![0.0; self.retailer_pos.len()],
            current_demands: self.demands_at(0),
        }
    }

    /// Normalised observation of a state; every component is affinely
    /// mapped into [0, 1] by the documented bounds and clamped.
    pub fn observe(&self, state: &SimState) -> Vec<f64> {
        let mut obs = Vec::with_capacity(self.observation_dim());
        for (p, &inv) in state.inventories.iter().enumerate() {
            obs.push((inv / self.inv_upper[p]).clamp(0.0, 1.0));
        }
        for ring in &state.pipeline {
            for &q in ring {
                obs.push((q / self.cfg.capacity).clamp(0.0, 1.0));
            }
        }
        obs.push((state.cumulative_emission / self.emission_upper).clamp(0.0, 1.0));
        obs.push((state.avg_sl_inequality / self.inequality_upper).clamp(0.0, 1.0));
        for (m, &d) in state.current_demands.iter().enumerate() {
            obs.push((d / self.demand_upper[m]).clamp(0.0, 1.0));
        }
        obs
    }

    /// Advances one period. The input state is left untouched; the
    /// successor state and the step outcome are returned.
    pub fn step(
        &self,
        state: &SimState,
        action: &ActionVector,
    ) -> Result<(SimState, StepOutcome), EnvError> {
        let horizon = self.cfg.horizon;
        if state.clock >= horizon {
            return Err(EnvError::EpisodeTerminal);
        }
        let t = state.clock;
        let lead = self.cfg.lead_time as usize;
        let cap = self.cfg.capacity;
        let n_routes = self.route_cost.len();
        assert_eq!(action.shipments.len(), n_routes, "shipment vector length");
        assert_eq!(
            action.production.len(),
            self.mfg_pos.len(),
            "production vector length"
        );

        let mut next = state.clone();

        // Clip the action into its bounds.
        let mut clipped = false;
        let shipments: Vec<f64> = action
            .shipments
            .iter()
            .map(|&q| {
                let c = q.clamp(0.0, cap);
                if c != q {
                    clipped = true;
                }
                c
            })
            .collect();
        let requested_production: Vec<f64> = action
            .production
            .iter()
            .map(|&q| {
                let c = q.max(0.0);
                if c != q {
                    clipped = true;
                }
                c
            })
            .collect();

        // 1. Arrivals: age every pipeline ring by one period.
        let mut arrivals = vec![0.0; n_routes];
        for (r, ring) in next.pipeline.iter_mut().enumerate() {
            arrivals[r] = ring[0];
            ring.copy_within(1.., 0);
            ring[lead - 1] = 0.0;
        }

        // 2. Production executes the supplier arrivals, overriding the
        //    requested quantities.
        let production: Vec<f64> = self
            .mfg_supplier_routes
            .iter()
            .map(|routes| routes.iter().map(|&r| arrivals[r]).sum())
            .collect();

        // 3. Inventory update: inflow minus dispatched outflow.
        for (k, &p) in self.mfg_pos.iter().enumerate() {
            next.inventories[p] += production[k];
        }
        for (p, routes) in self.inbound.iter().enumerate() {
            if self.mfg_pos.contains(&p) {
                continue; // manufacturer inflow is the production above
            }
            next.inventories[p] += routes.iter().map(|&r| arrivals[r]).sum::<f64>();
        }
        for (p, routes) in self.outbound.iter().enumerate() {
            next.inventories[p] -= routes.iter().map(|&r| shipments[r]).sum::<f64>();
        }

        // 4. Market absorption: each market takes this period's retailer
        //    arrivals up to its demand; unsold arrivals stay in stock.
        let n_markets = self.retailer_pos.len();
        let mut service_levels = vec![0.0; n_markets];
        let mut absorbed = vec![0.0; n_markets];
        let mut demand_loss = vec![0.0; n_markets];
        let mut revenue = 0.0;
        let demands = state.current_demands.clone();
        for (m, &p) in self.retailer_pos.iter().enumerate() {
            let retailer_arrivals: f64 = self.inbound[p].iter().map(|&r| arrivals[r]).sum();
            let d = demands[m];
            absorbed[m] = retailer_arrivals.min(d);
            next.inventories[p] -= absorbed[m];
            demand_loss[m] = d - absorbed[m];
            service_levels[m] = if d > 0.0 {
                (retailer_arrivals / d).min(1.0)
            } else {
                1.0
            };
            next.sl_numerators[m] += retailer_arrivals;
            next.sl_denominators[m] += d;
            revenue += retailer_arrivals * self.retailer_price[m];
        }

        // 5. Dispatched shipments enter the last pipeline slot.
        for (r, ring) in next.pipeline.iter_mut().enumerate() {
            ring[lead - 1] = shipments[r];
        }

        // 6. Rewards.
        let lead_f = self.cfg.lead_time as f64;
        let production_cost: f64 = production
            .iter()
            .zip(&self.mfg_cost)
            .zip(&self.mfg_yield)
            .map(|((&q, &c), &v)| q * c / v)
            .sum();
        let transport_cost: f64 = shipments
            .iter()
            .zip(&self.route_cost)
            .map(|(&q, &c)| q * c * lead_f)
            .sum();
        let inventory_cost: f64 = next
            .inventories
            .iter()
            .zip(&self.holding_cost)
            .map(|(&inv, &c)| inv.max(0.0) * c)
            .sum();
        let profit = revenue - production_cost - transport_cost - inventory_cost;

        let emission: f64 = next
            .inventories
            .iter()
            .zip(&self.holding_emission)
            .map(|(&inv, &e)| inv.max(0.0) * e)
            .sum::<f64>()
            + production
                .iter()
                .zip(&self.mfg_emission)
                .map(|(&q, &e)| q * e)
                .sum::<f64>()
            + shipments
                .iter()
                .zip(&self.route_emission)
                .map(|(&q, &e)| q * e * lead_f)
                .sum::<f64>();

        let mut sl_inequality = 0.0;
        for i in 0..n_markets {
            for j in (i + 1)..n_markets {
                sl_inequality += (service_levels[i] - service_levels[j]).abs();
            }
        }

        // 7. Penalty for negative inventories.
        let penalty: f64 = next
            .inventories
            .iter()
            .map(|&inv| inv.min(0.0) * self.cfg.big_m)
            .sum();

        let raw_reward = ObjectiveVector::new(profit, -emission, -sl_inequality);
        let reward = ObjectiveVector::new(profit + penalty, -emission + penalty, -sl_inequality);

        // 8. Cumulative trackers and clock.
        next.cumulative_emission += emission;
        let period_no = (t + 1) as f64;
        next.avg_sl_inequality =
            (next.avg_sl_inequality * (period_no - 1.0) + sl_inequality) / period_no;
        next.clock = t + 1;
        next.current_demands = self.demands_at(next.clock);

        let info = StepInfo {
            period: t,
            revenue,
            production_cost,
            transport_cost,
            inventory_cost,
            emission,
            sl_inequality,
            penalty,
            production,
            requested_production,
            shipments,
            inventories: next.inventories.clone(),
            service_levels,
            demand: demands,
            absorbed,
            demand_loss,
            clipped,
        };
        let observation = self.observe(&next);
        Ok((
            next,
            StepOutcome {
                reward,
                raw_reward,
                penalty,
                observation,
                info,
            },
        ))
    }

    /// Runs a whole episode under `policy`. The totals are undiscounted
    /// raw sums; the discounted return applies `discount^t` to the
    /// penalised rewards.
    pub fn rollout<P: ActionSource + ?Sized>(
        &self,
        policy: &mut P,
        discount: f64,
    ) -> Result<RolloutResult, EnvError> {
        let mut state = self.reset();
        let mut totals = ObjectiveVector::ZERO;
        let mut discounted = ObjectiveVector::ZERO;
        let mut gamma_t = 1.0;
        let mut log = Vec::with_capacity(self.cfg.horizon as usize);
        for t in 0..self.cfg.horizon {
            let obs = self.observe(&state);
            let action = policy.action(&obs, t);
            let (next, outcome) = self.step(&state, &action)?;
            totals = totals.add(&outcome.raw_reward);
            discounted = discounted.add(&outcome.reward.scale(gamma_t));
            gamma_t *= discount;
            log.push(outcome.info);
            state = next;
        }
        Ok(RolloutResult {
            totals,
            discounted,
            log,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::sample_trace;
    use crate::scenario::{builtin_scenario, BuiltinScenario};
    use std::collections::BTreeMap;

    /// A trace with fixed positive demand everywhere, for hand oracles.
    fn constant_trace(cfg: &ScenarioConfig, value: u32) -> DemandTrace {
        let per_market: BTreeMap<NodeId, Vec<u32>> = cfg
            .echelons
            .markets
            .iter()
            .map(|&m| (m, vec![value; cfg.horizon as usize]))
            .collect();
        DemandTrace {
            seed: 0,
            per_market,
        }
    }

    fn simple_sim(trace: &DemandTrace) -> (ScenarioConfig, DemandTrace) {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        (cfg, trace.clone())
    }

    #[test]
    fn reset_matches_opening_conditions() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let state = sim.reset();
        assert_eq!(state.inventories, vec![380.0, 350.0, 400.0, 80.0]);
        assert_eq!(state.cumulative_emission, 0.0);
        assert_eq!(state.avg_sl_inequality, 0.0);
        assert_eq!(state.clock, 0);
        for ring in &state.pipeline {
            assert_eq!(ring, &vec![0.0, 0.0]);
        }
    }

    #[test]
    fn trace_mismatch_is_rejected() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let other = builtin_scenario(BuiltinScenario::Moderate);
        let trace = sample_trace(&other, 1);
        assert!(matches!(
            Simulator::new(&cfg, &trace),
            Err(EnvError::TraceMismatch(_))
        ));
    }

    #[test]
    fn zero_action_first_period_hand_values() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let state = sim.reset();
        let (next, outcome) = sim.step(&state, &ActionVector::zeros(&cfg)).unwrap();

        // Holding cost of the untouched opening inventories.
        let expected_ic = 380.0 * 0.11 + 350.0 * 0.13 + 400.0 * 0.12 + 80.0 * 0.15;
        assert!((outcome.info.inventory_cost - expected_ic).abs() < 1e-12);
        assert!((outcome.raw_reward.profit - (-147.3)).abs() < 1e-9);
        assert!((outcome.info.emission - 0.242).abs() < 1e-12);
        // Demand positive, no arrivals: both service levels zero.
        assert_eq!(outcome.info.service_levels, vec![0.0, 0.0]);
        assert_eq!(outcome.info.sl_inequality, 0.0);
        assert_eq!(outcome.penalty, 0.0);
        assert_eq!(outcome.reward.profit, outcome.raw_reward.profit);
        // No outflow: inventories unchanged.
        assert_eq!(next.inventories, state.inventories);
        // Demand entirely lost.
        assert_eq!(outcome.info.demand_loss, vec![100.0, 100.0]);
    }

    #[test]
    fn inventory_inflow_outflow_arithmetic() {
        // Ship 3 out of manufacturer 2 while 5 units arrive from the
        // supplier pipeline: 10 + 5 - 3 = 12.
        let mut cfg = builtin_scenario(BuiltinScenario::Simple);
        cfg.nodes.get_mut(&NodeId(2)).unwrap().initial_inventory = 10.0;
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut state = sim.reset();
        // Preload the supplier route 1->2 so 5 units arrive next step.
        state.pipeline[0][0] = 5.0;
        let mut action = ActionVector::zeros(&cfg);
        action.shipments[2] = 3.0; // route 2->4
        let (next, outcome) = sim.step(&state, &action).unwrap();
        let pos2 = sim.destination_nodes().iter().position(|&n| n == NodeId(2)).unwrap();
        assert_eq!(next.inventories[pos2], 12.0);
        assert_eq!(outcome.info.production[0], 5.0);
    }

    #[test]
    fn service_level_caps_at_one() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut state = sim.reset();
        // 150 units arrive at retailer 4 against demand 100.
        state.pipeline[2][0] = 150.0; // route 2->4
        let (_, outcome) = sim.step(&state, &ActionVector::zeros(&cfg)).unwrap();
        assert_eq!(outcome.info.service_levels[0], 1.0);
        assert_eq!(outcome.info.absorbed[0], 100.0);
        // Revenue counts the full arrivals, not just the absorbed part.
        assert!((outcome.info.revenue - 150.0 * 20.0).abs() < 1e-12);
    }

    #[test]
    fn penalty_scales_negative_inventories() {
        let mut cfg = builtin_scenario(BuiltinScenario::Simple);
        cfg.nodes.get_mut(&NodeId(2)).unwrap().initial_inventory = 0.0;
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let state = sim.reset();
        let mut action = ActionVector::zeros(&cfg);
        action.shipments[2] = 5.0; // overdraw manufacturer 2 by 5
        let (next, outcome) = sim.step(&state, &action).unwrap();
        let pos2 = sim.destination_nodes().iter().position(|&n| n == NodeId(2)).unwrap();
        assert_eq!(next.inventories[pos2], -5.0);
        assert_eq!(outcome.penalty, -5.0 * 1e6);
        assert_eq!(outcome.reward.profit, outcome.raw_reward.profit + outcome.penalty);
        assert_eq!(
            outcome.reward.neg_emission,
            outcome.raw_reward.neg_emission + outcome.penalty
        );
        assert_eq!(
            outcome.reward.neg_sl_inequality,
            outcome.raw_reward.neg_sl_inequality
        );
    }

    #[test]
    fn shipments_clip_into_capacity() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let state = sim.reset();
        let mut action = ActionVector::zeros(&cfg);
        action.shipments[0] = 1000.0;
        action.shipments[1] = -4.0;
        let (_, outcome) = sim.step(&state, &action).unwrap();
        assert!(outcome.info.clipped);
        assert_eq!(outcome.info.shipments[0], 200.0);
        assert_eq!(outcome.info.shipments[1], 0.0);
    }

    #[test]
    fn zero_policy_rollout_totals() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut policy = |_obs: &[f64], _t: u32| ActionVector::zeros(&cfg);
        let result = sim.rollout(&mut policy, 1.0).unwrap();
        // Inventory never moves, so every period repeats the first.
        assert!((result.totals.profit - (-14730.0)).abs() < 1e-6);
        assert!((result.totals.neg_emission - (-24.2)).abs() < 1e-9);
        assert_eq!(result.totals.neg_sl_inequality, 0.0);
        // No penalties and discount 1: discounted equals totals.
        assert!((result.discounted.profit - result.totals.profit).abs() < 1e-9);
        assert_eq!(result.log.len(), 100);
    }

    #[test]
    fn rollout_is_deterministic() {
        let cfg = builtin_scenario(BuiltinScenario::Moderate);
        let trace = sample_trace(&cfg, 11);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut actions = |obs: &[f64], t: u32| {
            let mut a = ActionVector::zeros(&cfg);
            for (i, s) in a.shipments.iter_mut().enumerate() {
                *s = ((t as usize + i) % 7) as f64 * 13.0 + obs[0] * 0.0;
            }
            a
        };
        let a = sim.rollout(&mut actions, 0.99).unwrap();
        let b = sim.rollout(&mut actions, 0.99).unwrap();
        assert_eq!(a.totals, b.totals);
        assert_eq!(a.discounted, b.discounted);
        assert_eq!(a.log, b.log);
    }

    #[test]
    fn observation_layout_and_bounds() {
        for (which, dim) in [
            (BuiltinScenario::Simple, 20),
            (BuiltinScenario::Moderate, 49),
            (BuiltinScenario::Complex, 131),
        ] {
            let cfg = builtin_scenario(which);
            let trace = sample_trace(&cfg, 0);
            let sim = Simulator::new(&cfg, &trace).unwrap();
            assert_eq!(sim.observation_dim(), dim, "{which:?}");
            let state = sim.reset();
            let obs = sim.observe(&state);
            assert_eq!(obs.len(), dim, "{which:?}");
            assert!(obs.iter().all(|&x| (0.0..=1.0).contains(&x)));
            // Cumulative emission and inequality are zero on reset.
            let n_nodes = sim.destination_nodes().len();
            let pipeline_len = cfg.routes.len() * cfg.lead_time as usize;
            assert_eq!(obs[n_nodes + pipeline_len], 0.0);
            assert_eq!(obs[n_nodes + pipeline_len + 1], 0.0);
        }
    }

    #[test]
    fn inventory_at_its_bound_observes_as_one() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = constant_trace(&cfg, 100);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut state = sim.reset();
        // Upper bound for node 2: opening 380 plus one inbound route at
        // capacity for the whole horizon.
        state.inventories[0] = 380.0 + 200.0 * 100.0;
        let obs = sim.observe(&state);
        assert_eq!(obs[0], 1.0);
        state.inventories[0] = -50.0;
        assert_eq!(sim.observe(&state)[0], 0.0);
    }

    #[test]
    fn terminal_episode_refuses_to_step() {
        let mut cfg = builtin_scenario(BuiltinScenario::Simple);
        cfg.horizon = 1;
        let trace = constant_trace(&cfg, 10);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let state = sim.reset();
        let (next, _) = sim.step(&state, &ActionVector::zeros(&cfg)).unwrap();
        assert!(matches!(
            sim.step(&next, &ActionVector::zeros(&cfg)),
            Err(EnvError::EpisodeTerminal)
        ));
    }

    #[test]
    fn sl_accumulators_are_monotone() {
        let cfg = builtin_scenario(BuiltinScenario::Simple);
        let trace = sample_trace(&cfg, 4);
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut state = sim.reset();
        let mut prev_num = state.sl_numerators.clone();
        let mut prev_den = state.sl_denominators.clone();
        for t in 0..cfg.horizon {
            let mut action = ActionVector::zeros(&cfg);
            for (i, s) in action.shipments.iter_mut().enumerate() {
                *s = ((t as usize * 31 + i * 17) % 120) as f64;
            }
            let (next, _) = sim.step(&state, &action).unwrap();
            for m in 0..prev_num.len() {
                assert!(next.sl_numerators[m] >= prev_num[m]);
                assert!(next.sl_denominators[m] >= prev_den[m]);
            }
            prev_num = next.sl_numerators.clone();
            prev_den = next.sl_denominators.clone();
            state = next;
        }
    }

    #[test]
    fn cumulative_emission_never_decreases() {
        let (cfg, trace) = simple_sim(&constant_trace(
            &builtin_scenario(BuiltinScenario::Simple),
            50,
        ));
        let sim = Simulator::new(&cfg, &trace).unwrap();
        let mut state = sim.reset();
        let mut prev = 0.0;
        for t in 0..20 {
            let mut action = ActionVector::zeros(&cfg);
            action.shipments[t as usize % 6] = 60.0;
            let (next, _) = sim.step(&state, &action).unwrap();
            assert!(next.cumulative_emission >= prev);
            prev = next.cumulative_emission;
            state = next;
        }
    }
}
