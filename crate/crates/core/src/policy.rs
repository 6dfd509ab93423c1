//! Policy search for the sequential model.
//!
//! Policies are small feed-forward networks with bounded outputs; the
//! improvement operator is a greedy perturbation search: each iteration
//! samples Gaussian parameter perturbations of the incumbent, scores
//! every candidate by its mean scalarised discounted penalised return
//! over freshly seeded demand episodes, and adopts the best candidate
//! when it beats the incumbent. Two drivers sit on top:
//!
//! - [`run_scalarised_baseline`]: one independent search per fixed
//!   weight vector, non-dominated filtering of the resulting episode
//!   totals.
//! - [`run_morld`]: a population of weighted subproblems improved in
//!   rounds, with an external non-dominated archive fed by every
//!   evaluated candidate, optional cross-subproblem candidate adoption
//!   (the shared pool), and optional multiplicative weight adaptation
//!   that steers each subproblem away from its nearest archive
//!   neighbour.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::demand::{sample_trace, DemandTrace};
use crate::env::{ActionSource, ActionVector, Simulator};
use crate::objective::ObjectiveVector;
use crate::pareto::{
    das_dennis, pareto_filter, Front, NormalisationBounds, ParetoArchive, WeightVector,
};
use crate::scenario::ScenarioConfig;
use crate::seeding::{
    self, DOMAIN_BOUNDS, DOMAIN_BOUNDS_TRACE, DOMAIN_WEIGHT, DOMAIN_WEIGHT_TRACE,
};

/// Observation dimensionality for a scenario: inventories, flattened
/// transit pipeline, cumulative emission, average inequality, current
/// demands.
pub fn observation_dim(cfg: &ScenarioConfig) -> usize {
    cfg.echelons.destination_nodes().len()
        + cfg.routes.len() * cfg.lead_time as usize
        + 2
        + cfg.echelons.markets.len()
}

/// A deterministic feed-forward policy with tanh-squashed layers; the
/// outputs always land in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNet {
    pub params: Vec<f64>,
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
}

impl PolicyNet {
    pub fn param_count(input_dim: usize, hidden: &[usize], output_dim: usize) -> usize {
        let mut count = 0;
        let mut prev = input_dim;
        for &width in hidden {
            count += prev * width + width;
            prev = width;
        }
        count + prev * output_dim + output_dim
    }

    pub fn zeroed(input_dim: usize, hidden: Vec<usize>, output_dim: usize) -> Self {
        let params = vec![0.0; Self::param_count(input_dim, &hidden, output_dim)];
        Self {
            params,
            input_dim,
            hidden,
            output_dim,
        }
    }

    pub fn with_params(&self, params: Vec<f64>) -> Self {
        assert_eq!(params.len(), self.params.len(), "parameter count mismatch");
        Self {
            params,
            input_dim: self.input_dim,
            hidden: self.hidden.clone(),
            output_dim: self.output_dim,
        }
    }

    /// Forward pass; the result has one entry per action component,
    /// each in [-1, 1].
    pub fn forward(&self, observation: &[f64]) -> Vec<f64> {
        assert_eq!(observation.len(), self.input_dim, "observation length");
        let mut offset = 0;
        let mut activations: Vec<f64> = observation.to_vec();
        let mut widths: Vec<usize> = self.hidden.clone();
        widths.push(self.output_dim);
        for width in widths {
            let prev = activations.len();
            let mut next = Vec::with_capacity(width);
            for unit in 0..width {
                let row = &self.params[offset + unit * prev..offset + (unit + 1) * prev];
                let bias = self.params[offset + width * prev + unit];
                let z: f64 = row.iter().zip(&activations).map(|(w, x)| w * x).sum::<f64>() + bias;
                next.push(z.tanh());
            }
            offset += width * prev + width;
            activations = next;
        }
        activations
    }
}

/// Maps a policy output in [-1, 1] onto the action ranges: production
/// components span [0, manufacturing upper bound], shipment components
/// span [0, capacity]. -1 maps to 0 and +1 to the full range.
pub fn act(policy: &PolicyNet, observation: &[f64], cfg: &ScenarioConfig) -> ActionVector {
    let outputs = policy.forward(observation);
    assert_eq!(outputs.len(), cfg.action_dim(), "action dimension");
    let n_mfg = cfg.echelons.manufacturers.len();
    let mfg_upper = cfg.manufacturing_upper();
    let production = outputs[..n_mfg]
        .iter()
        .map(|o| (o + 1.0) / 2.0 * mfg_upper)
        .collect();
    let shipments = outputs[n_mfg..]
        .iter()
        .map(|o| (o + 1.0) / 2.0 * cfg.capacity)
        .collect();
    ActionVector {
        production,
        shipments,
    }
}

struct PolicyActor<'a> {
    net: &'a PolicyNet,
    cfg: &'a ScenarioConfig,
}

impl ActionSource for PolicyActor<'_> {
    fn action(&mut self, observation: &[f64], _period: u32) -> ActionVector {
        act(self.net, observation, self.cfg)
    }
}

/// Linear scalarisation of a reward vector on bounds-normalised values.
pub fn scalarise(r: &ObjectiveVector, w: &WeightVector, bounds: &NormalisationBounds) -> f64 {
    let normalised = bounds.normalise_objective(r);
    normalised.iter().zip(&w.0).map(|(v, wb)| v * wb).sum()
}

/// Search hyperparameters shared by the baseline and the decomposition
/// search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Discount applied to penalised returns during improvement.
    pub discount: f64,
    /// Perturbations sampled per iteration.
    pub es_population: usize,
    /// Initial perturbation scale.
    pub es_step: f64,
    /// Multiplicative step decay per iteration.
    pub es_step_decay: f64,
    /// Improvement iterations per weight (baseline) or per subproblem
    /// (decomposition).
    pub iterations: usize,
    /// Episodes averaged per candidate evaluation.
    pub eval_episodes: usize,
    pub psa_enabled: bool,
    pub psa_delta: f64,
    pub shared_pool_enabled: bool,
    /// Iterations between exchange points of the decomposition search.
    pub exchange_interval: usize,
    /// Number of subproblems of the decomposition search.
    pub population_size: usize,
    /// Neighbours each subproblem exchanges candidates with.
    pub neighbourhood_size: usize,
    /// Iterations spent probing each single objective when deriving the
    /// normalisation bounds.
    pub bounds_budget: usize,
    /// Hidden layer widths of the policy network.
    pub hidden: Vec<usize>,
    /// Accepted for configuration compatibility; the perturbation
    /// search has no inner update loop, so this knob has no effect.
    pub update_passes: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            discount: 0.99,
            es_population: 16,
            es_step: 0.1,
            es_step_decay: 0.999,
            iterations: 125,
            eval_episodes: 5,
            psa_enabled: false,
            psa_delta: 1.05,
            shared_pool_enabled: false,
            exchange_interval: 25,
            population_size: 6,
            neighbourhood_size: 1,
            bounds_budget: 25,
            hidden: vec![32],
            update_passes: 10,
            seed: 0,
        }
    }
}

/// One evaluated candidate: parameters plus its mean discounted and
/// mean raw returns, and its scalarised fitness under the weight of the
/// subproblem that generated it.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub params: Vec<f64>,
    pub mean_discounted: ObjectiveVector,
    pub mean_raw: ObjectiveVector,
    pub fitness: f64,
}

/// Resumable state of one greedy perturbation search.
pub struct EsState {
    pub policy: PolicyNet,
    pub weight: WeightVector,
    /// Scalarised discounted penalised return of the incumbent.
    pub fitness: f64,
    pub incumbent_discounted: ObjectiveVector,
    pub incumbent_raw: ObjectiveVector,
    pub sigma: f64,
    pub iterations_done: usize,
    rng: ChaCha8Rng,
    trace_rng: ChaCha8Rng,
}

fn evaluate_policy(
    net: &PolicyNet,
    cfg: &ScenarioConfig,
    trace_seeds: &[u64],
    discount: f64,
    on_rollout: &mut dyn FnMut(&ObjectiveVector),
) -> (ObjectiveVector, ObjectiveVector) {
    let mut raw = ObjectiveVector::ZERO;
    let mut discounted = ObjectiveVector::ZERO;
    for &seed in trace_seeds {
        let trace: DemandTrace = sample_trace(cfg, seed);
        let sim = Simulator::new(cfg, &trace).expect("validated scenario");
        let mut actor = PolicyActor { net, cfg };
        let rollout = sim.rollout(&mut actor, discount).expect("episode runs");
        on_rollout(&rollout.totals);
        raw = raw.add(&rollout.totals);
        discounted = discounted.add(&rollout.discounted);
    }
    let k = trace_seeds.len() as f64;
    (raw.scale(1.0 / k), discounted.scale(1.0 / k))
}

impl EsState {
    /// Builds the state and scores the initial incumbent on one fresh
    /// set of episode seeds.
    pub fn new(
        policy: PolicyNet,
        weight: WeightVector,
        cfg: &ScenarioConfig,
        search: &SearchConfig,
        bounds: &NormalisationBounds,
        rng: ChaCha8Rng,
        mut trace_rng: ChaCha8Rng,
    ) -> Self {
        let seeds: Vec<u64> = (0..search.eval_episodes).map(|_| trace_rng.gen()).collect();
        let (raw, discounted) = evaluate_policy(&policy, cfg, &seeds, search.discount, &mut |_| {});
        let fitness = scalarise(&discounted, &weight, bounds);
        Self {
            policy,
            weight,
            fitness,
            incumbent_discounted: discounted,
            incumbent_raw: raw,
            sigma: search.es_step,
            iterations_done: 0,
            rng,
            trace_rng,
        }
    }

    /// Runs `iterations` improvement steps. Every candidate is passed
    /// to `on_candidate`; every single episode's raw totals go to
    /// `on_rollout`.
    pub fn run(
        &mut self,
        cfg: &ScenarioConfig,
        search: &SearchConfig,
        bounds: &NormalisationBounds,
        iterations: usize,
        mut on_candidate: impl FnMut(&Candidate),
        mut on_rollout: impl FnMut(&ObjectiveVector),
    ) {
        for _ in 0..iterations {
            let seeds: Vec<u64> = (0..search.eval_episodes)
                .map(|_| self.trace_rng.gen())
                .collect();
            let mut best: Option<Candidate> = None;
            for _ in 0..search.es_population {
                let params: Vec<f64> = self
                    .policy
                    .params
                    .iter()
                    .map(|&p| p + self.sigma * self.rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let net = self.policy.with_params(params.clone());
                let (raw, discounted) =
                    evaluate_policy(&net, cfg, &seeds, search.discount, &mut on_rollout);
                let fitness = scalarise(&discounted, &self.weight, bounds);
                let candidate = Candidate {
                    params,
                    mean_discounted: discounted,
                    mean_raw: raw,
                    fitness,
                };
                on_candidate(&candidate);
                if best.as_ref().is_none_or(|b| candidate.fitness > b.fitness) {
                    best = Some(candidate);
                }
            }
            if let Some(best) = best {
                if best.fitness > self.fitness {
                    self.policy = self.policy.with_params(best.params);
                    self.fitness = best.fitness;
                    self.incumbent_discounted = best.mean_discounted;
                    self.incumbent_raw = best.mean_raw;
                }
            }
            self.sigma *= search.es_step_decay;
            self.iterations_done += 1;
        }
    }

    /// Scores the incumbent on fresh episode seeds without touching it;
    /// returns (mean raw totals, mean discounted return).
    pub fn final_evaluation(
        &mut self,
        cfg: &ScenarioConfig,
        search: &SearchConfig,
    ) -> (ObjectiveVector, ObjectiveVector) {
        let seeds: Vec<u64> = (0..search.eval_episodes)
            .map(|_| self.trace_rng.gen())
            .collect();
        evaluate_policy(&self.policy, cfg, &seeds, search.discount, &mut |_| {})
    }

    /// Re-prices the incumbent after a weight change.
    fn reweigh(&mut self, weight: WeightVector, bounds: &NormalisationBounds) {
        self.fitness = scalarise(&self.incumbent_discounted, &weight, bounds);
        self.weight = weight;
    }
}

/// Convenience wrapper over [`EsState`]: improves `policy` for `budget`
/// iterations under one weight and returns the incumbent.
#[allow(clippy::too_many_arguments)]
pub fn es_improve(
    policy: PolicyNet,
    weight: WeightVector,
    cfg: &ScenarioConfig,
    search: &SearchConfig,
    bounds: &NormalisationBounds,
    budget: usize,
    rng: ChaCha8Rng,
    trace_rng: ChaCha8Rng,
) -> PolicyNet {
    let mut state = EsState::new(policy, weight, cfg, search, bounds, rng, trace_rng);
    state.run(cfg, search, bounds, budget, |_| {}, |_| {});
    state.policy
}

fn check_search_config(search: &SearchConfig) {
    assert!(search.es_population >= 1, "need at least one perturbation");
    assert!(search.eval_episodes >= 1, "need at least one episode");
    assert!(search.es_step > 0.0, "perturbation scale must be positive");
    assert!(
        search.discount > 0.0 && search.discount <= 1.0,
        "discount must lie in (0, 1]"
    );
    assert!(search.psa_delta > 1.0 || !search.psa_enabled, "delta must exceed one");
    assert!(search.exchange_interval >= 1, "exchange interval must be positive");
    assert!(search.population_size >= 1, "need at least one subproblem");
}

/// Observed objective extrema of one single-objective probe run.
#[derive(Debug, Clone)]
pub struct ProbeExtrema {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// Bounds derivation report: the widened bounds plus the per-probe
/// extrema that produced them.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub bounds: NormalisationBounds,
    pub per_probe: Vec<ProbeExtrema>,
}

/// Derives normalisation bounds by improving one policy per objective
/// under that objective's unit weight for a short budget and recording
/// the extremes of every episode's raw totals, widened by 5% of each
/// range. The probes scalarise on raw values, which is order-equivalent
/// for unit weights.
pub fn compute_bounds(cfg: &ScenarioConfig, search: &SearchConfig) -> BoundsReport {
    let obs_dim = observation_dim(cfg);
    let identity = NormalisationBounds::identity(3);
    let mut lower = [f64::INFINITY; 3];
    let mut upper = [f64::NEG_INFINITY; 3];
    let mut per_probe = Vec::with_capacity(3);
    for objective in 0..3 {
        let mut probe_min = [f64::INFINITY; 3];
        let mut probe_max = [f64::NEG_INFINITY; 3];
        {
            let mut observe = |totals: &ObjectiveVector| {
                for (b, v) in totals.as_array().into_iter().enumerate() {
                    probe_min[b] = probe_min[b].min(v);
                    probe_max[b] = probe_max[b].max(v);
                }
            };
            let policy = PolicyNet::zeroed(obs_dim, search.hidden.clone(), cfg.action_dim());
            let mut state = EsState::new(
                policy,
                WeightVector::unit(3, objective),
                cfg,
                search,
                &identity,
                seeding::stream(search.seed, DOMAIN_BOUNDS, objective as u64),
                seeding::stream(search.seed, DOMAIN_BOUNDS_TRACE, objective as u64),
            );
            // The construction episode is not observed; fold in the
            // incumbent's mean so the initial policy contributes too.
            observe(&state.incumbent_raw.clone());
            state.run(
                cfg,
                search,
                &identity,
                search.bounds_budget,
                |_| {},
                &mut observe,
            );
        }
        for b in 0..3 {
            lower[b] = lower[b].min(probe_min[b]);
            upper[b] = upper[b].max(probe_max[b]);
        }
        per_probe.push(ProbeExtrema {
            min: probe_min,
            max: probe_max,
        });
    }
    let mut lo = Vec::with_capacity(3);
    let mut hi = Vec::with_capacity(3);
    for b in 0..3 {
        let range = upper[b] - lower[b];
        let pad = if range > 0.0 { 0.05 * range } else { 0.5 };
        lo.push(lower[b] - pad);
        hi.push(upper[b] + pad);
    }
    BoundsReport {
        bounds: NormalisationBounds::new(lo, hi).expect("padded bounds are ordered"),
        per_probe,
    }
}

/// Result of one weight of the scalarised baseline.
#[derive(Debug, Clone)]
pub struct WeightResult {
    pub weight: WeightVector,
    pub policy: PolicyNet,
    /// Mean raw episode totals of the final policy.
    pub raw: ObjectiveVector,
    /// Scalarised discounted fitness of the incumbent.
    pub fitness: f64,
}

#[derive(Debug)]
pub struct BaselineOutcome {
    pub front: Front,
    pub per_weight: Vec<WeightResult>,
    pub bounds: NormalisationBounds,
}

/// Runs one independent improvement per weight vector and filters the
/// resulting mean raw totals to a front. `weights` defaults to the
/// 21-vector simplex lattice with five partitions.
pub fn run_scalarised_baseline(
    cfg: &ScenarioConfig,
    search: &SearchConfig,
    weights: Option<Vec<WeightVector>>,
) -> BaselineOutcome {
    check_search_config(search);
    let weights = weights.unwrap_or_else(|| das_dennis(3, 5));
    let report = compute_bounds(cfg, search);
    let bounds = report.bounds;
    let obs_dim = observation_dim(cfg);
    let mut per_weight = Vec::with_capacity(weights.len());
    for (i, weight) in weights.into_iter().enumerate() {
        let policy = PolicyNet::zeroed(obs_dim, search.hidden.clone(), cfg.action_dim());
        let mut state = EsState::new(
            policy,
            weight.clone(),
            cfg,
            search,
            &bounds,
            seeding::stream(search.seed, DOMAIN_WEIGHT, i as u64),
            seeding::stream(search.seed, DOMAIN_WEIGHT_TRACE, i as u64),
        );
        state.run(cfg, search, &bounds, search.iterations, |_| {}, |_| {});
        let (raw, _) = state.final_evaluation(cfg, search);
        per_weight.push(WeightResult {
            weight,
            policy: state.policy,
            raw,
            fitness: state.fitness,
        });
    }
    let points: Vec<Vec<f64>> = per_weight.iter().map(|r| r.raw.to_vec()).collect();
    BaselineOutcome {
        front: pareto_filter(&points),
        per_weight,
        bounds,
    }
}

/// Multiplicative weight adaptation: relative to the nearest archive
/// neighbour (normalised coordinates, the point itself excluded), the
/// weight of every objective where the solution does not exceed its
/// neighbour grows by `delta`, every other weight shrinks by `delta`,
/// and the result renormalises onto the simplex.
pub fn psa_adapt(
    weight: &WeightVector,
    own_raw: &ObjectiveVector,
    archive_points: &[Vec<f64>],
    bounds: &NormalisationBounds,
    delta: f64,
) -> WeightVector {
    let own = bounds.normalise_objective(own_raw);
    let mut nearest: Option<(f64, &Vec<f64>)> = None;
    for point in archive_points {
        let candidate = bounds.normalise(point);
        if candidate == own {
            continue;
        }
        let dist: f64 = candidate
            .iter()
            .zip(&own)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if nearest.as_ref().is_none_or(|(d, _)| dist < *d) {
            nearest = Some((dist, point));
        }
    }
    let Some((_, neighbour_raw)) = nearest else {
        return weight.clone();
    };
    let neighbour = bounds.normalise(neighbour_raw);
    let mut adapted: Vec<f64> = weight
        .0
        .iter()
        .zip(own.iter().zip(&neighbour))
        .map(|(&w, (o, n))| if o <= n { w * delta } else { w / delta })
        .collect();
    let total: f64 = adapted.iter().sum();
    for w in &mut adapted {
        *w /= total;
    }
    WeightVector(adapted)
}

/// Initial subproblem weights: the centroid for a single subproblem,
/// otherwise the smallest simplex lattice covering the population.
pub fn morld_weights(population_size: usize) -> Vec<WeightVector> {
    assert!(population_size >= 1);
    if population_size == 1 {
        return vec![WeightVector::centroid(3)];
    }
    let mut partitions = 1;
    loop {
        let lattice = das_dennis(3, partitions);
        if lattice.len() >= population_size {
            return lattice.into_iter().take(population_size).collect();
        }
        partitions += 1;
    }
}

fn weight_distance(a: &WeightVector, b: &WeightVector) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Per-exchange-round progress of the decomposition search.
#[derive(Debug, Clone)]
pub struct RoundStats {
    pub round: usize,
    pub iterations_done: usize,
    pub archive_hypervolume: f64,
    pub archive_eum: Option<f64>,
    pub archive_sparsity: Option<f64>,
    pub archive_size: usize,
    /// Incumbent fitness per subproblem after the exchange.
    pub per_sub_fitness: Vec<f64>,
    /// Cross-subproblem adoptions during the exchange.
    pub adoptions: usize,
}

/// Final state of one subproblem.
#[derive(Debug, Clone)]
pub struct SubProblemResult {
    pub weight_initial: WeightVector,
    pub weight_final: WeightVector,
    pub policy: PolicyNet,
    /// Mean raw episode totals of the final incumbent.
    pub raw: ObjectiveVector,
    pub fitness: f64,
}

#[derive(Debug)]
pub struct MorldOutcome {
    /// External archive: raw episode totals with the policy parameters
    /// that produced them as handles.
    pub archive: ParetoArchive<Vec<f64>>,
    pub history: Vec<RoundStats>,
    pub subproblems: Vec<SubProblemResult>,
    pub bounds: NormalisationBounds,
}

/// Runs the decomposition search: `population_size` weighted
/// subproblems improved in rounds of `exchange_interval` iterations.
/// At every exchange point each subproblem may adopt a neighbour's
/// candidate that scores better under its own weight (when the shared
/// pool is enabled), every candidate of the round is offered to the
/// external archive, and the weights adapt away from archive
/// neighbours (when weight adaptation is enabled).
pub fn run_morld(cfg: &ScenarioConfig, search: &SearchConfig) -> MorldOutcome {
    check_search_config(search);
    let report = compute_bounds(cfg, search);
    let bounds = report.bounds;
    let obs_dim = observation_dim(cfg);
    let weights = morld_weights(search.population_size);
    let n = weights.len();

    // Static neighbourhoods by weight proximity.
    let neighbourhoods: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| {
                weight_distance(&weights[i], &weights[a])
                    .partial_cmp(&weight_distance(&weights[i], &weights[b]))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order.truncate(search.neighbourhood_size);
            order
        })
        .collect();

    let mut subproblems: Vec<EsState> = weights
        .iter()
        .enumerate()
        .map(|(i, weight)| {
            EsState::new(
                PolicyNet::zeroed(obs_dim, search.hidden.clone(), cfg.action_dim()),
                weight.clone(),
                cfg,
                search,
                &bounds,
                seeding::stream(search.seed, DOMAIN_WEIGHT, i as u64),
                seeding::stream(search.seed, DOMAIN_WEIGHT_TRACE, i as u64),
            )
        })
        .collect();

    let mut archive: ParetoArchive<Vec<f64>> = ParetoArchive::new();
    for sub in &subproblems {
        archive.insert(sub.incumbent_raw.to_vec(), sub.policy.params.clone());
    }

    let eum_weights = das_dennis(3, 12);
    let reference = cfg.reference_point.as_array();
    let mut history = Vec::new();
    let record = |round: usize,
                      iterations_done: usize,
                      archive: &ParetoArchive<Vec<f64>>,
                      subs: &[EsState],
                      adoptions: usize| RoundStats {
        round,
        iterations_done,
        archive_hypervolume: archive.hypervolume(&reference),
        archive_eum: crate::pareto::eum(archive.points(), &eum_weights, &bounds).ok(),
        archive_sparsity: crate::pareto::sparsity(archive.points(), &bounds),
        archive_size: archive.len(),
        per_sub_fitness: subs.iter().map(|s| s.fitness).collect(),
        adoptions,
    };
    history.push(record(0, 0, &archive, &subproblems, 0));

    let mut remaining = search.iterations;
    let mut round = 0;
    let mut iterations_done = 0;
    while remaining > 0 {
        round += 1;
        let chunk = remaining.min(search.exchange_interval);
        remaining -= chunk;
        iterations_done += chunk;

        let mut round_candidates: Vec<Vec<Candidate>> = vec![Vec::new(); n];
        for (i, sub) in subproblems.iter_mut().enumerate() {
            let sink = &mut round_candidates[i];
            sub.run(cfg, search, &bounds, chunk, |c| sink.push(c.clone()), |_| {});
        }

        // Candidate adoption across neighbourhoods, in subproblem order.
        let mut adoptions = 0;
        if search.shared_pool_enabled {
            for i in 0..n {
                for &j in &neighbourhoods[i] {
                    for candidate in &round_candidates[j] {
                        let fitness = scalarise(
                            &candidate.mean_discounted,
                            &subproblems[i].weight,
                            &bounds,
                        );
                        if fitness > subproblems[i].fitness {
                            let sub = &mut subproblems[i];
                            sub.policy = sub.policy.with_params(candidate.params.clone());
                            sub.fitness = fitness;
                            sub.incumbent_discounted = candidate.mean_discounted;
                            sub.incumbent_raw = candidate.mean_raw;
                            adoptions += 1;
                        }
                    }
                }
            }
        }

        // Every candidate of the round feeds the external archive.
        for candidates in &round_candidates {
            for candidate in candidates {
                archive.insert(candidate.mean_raw.to_vec(), candidate.params.clone());
            }
        }

        if search.psa_enabled {
            for sub in subproblems.iter_mut() {
                let adapted = psa_adapt(
                    &sub.weight,
                    &sub.incumbent_raw,
                    archive.points(),
                    &bounds,
                    search.psa_delta,
                );
                if adapted != sub.weight {
                    sub.reweigh(adapted, &bounds);
                }
            }
        }

        history.push(record(round, iterations_done, &archive, &subproblems, adoptions));
    }

    let subproblems = subproblems
        .into_iter()
        .zip(weights)
        .map(|(mut sub, weight_initial)| {
            let (raw, _) = sub.final_evaluation(cfg, search);
            SubProblemResult {
                weight_initial,
                weight_final: sub.weight.clone(),
                policy: sub.policy,
                raw,
                fitness: sub.fitness,
            }
        })
        .collect();

    MorldOutcome {
        archive,
        history,
        subproblems,
        bounds,
    }
}
