//! Constrained elitist genetic search over whole-horizon decision
//! vectors: feasibility-first non-dominated sorting, crowding-distance
//! diversity, simulated binary crossover and polynomial mutation, with
//! a small offspring batch merged into the parent population each
//! generation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::demand::DemandTrace;
use crate::env::Simulator;
use crate::horizon::{evaluate_on, DecisionVector, EvalResult, HorizonError};
use crate::pareto::{dominates, pareto_filter, Front, NormalisationBounds, ParetoArchive};
use crate::scenario::ScenarioConfig;
use crate::seeding::{self, DOMAIN_NSGA};

/// Search hyperparameters.
#[derive(Debug, Clone)]
pub struct Nsga2Config {
    pub population_size: usize,
    pub offspring_per_generation: usize,
    pub crossover_probability: f64,
    pub crossover_eta: f64,
    pub mutation_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / n_genes`.
    pub mutation_probability: Option<f64>,
    pub generations: usize,
    pub seed: u64,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Self {
            population_size: 300,
            offspring_per_generation: 30,
            crossover_probability: 0.9,
            crossover_eta: 15.0,
            mutation_eta: 20.0,
            mutation_probability: None,
            generations: 200,
            seed: 0,
        }
    }
}

/// One evaluated member of the population.
#[derive(Debug, Clone)]
pub struct Individual {
    pub dv: DecisionVector,
    pub eval: EvalResult,
    pub rank: usize,
    pub crowding: f64,
}

/// Feasibility-first domination: any feasible solution beats any
/// infeasible one; two infeasible solutions compare by violation; two
/// feasible solutions compare by Pareto dominance.
pub fn constrained_dominates(a: &EvalResult, b: &EvalResult) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => dominates(&a.objectives.as_array(), &b.objectives.as_array()),
    }
}

/// Partitions the population into fronts of the constrained-domination
/// order, best first.
pub fn nondominated_sort(evals: &[EvalResult]) -> Vec<Vec<usize>> {
    let n = evals.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![vec![]; n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && constrained_dominates(&evals[i], &evals[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            }
        }
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Crowding distance within one front. Boundary solutions get infinity
/// per objective extreme; interior ones accumulate the normalised gap
/// between their neighbours. Objectives with zero range contribute
/// nothing; ties sort by index.
#[allow(clippy::needless_range_loop)] // column index drives the sort keys
pub fn crowding_distance(values: &[Vec<f64>]) -> Vec<f64> {
    let n = values.len();
    let mut distance = vec![0.0; n];
    if n == 0 {
        return distance;
    }
    let m = values[0].len();
    for b in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            values[i][b]
                .partial_cmp(&values[j][b])
                .unwrap()
                .then(i.cmp(&j))
        });
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = values[order[n - 1]][b] - values[order[0]][b];
        if range <= 0.0 {
            continue;
        }
        for k in 1..n.saturating_sub(1) {
            let gap = values[order[k + 1]][b] - values[order[k - 1]][b];
            if distance[order[k]].is_finite() {
                distance[order[k]] += gap / range;
            }
        }
    }
    distance
}

/// Simulated binary crossover with distribution index `eta`. With
/// probability `1 - prob` the children are plain copies; otherwise
/// every gene recombines and the children clamp into `[lower, upper]`.
pub fn sbx_crossover(
    p1: &[f64],
    p2: &[f64],
    lower: &[f64],
    upper: &[f64],
    eta: f64,
    prob: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(p1.len(), p2.len(), "parent length mismatch");
    if rng.gen::<f64>() > prob {
        return (p1.to_vec(), p2.to_vec());
    }
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p2.len());
    for g in 0..p1.len() {
        let (x1, x2) = (p1[g], p2[g]);
        let u: f64 = rng.gen();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
        };
        let mean = 0.5 * (x1 + x2);
        let span = 0.5 * beta * (x2 - x1);
        c1.push((mean - span).clamp(lower[g], upper[g]));
        c2.push((mean + span).clamp(lower[g], upper[g]));
    }
    (c1, c2)
}

/// Bounded polynomial mutation with distribution index `eta`: each gene
/// perturbs with probability `prob`, and the perturbation respects the
/// distance to its bounds, so a gene at a bound can only move inward.
pub fn polynomial_mutation(
    genes: &[f64],
    lower: &[f64],
    upper: &[f64],
    eta: f64,
    prob: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(genes.len());
    for g in 0..genes.len() {
        let y = genes[g];
        if rng.gen::<f64>() > prob {
            out.push(y);
            continue;
        }
        let (lo, hi) = (lower[g], upper[g]);
        let range = hi - lo;
        if range <= 0.0 {
            out.push(y);
            continue;
        }
        let d1 = (y - lo) / range;
        let d2 = (hi - y) / range;
        let u: f64 = rng.gen();
        let pow = 1.0 / (eta + 1.0);
        let delta = if u < 0.5 {
            let b = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
            b.powf(pow) - 1.0
        } else {
            let b = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - b.powf(pow)
        };
        out.push((y + delta * range).clamp(lo, hi));
    }
    out
}

/// Per-generation progress snapshot. The archive is the running
/// non-dominated set of every feasible individual evaluated so far.
#[derive(Debug, Clone)]
pub struct GenerationStats {
    pub generation: usize,
    pub evaluations: usize,
    pub archive_hypervolume: f64,
    pub archive_sparsity: Option<f64>,
    pub archive_size: usize,
    pub best_violation: f64,
    pub feasible_in_population: usize,
}

/// Outcome of a full run.
#[derive(Debug)]
pub struct Nsga2Outcome {
    /// Non-dominated feasible objectives of the final population.
    pub front: Front,
    /// Decision vectors behind the front, aligned with it.
    pub front_solutions: Vec<DecisionVector>,
    pub history: Vec<GenerationStats>,
    /// Running archive of all evaluated feasible objective vectors.
    pub archive: ParetoArchive<DecisionVector>,
}

fn tournament<'a>(pop: &'a [Individual], rng: &mut ChaCha8Rng) -> &'a Individual {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding) {
        a
    } else {
        b
    }
}

fn assign_ranks(pop: &mut [Individual]) {
    let evals: Vec<EvalResult> = pop.iter().map(|ind| ind.eval.clone()).collect();
    let fronts = nondominated_sort(&evals);
    for (rank, front) in fronts.iter().enumerate() {
        let values: Vec<Vec<f64>> = front
            .iter()
            .map(|&i| pop[i].eval.objectives.to_vec())
            .collect();
        let crowding = crowding_distance(&values);
        for (k, &i) in front.iter().enumerate() {
            pop[i].rank = rank;
            pop[i].crowding = crowding[k];
        }
    }
}

/// Runs the elitist loop on one or more fixed demand traces (common
/// random numbers; evaluations average over the traces).
pub fn run(
    cfg: &ScenarioConfig,
    nsga: &Nsga2Config,
    traces: &[DemandTrace],
) -> Result<Nsga2Outcome, HorizonError> {
    assert!(nsga.population_size >= 4, "population must hold a tournament");
    assert!(!traces.is_empty(), "at least one demand trace required");
    let sims: Vec<Simulator<'_>> = traces
        .iter()
        .map(|t| Simulator::new(cfg, t))
        .collect::<Result<_, _>>()?;
    let evaluate = |dv: &DecisionVector| -> Result<EvalResult, HorizonError> {
        let mut objectives = crate::objective::ObjectiveVector::ZERO;
        let mut violation = 0.0;
        for sim in &sims {
            let r = evaluate_on(sim, dv)?;
            objectives = objectives.add(&r.objectives);
            violation += r.violation;
        }
        let k = sims.len() as f64;
        let violation = violation / k;
        Ok(EvalResult {
            objectives: objectives.scale(1.0 / k),
            violation,
            feasible: violation == 0.0,
        })
    };

    let dim = cfg.decision_dim();
    let period_upper = crate::horizon::period_gene_upper(cfg);
    let upper: Vec<f64> = (0..dim).map(|i| period_upper[i % period_upper.len()]).collect();
    let lower = vec![0.0; dim];
    let mutation_prob = nsga.mutation_probability.unwrap_or(1.0 / dim as f64);

    let mut rng = seeding::stream(nsga.seed, DOMAIN_NSGA, 0);
    let mut archive: ParetoArchive<DecisionVector> = ParetoArchive::new();
    let mut evaluations = 0usize;

    let mut population: Vec<Individual> = (0..nsga.population_size)
        .map(|_| {
            let genes: Vec<f64> = (0..dim).map(|g| rng.gen_range(0.0..=upper[g])).collect();
            DecisionVector { genes }
        })
        .map(|dv| {
            let eval = evaluate(&dv)?;
            Ok(Individual {
                dv,
                eval,
                rank: 0,
                crowding: 0.0,
            })
        })
        .collect::<Result<_, HorizonError>>()?;
    evaluations += population.len();
    for ind in &population {
        if ind.eval.feasible {
            archive.insert(ind.eval.objectives.to_vec(), ind.dv.clone());
        }
    }
    assign_ranks(&mut population);

    let mut history = Vec::with_capacity(nsga.generations + 1);
    let record = |generation: usize,
                  evaluations: usize,
                  population: &[Individual],
                  archive: &ParetoArchive<DecisionVector>| {
        let archive_sparsity = if archive.len() >= 2 {
            NormalisationBounds::from_points(archive.points())
                .ok()
                .and_then(|b| crate::pareto::sparsity(archive.points(), &b))
        } else {
            None
        };
        GenerationStats {
            generation,
            evaluations,
            archive_hypervolume: archive.hypervolume(&cfg.reference_point.as_array()),
            archive_sparsity,
            archive_size: archive.len(),
            best_violation: population
                .iter()
                .map(|i| i.eval.violation)
                .fold(f64::INFINITY, f64::min),
            feasible_in_population: population.iter().filter(|i| i.eval.feasible).count(),
        }
    };
    history.push(record(0, evaluations, &population, &archive));

    for generation in 1..=nsga.generations {
        let mut offspring: Vec<Individual> = Vec::with_capacity(nsga.offspring_per_generation);
        while offspring.len() < nsga.offspring_per_generation {
            let p1 = tournament(&population, &mut rng).dv.genes.clone();
            let p2 = tournament(&population, &mut rng).dv.genes.clone();
            let (c1, c2) = sbx_crossover(
                &p1,
                &p2,
                &lower,
                &upper,
                nsga.crossover_eta,
                nsga.crossover_probability,
                &mut rng,
            );
            for child in [c1, c2] {
                if offspring.len() >= nsga.offspring_per_generation {
                    break;
                }
                let genes = polynomial_mutation(
                    &child,
                    &lower,
                    &upper,
                    nsga.mutation_eta,
                    mutation_prob,
                    &mut rng,
                );
                let dv = DecisionVector { genes };
                let eval = evaluate(&dv)?;
                evaluations += 1;
                if eval.feasible {
                    archive.insert(eval.objectives.to_vec(), dv.clone());
                }
                offspring.push(Individual {
                    dv,
                    eval,
                    rank: 0,
                    crowding: 0.0,
                });
            }
        }

        // (mu + lambda) merge, sort, truncate.
        population.extend(offspring);
        assign_ranks(&mut population);
        let evals: Vec<EvalResult> = population.iter().map(|i| i.eval.clone()).collect();
        let fronts = nondominated_sort(&evals);
        let mut keep: Vec<usize> = Vec::with_capacity(nsga.population_size);
        for front in fronts {
            if keep.len() + front.len() <= nsga.population_size {
                keep.extend(front);
            } else {
                let values: Vec<Vec<f64>> = front
                    .iter()
                    .map(|&i| population[i].eval.objectives.to_vec())
                    .collect();
                let crowding = crowding_distance(&values);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| {
                    crowding[b].partial_cmp(&crowding[a]).unwrap().then(a.cmp(&b))
                });
                for &k in order.iter().take(nsga.population_size - keep.len()) {
                    keep.push(front[k]);
                }
                break;
            }
        }
        keep.sort_unstable();
        for (slot, &i) in keep.iter().enumerate() {
            population.swap(slot, i);
        }
        population.truncate(nsga.population_size);
        assign_ranks(&mut population);

        history.push(record(generation, evaluations, &population, &archive));
    }

    let feasible: Vec<&Individual> = population.iter().filter(|i| i.eval.feasible).collect();
    let points: Vec<Vec<f64>> = feasible.iter().map(|i| i.eval.objectives.to_vec()).collect();
    let front = pareto_filter(&points);
    let front_solutions = front
        .provenance
        .iter()
        .map(|&i| feasible[i].dv.clone())
        .collect();
    Ok(Nsga2Outcome {
        front,
        front_solutions,
        history,
        archive,
    })
}
