//! Whole-horizon decision-vector evaluation.
//!
//! A decision vector concatenates one action per period, period-major,
//! manufacturers first and then routes in scenario order. Evaluating it
//! replays the vector through the simulator and reports undiscounted
//! raw episode totals together with a constraint-violation measure: the
//! total units by which inventories went negative. A vector is feasible
//! exactly when that measure is zero.

use std::fmt;

use crate::demand::DemandTrace;
use crate::env::{ActionVector, EnvError, Simulator};
use crate::objective::ObjectiveVector;
use crate::scenario::ScenarioConfig;

#[derive(Debug)]
pub enum HorizonError {
    LengthMismatch { expected: usize, got: usize },
    Env(EnvError),
}

impl fmt::Display for HorizonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HorizonError::LengthMismatch { expected, got } => {
                write!(f, "decision vector has {got} genes, scenario needs {expected}")
            }
            HorizonError::Env(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for HorizonError {}

impl From<EnvError> for HorizonError {
    fn from(e: EnvError) -> Self {
        HorizonError::Env(e)
    }
}

/// A flat whole-horizon decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector {
    pub genes: Vec<f64>,
}

impl DecisionVector {
    pub fn zeros(cfg: &ScenarioConfig) -> Self {
        Self {
            genes: vec![0.0; cfg.decision_dim()],
        }
    }
}

/// Evaluation of one decision vector on one demand trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub objectives: ObjectiveVector,
    /// Total inventory shortfall in units across the episode.
    pub violation: f64,
    pub feasible: bool,
}

impl EvalResult {
    fn new(objectives: ObjectiveVector, violation: f64) -> Self {
        Self {
            objectives,
            violation,
            feasible: violation == 0.0,
        }
    }
}

/// Per-gene upper bounds for one period slice: the manufacturing bound
/// for manufacturer genes, the transport capacity for route genes.
/// Lower bounds are zero everywhere.
pub fn period_gene_upper(cfg: &ScenarioConfig) -> Vec<f64> {
    let mut upper = vec![cfg.manufacturing_upper(); cfg.echelons.manufacturers.len()];
    upper.extend(std::iter::repeat_n(cfg.capacity, cfg.routes.len()));
    upper
}

/// Componentwise clamp of a decision vector into its gene bounds.
pub fn repair_bounds(dv: &DecisionVector, cfg: &ScenarioConfig) -> DecisionVector {
    let upper = period_gene_upper(cfg);
    let dim = upper.len();
    let genes = dv
        .genes
        .iter()
        .enumerate()
        .map(|(i, &g)| g.clamp(0.0, upper[i % dim]))
        .collect();
    DecisionVector { genes }
}

/// Replays the decision vector period by period through a prepared
/// simulator and totals the raw rewards and the shortfall.
pub fn evaluate_on(sim: &Simulator<'_>, dv: &DecisionVector) -> Result<EvalResult, HorizonError> {
    let cfg = sim.config();
    let expected = cfg.decision_dim();
    if dv.genes.len() != expected {
        return Err(HorizonError::LengthMismatch {
            expected,
            got: dv.genes.len(),
        });
    }
    let dim = cfg.action_dim();
    let genes = &dv.genes;
    let mut source = |_obs: &[f64], t: u32| {
        let start = t as usize * dim;
        ActionVector::from_flat(cfg, &genes[start..start + dim])
    };
    let rollout = sim.rollout(&mut source, 1.0)?;
    let violation: f64 = rollout
        .log
        .iter()
        .flat_map(|info| info.inventories.iter())
        .map(|&inv| (-inv).max(0.0))
        .sum();
    Ok(EvalResult::new(rollout.totals, violation))
}

/// Convenience wrapper building the simulator from scratch.
pub fn evaluate(
    dv: &DecisionVector,
    cfg: &ScenarioConfig,
    trace: &DemandTrace,
) -> Result<EvalResult, HorizonError> {
    let sim = Simulator::new(cfg, trace)?;
    evaluate_on(&sim, dv)
}

/// Averages evaluations over several traces (common-random-number
/// replication); objectives and violations are means, and feasibility
/// requires a zero mean violation.
pub fn evaluate_averaged(
    dv: &DecisionVector,
    cfg: &ScenarioConfig,
    traces: &[DemandTrace],
) -> Result<EvalResult, HorizonError> {
    assert!(!traces.is_empty(), "at least one trace required");
    let mut objectives = ObjectiveVector::ZERO;
    let mut violation = 0.0;
    for trace in traces {
        let result = evaluate(dv, cfg, trace)?;
        objectives = objectives.add(&result.objectives);
        violation += result.violation;
    }
    let k = traces.len() as f64;
    Ok(EvalResult::new(objectives.scale(1.0 / k), violation / k))
}
