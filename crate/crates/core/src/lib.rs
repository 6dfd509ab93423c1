//! Multi-echelon, multi-objective supply chain optimisation toolkit.
//!
//! The crate bundles:
//! - a scenario model with three built-in networks of increasing size,
//! - a seeded non-stationary demand generator,
//! - a sequential simulator with vector rewards (profit, negative
//!   emission, negative service-level inequality),
//! - a whole-horizon decision-vector evaluator,
//! - Pareto dominance/archive utilities and quality indicators
//!   (hypervolume, expected utility, sparsity, averaged Hausdorff),
//! - a constrained NSGA-II and two policy-search solvers (weighted-sum
//!   baseline and a decomposition search with weight adaptation and a
//!   shared candidate pool).

pub mod demand;
pub mod env;
pub mod horizon;
pub mod nsga2;
pub mod objective;
pub mod pareto;
pub mod policy;
pub mod scenario;
pub mod seeding;

pub use objective::ObjectiveVector;
pub use scenario::{builtin_scenario, BuiltinScenario, NodeId, ScenarioConfig};
