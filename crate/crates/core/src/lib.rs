//! Team formation models: enumeration of feasible project portfolios and
//! their myopic, coalitional, farsighted and stochastic stability.
//!
//! ```
//! use teamform_core::{builtin_example, enumerate_states, Instance, ss_set};
//!
//! let model = builtin_example("EX1").unwrap();
//! let space = enumerate_states(&model).unwrap();
//! let inst = Instance::new(&model, &space).unwrap();
//! assert_eq!(space.len(), 35);
//! assert_eq!(ss_set(&inst).unwrap().from_potentials, space.max_projects());
//! ```

pub mod assumptions;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod instance;
pub mod lattice;
pub mod model;
pub mod modelfile;
pub mod payoff;
pub mod report;
pub mod simulate;
pub mod stability;
pub mod state;
pub mod utility;
pub mod verify;

pub use assumptions::{check_assumptions, AssumptionReport};
pub use dynamics::{
    build_unperturbed_chain, coalition_chain, perturbed_transition_matrix, ss_set, ss_with_costs,
    stationary_distribution, ChainAnalysis, PotentialTable, ResistanceGraph, StochasticStability,
};
pub use error::{Error, Result};
pub use fixtures::{builtin_example, EXAMPLES};
pub use instance::Instance;
pub use lattice::{enumerate_states, StateSpace};
pub use model::{
    ActivityId, AgentId, DynamicsDefaults, Endowments, Guards, Model, PerturbationScheme, Project,
    Technology,
};
pub use modelfile::{load_model, parse_model, ModelFile};
pub use payoff::{publishing_marginal_check, AffinityBonus, MarginalCheck, PayoffFn, Publishing};
pub use simulate::{compare_occupancy, run_simulation, OccupancyReport, SimulationConfig};
pub use stability::{
    cost_thresholds, cs_set, farsighted_stable_sets, find_blocking_operation, is_mts, mts_set,
    BlockingOperation, CostThresholds, FarsightedMode, FarsightedSet,
};
pub use state::State;
pub use utility::Utility;
pub use verify::{verify_propositions, Status, VerificationReport};
