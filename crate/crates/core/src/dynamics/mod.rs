//! Markov dynamics: the myopic chain, its perturbations, resistances,
//! stochastic potentials and the coalition-wise variant.

mod arborescence;
mod chain;
mod coalition;
mod resistance;
mod stationary;

pub use arborescence::{min_arborescence, min_in_tree_cost};
pub use chain::{
    build_unperturbed_chain, classify_recurrent, rows_sum_to_one, ChainAnalysis, ChainScheme,
    Probability, SparseRows,
};
pub use coalition::{coalition_chain, ss_with_costs};
pub use resistance::{
    resistance, ss_set, stochastic_potentials, PathOracle, PotentialTable, ResistanceGraph,
    StochasticStability,
};
pub use stationary::{
    mass_on, perturbed_transition_matrix, residual, stationary_distribution, DIRECT_SOLVE_LIMIT,
    RESIDUAL_TOLERANCE,
};
