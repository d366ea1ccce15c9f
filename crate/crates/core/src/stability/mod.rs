//! Static stability notions: myopic team-wise, coalitional (with switching
//! costs) and farsighted.

mod blocking;
mod farsighted;
mod mts;

pub(crate) use blocking::witness_coalition;
pub use blocking::{
    cost_thresholds, cs_set, find_blocking_operation, improving_moves, BlockingOperation,
    CostThresholds, ImprovingMove,
};
pub use farsighted::{farsighted_stable_sets, FarsightedMode, FarsightedSet, MoveGraph};
pub use mts::{is_mts, mts_set, pareto_dominator};
