//! Coalition-wise dynamics with a per-exit switching cost.
//!
//! Each tick draws a pair (y, z) of project sets, each project included in
//! either set independently with probability ½. The move x → (x \ y) ∪ z
//! happens when y ⊆ x, z is disjoint from x, the target is feasible and some
//! coalition profits net of the switching cost; otherwise the state stays.

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{ensure_capacity, Error, Result};
use crate::instance::Instance;
use crate::model::check_cost;
use crate::stability::{cost_thresholds, CostThresholds};
use crate::utility::Utility;

use super::chain::{ChainAnalysis, ChainScheme};
use super::resistance::{require_non_satiation, stability_over, StochasticStability};

/// Largest |P| for which the pair probability 4^-|P| is representable.
const MAX_PAIR_PROJECTS: usize = 30;

fn require_high_cost(inst: &Instance, c: Rational64) -> Result<CostThresholds> {
    check_cost(c)?;
    let thresholds = cost_thresholds(inst)?;
    if let Some(high) = thresholds.high {
        if Utility::Exact(c).lt(high, inst.tol()) {
            return Err(Error::precondition(format!(
                "switching cost {c} is below the upper threshold c_high = {high}; \
                 absorbing and stochastically stable sets are characterised only from there on"
            )));
        }
    }
    Ok(thresholds)
}

/// Coalition-wise chain at switching cost `c`; refuses when `c < c_high`.
pub fn coalition_chain(inst: &Instance, c: Rational64) -> Result<ChainAnalysis<Rational64>> {
    require_high_cost(inst, c)?;
    let np = inst.model().technology().len();
    ensure_capacity("projects in coalition-wise chain", MAX_PAIR_PROJECTS, np)?;
    let pair = Rational64::new(1, 1i64 << (2 * np));
    let n_states = inst.space().len();
    let rows = (0..n_states)
        .map(|x| {
            let moves: Vec<usize> = (0..n_states)
                .filter(|&t| crate::stability::witness_coalition(inst, x, t, c).is_some())
                .collect();
            let stay = Rational64::one() - pair * Rational64::from_integer(moves.len() as i64);
            let mut row: Vec<(usize, Rational64)> = moves.into_iter().map(|t| (t, pair)).collect();
            if stay > Rational64::zero() {
                row.push((x, stay));
            }
            row.sort_unstable_by_key(|&(col, _)| col);
            row
        })
        .collect();
    Ok(ChainAnalysis::new(rows, ChainScheme::CoalitionWise(c)))
}

/// Stochastically stable states of the coalition-wise dynamics at cost `c`.
pub fn ss_with_costs(inst: &Instance, c: Rational64) -> Result<StochasticStability> {
    require_non_satiation(inst)?;
    let chain = coalition_chain(inst, c)?;
    stability_over(inst, chain.absorbing)
}
