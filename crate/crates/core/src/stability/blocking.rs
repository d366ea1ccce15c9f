//! Coalitional deviations: blocking operations, coalitionally stable states,
//! switching-cost thresholds and one-step improving moves.
//!
//! A deviation from `x` to a feasible `x'` is fully determined by the pair:
//! the removed set is `x \ x'` and the added set is `x' \ x`. The search
//! therefore runs over target states and, for each, over coalitions `C` with
//! `members(added) ⊆ C ⊆ gainers` that touch every removed project.

use std::cmp::Ordering;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{ensure_capacity, Result};
use crate::instance::Instance;
use crate::model::{check_cost, AgentId};
use crate::utility::Utility;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingOperation {
    /// State index of x.
    pub origin: usize,
    /// State index of (x \ y) ∪ z.
    pub target: usize,
    pub coalition: Vec<AgentId>,
    /// y, as project indices.
    pub removed: Vec<usize>,
    /// z, as project indices.
    pub added: Vec<usize>,
    #[serde(skip)]
    pub cost: Rational64,
}

/// A one-step improving move x → x' with its witnessing coalition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImprovingMove {
    pub target: usize,
    pub coalition: Vec<AgentId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostThresholds {
    /// Smallest worst-member gain over all blocking operations at zero cost.
    #[serde(skip)]
    pub low: Option<Utility>,
    /// Largest worst-member gain over all blocking operations at zero cost.
    #[serde(skip)]
    pub high: Option<Utility>,
    /// Number of blocking operations at zero cost.
    pub defined_over: usize,
}

impl CostThresholds {
    pub fn is_defined(&self) -> bool {
        self.defined_over > 0
    }

    pub fn low_exact(&self) -> Option<Rational64> {
        self.low.and_then(Utility::as_exact)
    }

    pub fn high_exact(&self) -> Option<Rational64> {
        self.high.and_then(Utility::as_exact)
    }
}

fn check_guards(inst: &Instance) -> Result<()> {
    let g = inst.model().guards();
    ensure_capacity("agents in coalition search", g.max_coalition_n, inst.n())?;
    ensure_capacity(
        "projects in coalition search",
        g.max_blocking_projects,
        inst.model().technology().len(),
    )
}

/// Everything needed to decide which coalitions can carry out x → x'.
struct Deviation {
    /// Agents whose net gain is strictly positive.
    gainers: u64,
    /// Members of the added projects; all must be in the coalition.
    required: u64,
    /// Member mask of each removed project; each must meet the coalition.
    removed_masks: Vec<u64>,
    removed: Vec<usize>,
    added: Vec<usize>,
    /// Gross gains u_i(x') − u_i(x).
    gains: Vec<Utility>,
}

impl Deviation {
    fn new(inst: &Instance, x: usize, target: usize, c: Rational64) -> Option<Deviation> {
        if x == target {
            return None;
        }
        let space = inst.space();
        let tech = inst.model().technology();
        let (from, to) = (space.state(x), space.state(target));
        let removed: Vec<usize> = from.difference(to).iter().collect();
        let added: Vec<usize> = to.difference(from).iter().collect();
        let removed_masks: Vec<u64> = removed
            .iter()
            .map(|&p| tech.project(p).member_mask())
            .collect();
        let required = added
            .iter()
            .fold(0, |m, &p| m | tech.project(p).member_mask());

        let tol = inst.tol();
        let mut gainers = 0u64;
        let mut gains = Vec::with_capacity(inst.n());
        for i in 0..inst.n() {
            let gain = inst.utility(target, AgentId(i)) - inst.utility(x, AgentId(i));
            let exits = removed_masks.iter().filter(|&&m| m >> i & 1 == 1).count() as i64;
            let net = if c.is_zero() {
                gain
            } else {
                gain - Utility::Exact(Rational64::from_integer(exits)).scale(c)
            };
            if net.gt(Utility::zero(), tol) {
                gainers |= 1 << i;
            }
            gains.push(gain);
        }
        if required & !gainers != 0 {
            return None;
        }
        let dev = Deviation {
            gainers,
            required,
            removed_masks,
            removed,
            added,
            gains,
        };
        dev.is_valid(gainers).then_some(dev)
    }

    fn is_valid(&self, coalition: u64) -> bool {
        coalition != 0
            && coalition & !self.gainers == 0
            && self.required & !coalition == 0
            && self.removed_masks.iter().all(|&m| m & coalition != 0)
    }

    /// Every valid coalition, as masks.
    fn coalitions(&self) -> impl Iterator<Item = u64> + '_ {
        let free = self.gainers & !self.required;
        let mut sub = Some(free);
        std::iter::from_fn(move || {
            let s = sub?;
            sub = if s == 0 { None } else { Some((s - 1) & free) };
            Some(self.required | s)
        })
        .filter(|&c| self.is_valid(c))
    }

    /// Smallest coalition, ties broken lexicographically on member lists.
    fn smallest(&self) -> Option<u64> {
        self.coalitions().min_by(|&a, &b| coalition_order(a, b))
    }

    fn worst_gain(&self, coalition: u64, tol: f64) -> Utility {
        members(coalition)
            .map(|i| self.gains[i])
            .min_by(|a, b| a.compare(*b, tol))
            .expect("coalitions are non-empty")
    }
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn coalition_order(a: u64, b: u64) -> Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| members(a).cmp(members(b)))
}

fn agents(mask: u64) -> Vec<AgentId> {
    members(mask).map(AgentId).collect()
}

/// Witness coalition for x → target at cost c, if any.
pub(crate) fn witness_coalition(
    inst: &Instance,
    x: usize,
    target: usize,
    c: Rational64,
) -> Option<Vec<AgentId>> {
    Deviation::new(inst, x, target, c)?.smallest().map(agents)
}

/// Search for a blocking operation at `x` with switching cost `c`.
///
/// Among all witnesses the one returned has the smallest coalition, then the
/// lexicographically smallest coalition, removed set and added set.
pub fn find_blocking_operation(
    inst: &Instance,
    x: usize,
    c: Rational64,
) -> Result<Option<BlockingOperation>> {
    check_cost(c)?;
    check_guards(inst)?;
    let mut best: Option<(u64, Deviation, usize)> = None;
    for target in 0..inst.space().len() {
        let Some(dev) = Deviation::new(inst, x, target, c) else {
            continue;
        };
        let Some(coal) = dev.smallest() else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((bc, bd, _)) => coalition_order(coal, *bc)
                .then_with(|| dev.removed.cmp(&bd.removed))
                .then_with(|| dev.added.cmp(&bd.added))
                .is_lt(),
        };
        if better {
            best = Some((coal, dev, target));
        }
    }
    Ok(best.map(|(coal, dev, target)| BlockingOperation {
        origin: x,
        target,
        coalition: agents(coal),
        removed: dev.removed,
        added: dev.added,
        cost: c,
    }))
}

fn is_blocked(inst: &Instance, x: usize, c: Rational64) -> bool {
    (0..inst.space().len()).any(|t| Deviation::new(inst, x, t, c).is_some())
}

/// CS(c): states with no blocking operation at switching cost `c`.
pub fn cs_set(inst: &Instance, c: Rational64) -> Result<Vec<usize>> {
    check_cost(c)?;
    check_guards(inst)?;
    let cs: Vec<usize> = (0..inst.space().len())
        .filter(|&x| !is_blocked(inst, x, c))
        .collect();
    debug_assert!(cs.iter().all(|&x| super::is_mts(inst, x)));
    Ok(cs)
}

/// Switching-cost thresholds from an exhaustive scan of zero-cost blocking
/// operations.
pub fn cost_thresholds(inst: &Instance) -> Result<CostThresholds> {
    check_guards(inst)?;
    let tol = inst.tol();
    let zero = Rational64::zero();
    let mut low: Option<Utility> = None;
    let mut high: Option<Utility> = None;
    let mut count = 0usize;
    for x in 0..inst.space().len() {
        for t in 0..inst.space().len() {
            let Some(dev) = Deviation::new(inst, x, t, zero) else {
                continue;
            };
            for coal in dev.coalitions() {
                count += 1;
                let g = dev.worst_gain(coal, tol);
                if low.is_none_or(|l| g.lt(l, tol)) {
                    low = Some(g);
                }
                if high.is_none_or(|h| g.gt(h, tol)) {
                    high = Some(g);
                }
            }
        }
    }
    Ok(CostThresholds {
        low,
        high,
        defined_over: count,
    })
}

/// F(x): every state reachable from `x` by one profitable coalition
/// deviation at zero cost, in state order.
pub fn improving_moves(inst: &Instance, x: usize) -> Result<Vec<ImprovingMove>> {
    check_guards(inst)?;
    Ok((0..inst.space().len())
        .filter_map(|t| {
            witness_coalition(inst, x, t, Rational64::zero()).map(|coalition| ImprovingMove {
                target: t,
                coalition,
            })
        })
        .collect())
}
