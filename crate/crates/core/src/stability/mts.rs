use crate::instance::Instance;
use crate::model::AgentId;

/// Myopic team-wise stability of state `x`.
///
/// (i) no member of a project prefers the state without it;
/// (ii) no addable project makes all of its members strictly better off.
pub fn is_mts(inst: &Instance, x: usize) -> bool {
    let space = inst.space();
    let tech = inst.model().technology();
    let state = space.state(x);

    let keeps = state.iter().all(|p| {
        let smaller = space
            .index_of(&state.without(p))
            .expect("state spaces are closed under removal");
        tech.project(p)
            .participants()
            .into_iter()
            .all(|i| !inst.prefers(i, smaller, x))
    });
    if !keeps {
        return false;
    }
    space.hasse_up(x).iter().all(|&y| {
        let p = space
            .state(y)
            .difference(state)
            .iter()
            .next()
            .expect("one project");
        !inst.members_gain(p, y, x)
    })
}

pub fn mts_set(inst: &Instance) -> Vec<usize> {
    (0..inst.space().len())
        .filter(|&x| is_mts(inst, x))
        .collect()
}

/// A state Pareto-dominating `x`: everyone weakly better, someone strictly.
pub fn pareto_dominator(inst: &Instance, x: usize) -> Option<usize> {
    let tol = inst.tol();
    let n = inst.n();
    (0..inst.space().len()).find(|&y| {
        y != x
            && (0..n).all(|i| {
                !inst
                    .utility(y, AgentId(i))
                    .lt(inst.utility(x, AgentId(i)), tol)
            })
            && (0..n).any(|i| inst.prefers(AgentId(i), y, x))
    })
}
