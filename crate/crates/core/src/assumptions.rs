//! Structural (t1, s1, s2) and payoff (v0, v1, v2) assumptions.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::Result;
use crate::instance::Instance;
use crate::lattice::StateSpace;
use crate::model::{AgentId, Model};
use crate::utility::Utility;

/// Which assumptions hold for a model, with witnesses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// Every time entry is 0 or 1.
    pub t1: bool,
    /// Common team size k, when there is one.
    pub s1: Option<usize>,
    /// Every team has exactly two members.
    pub s2: bool,
    /// Joining a project strictly helps each new member, in every state.
    pub v0: bool,
    /// First (state, project, agent) violating v0.
    #[serde(skip)]
    pub v0_violation: Option<(usize, usize, AgentId)>,
    /// Utilities sum to the number of projects in every state.
    pub v1: bool,
    /// Utility is v times the number of projects joined; holds the fitted v.
    #[serde(skip)]
    pub v2: Option<Utility>,
}

impl AssumptionReport {
    pub fn holds_v2(&self) -> bool {
        self.v2.is_some()
    }

    pub fn holds_s1(&self) -> bool {
        self.s1.is_some()
    }

    /// Names of the assumptions that hold.
    pub fn holding(&self) -> Vec<&'static str> {
        let flags = [
            ("t1", self.t1),
            ("s1", self.holds_s1()),
            ("s2", self.s2),
            ("v0", self.v0),
            ("v1", self.v1),
            ("v2", self.holds_v2()),
        ];
        flags.iter().filter(|(_, b)| *b).map(|(n, _)| *n).collect()
    }
}

/// Check all six assumptions on an enumerated model.
pub fn check_assumptions(model: &Model, space: &StateSpace) -> Result<AssumptionReport> {
    Ok(Instance::new(model, space)?.assumptions().clone())
}

pub(crate) fn check(inst: &Instance) -> AssumptionReport {
    let model = inst.model();
    let space = inst.space();
    let tech = model.technology();
    let tol = inst.tol();

    let t1 = tech
        .projects()
        .iter()
        .all(|p| p.time().iter().all(|&t| t <= 1));
    let sizes: Vec<usize> = tech.projects().iter().map(|p| p.team_size()).collect();
    let s1 = match sizes.first() {
        Some(&k) if sizes.iter().all(|&s| s == k) => Some(k),
        _ => None,
    };
    let s2 = !sizes.is_empty() && sizes.iter().all(|&s| s == 2);

    let mut v0_violation = None;
    'outer: for x in 0..space.len() {
        for &y in space.hasse_up(x) {
            let p = space
                .state(y)
                .difference(space.state(x))
                .iter()
                .next()
                .expect("covering states differ by one project");
            for i in tech.project(p).participants() {
                if !inst.prefers(i, y, x) {
                    v0_violation = Some((x, p, i));
                    break 'outer;
                }
            }
        }
    }

    let v1 = (0..space.len()).all(|x| {
        let total = inst.profile(x).iter().fold(Utility::zero(), |a, &b| a + b);
        let count = Utility::Exact(Rational64::from_integer(space.state(x).len() as i64));
        total.compare(count, tol).is_eq()
    });

    let memberships = |x: usize, i: usize| {
        space
            .state(x)
            .iter()
            .filter(|&p| tech.project(p).includes(AgentId(i)))
            .count() as i64
    };
    let fitted = (0..space.len()).find_map(|x| {
        (0..model.n()).find_map(|i| {
            let k = memberships(x, i);
            (k > 0).then(|| match inst.utility(x, AgentId(i)) {
                Utility::Exact(u) => Utility::Exact(u / k),
                Utility::Real(u) => Utility::Real(u / k as f64),
            })
        })
    });
    let v2 = fitted.filter(|&v| {
        v.gt(Utility::zero(), tol)
            && (0..space.len()).all(|x| {
                (0..model.n()).all(|i| {
                    let expect = v.scale(Rational64::from_integer(memberships(x, i)));
                    inst.utility(x, AgentId(i)).compare(expect, tol).is_eq()
                })
            })
    });

    AssumptionReport {
        t1,
        s1,
        s2,
        v0: v0_violation.is_none(),
        v0_violation,
        v1,
        v2,
    }
}
