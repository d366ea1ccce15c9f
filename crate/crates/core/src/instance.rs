//! A model paired with its enumerated state space and the utility of every
//! agent in every state.

use std::sync::OnceLock;

use crate::assumptions::{check, AssumptionReport};
use crate::error::Result;
use crate::lattice::StateSpace;
use crate::model::{AgentId, Model};
use crate::utility::Utility;

pub struct Instance<'a> {
    model: &'a Model,
    space: &'a StateSpace,
    utilities: Vec<Vec<Utility>>,
    assumptions: OnceLock<AssumptionReport>,
}

impl<'a> Instance<'a> {
    /// Evaluate the payoff on every state. Fails if a table payoff misses a state.
    pub fn new(model: &'a Model, space: &'a StateSpace) -> Result<Self> {
        let tech = model.technology();
        let utilities = space
            .states()
            .iter()
            .map(|x| model.payoff().eval_profile(tech, x, model.n()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance {
            model,
            space,
            utilities,
            assumptions: OnceLock::new(),
        })
    }

    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn space(&self) -> &'a StateSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn tol(&self) -> f64 {
        self.model.numeric_tolerance()
    }

    #[inline]
    pub fn utility(&self, x: usize, i: AgentId) -> Utility {
        self.utilities[x][i.0]
    }

    pub fn profile(&self, x: usize) -> &[Utility] {
        &self.utilities[x]
    }

    /// u_i(to) > u_i(from), strictly.
    #[inline]
    pub fn prefers(&self, i: AgentId, to: usize, from: usize) -> bool {
        self.utility(to, i).gt(self.utility(from, i), self.tol())
    }

    /// Whether every member of project `p` strictly gains when `from` grows to `to`.
    pub fn members_gain(&self, p: usize, to: usize, from: usize) -> bool {
        self.model
            .technology()
            .project(p)
            .participants()
            .into_iter()
            .all(|i| self.prefers(i, to, from))
    }

    /// Assumption report, computed once.
    pub fn assumptions(&self) -> &AssumptionReport {
        self.assumptions.get_or_init(|| check(self))
    }
}
