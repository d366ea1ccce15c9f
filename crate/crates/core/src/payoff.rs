//! Payoff families: linear, equal split, explicit tables and the publishing
//! model.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::StateSpace;
use crate::model::{AgentId, Model, Technology};
use crate::state::State;
use crate::utility::Utility;

/// Parameters of the publishing payoff.
#[derive(Clone, Debug, PartialEq)]
pub struct Publishing {
    /// Value of a publication.
    pub u: f64,
    /// Value of a good idea, shared among the team.
    pub v: f64,
    /// Divulgative fitness per project.
    pub phi: Vec<f64>,
    /// Probability of a good idea per project.
    pub pgood: Vec<f64>,
}

impl Publishing {
    /// Unit fitness and certain good ideas for every project.
    pub fn uniform(u: f64, v: f64, num_projects: usize) -> Self {
        Publishing {
            u,
            v,
            phi: vec![1.0; num_projects],
            pgood: vec![1.0; num_projects],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PayoffFn {
    /// `v` per project joined.
    Linear {
        v: Rational64,
    },
    /// Each project is worth 1, split equally among its members.
    EqualSplit,
    /// Explicit utilities keyed by the sorted project indices of a state.
    Table(BTreeMap<Vec<usize>, Vec<Rational64>>),
    Publishing(Publishing),
}

impl PayoffFn {
    pub fn linear(v: Rational64) -> Self {
        PayoffFn::Linear { v }
    }

    /// Whether utilities are exact rationals.
    pub fn is_exact(&self) -> bool {
        !matches!(self, PayoffFn::Publishing(_))
    }

    pub(crate) fn validate(&self, tech: &Technology) -> Result<()> {
        match self {
            PayoffFn::Linear { v } if *v <= Rational64::zero() => {
                Err(Error::payoff(format!("linear payoff needs v > 0, got {v}")))
            }
            PayoffFn::Publishing(pb) => {
                if !(pb.u > 0.0 && pb.v > 0.0) {
                    return Err(Error::payoff("publishing payoff needs U > 0 and V > 0"));
                }
                if pb.phi.len() != tech.len() || pb.pgood.len() != tech.len() {
                    return Err(Error::payoff(
                        "publishing payoff needs one phi and one pgood per project",
                    ));
                }
                if let Some(k) = pb.phi.iter().position(|&f| !(f > 0.0 && f.is_finite())) {
                    return Err(Error::payoff(format!(
                        "phi of project {k} must be positive"
                    )));
                }
                if let Some(k) = pb.pgood.iter().position(|&g| !(g > 0.0 && g <= 1.0)) {
                    return Err(Error::payoff(format!(
                        "pgood of project {k} must lie in (0, 1]"
                    )));
                }
                Ok(())
            }
            PayoffFn::Table(t) => {
                for (key, row) in t {
                    if key.windows(2).any(|w| w[0] >= w[1]) || key.iter().any(|&p| p >= tech.len())
                    {
                        return Err(Error::payoff(format!(
                            "table key {key:?} is not a sorted list of project indices"
                        )));
                    }
                    if tech
                        .projects()
                        .first()
                        .is_some_and(|p| p.time().len() != row.len())
                    {
                        return Err(Error::payoff(format!(
                            "table row for {key:?} needs one utility per agent"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// u_i(x).
    pub fn eval(&self, tech: &Technology, x: &State, i: AgentId) -> Result<Utility> {
        let joined = || x.iter().filter(move |&p| tech.project(p).includes(i));
        Ok(match self {
            PayoffFn::Linear { v } => Utility::Exact(*v * joined().count() as i64),
            PayoffFn::EqualSplit => Utility::Exact(
                joined()
                    .map(|p| Rational64::new(1, tech.project(p).team_size() as i64))
                    .sum(),
            ),
            PayoffFn::Table(t) => {
                let key = x.indices();
                let row = t.get(&key).ok_or_else(|| {
                    Error::payoff(format!("utility table has no entry for state {key:?}"))
                })?;
                Utility::Exact(row[i.0])
            }
            PayoffFn::Publishing(pb) => {
                let total: f64 = x.iter().map(|p| pb.phi[p]).sum();
                Utility::Real(
                    joined()
                        .map(|p| {
                            pb.u * pb.phi[p] / total
                                + pb.v / tech.project(p).team_size() as f64 * pb.pgood[p]
                        })
                        .sum(),
                )
            }
        })
    }

    /// Utilities of all `n` agents at `x`.
    pub fn eval_profile(&self, tech: &Technology, x: &State, n: usize) -> Result<Vec<Utility>> {
        (0..n).map(|i| self.eval(tech, x, AgentId(i))).collect()
    }
}

/// Table builder rewarding a designated pair for working together.
///
/// Every agent earns `base` per project joined; members of a project whose
/// participant set is exactly `pair` earn an extra `bonus`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityBonus {
    pub base: Rational64,
    pub bonus: Rational64,
    pub pair: (AgentId, AgentId),
}

impl AffinityBonus {
    pub fn new(base: Rational64, bonus: Rational64, pair: (AgentId, AgentId)) -> Result<Self> {
        if base <= Rational64::zero() || bonus < Rational64::zero() {
            return Err(Error::payoff(
                "affinity bonus needs base > 0 and bonus >= 0",
            ));
        }
        Ok(AffinityBonus { base, bonus, pair })
    }

    pub fn utility(&self, tech: &Technology, x: &State, i: AgentId) -> Rational64 {
        let (a, b) = self.pair;
        x.iter()
            .map(|p| tech.project(p))
            .filter(|p| p.includes(i))
            .map(|p| {
                let members = p.participants();
                if members.len() == 2 && members.contains(&a) && members.contains(&b) {
                    self.base + self.bonus
                } else {
                    self.base
                }
            })
            .sum()
    }

    /// Materialise the table over every state of `space`.
    pub fn table(&self, tech: &Technology, space: &StateSpace, n: usize) -> PayoffFn {
        let t = space
            .states()
            .iter()
            .map(|x| {
                let row = (0..n).map(|i| self.utility(tech, x, AgentId(i))).collect();
                (x.indices(), row)
            })
            .collect();
        PayoffFn::Table(t)
    }
}

/// Both sides of the publishing marginal-utility identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalCheck {
    /// u_i(x ∪ {p'}) − u_i(x), from the payoff definition.
    pub direct: f64,
    /// Closed form; `None` when agent i is in no project of x (Φ = 0).
    pub closed_form: Option<f64>,
}

impl MarginalCheck {
    pub fn agrees(&self, tol: f64) -> Option<bool> {
        self.closed_form.map(|c| (c - self.direct).abs() <= tol)
    }
}

/// Marginal utility of agent `i` for joining the new project `p_new` at `x`.
///
/// With S = Σ_{q∈x} φ(q) and Φ the fitness of the projects of x that i
/// belongs to, the closed form is
/// `U·φ(p')·(S − Φ) / (S·(S + φ(p'))) + V·pgood(p')/|n(p')|`.
pub fn publishing_marginal_check(
    model: &Model,
    x: &State,
    p_new: usize,
    i: AgentId,
) -> Result<MarginalCheck> {
    let PayoffFn::Publishing(pb) = model.payoff() else {
        return Err(Error::precondition(
            "marginal check needs a publishing payoff",
        ));
    };
    let tech = model.technology();
    if p_new >= tech.len() {
        return Err(Error::precondition(format!("no project {p_new}")));
    }
    if x.contains(p_new) {
        return Err(Error::precondition(format!(
            "project {p_new} is already in the state"
        )));
    }
    let proj = tech.project(p_new);
    if !proj.includes(i) {
        return Err(Error::precondition(format!(
            "agent {i} is not a member of project {p_new}"
        )));
    }
    let grown = x.with(p_new);
    if !model.is_feasible(x) || !model.is_feasible(&grown) {
        return Err(Error::precondition("both x and x ∪ {p'} must be feasible"));
    }
    let payoff = model.payoff();
    let direct = payoff.eval(tech, &grown, i)?.to_f64() - payoff.eval(tech, x, i)?.to_f64();

    let total: f64 = x.iter().map(|q| pb.phi[q]).sum();
    let own: f64 = x
        .iter()
        .filter(|&q| tech.project(q).includes(i))
        .map(|q| pb.phi[q])
        .sum();
    let closed_form = (own > 0.0).then(|| {
        let phi = pb.phi[p_new];
        pb.u * phi * (total - own) / (total * (total + phi))
            + pb.v * pb.pgood[p_new] / proj.team_size() as f64
    });
    Ok(MarginalCheck {
        direct,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActivityId, Endowments, Project};

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    fn pair_tech() -> Technology {
        // Projects over 3 agents: {0,1}, {1,2}, {0,1,2}.
        let ps = vec![
            Project::new(ActivityId(0), vec![1, 1, 0]).unwrap(),
            Project::new(ActivityId(0), vec![0, 1, 1]).unwrap(),
            Project::new(ActivityId(0), vec![1, 1, 1]).unwrap(),
        ];
        Technology::new(vec!["a".into()], ps, false).unwrap()
    }

    #[test]
    fn empty_state_is_zero_in_every_family() {
        let tech = pair_tech();
        let x = State::empty(3);
        let fams = [
            PayoffFn::linear(r(1, 2)),
            PayoffFn::EqualSplit,
            PayoffFn::Publishing(Publishing::uniform(1.0, 1.0, 3)),
        ];
        for f in fams {
            assert_eq!(f.eval(&tech, &x, AgentId(1)).unwrap().to_f64(), 0.0);
        }
    }

    #[test]
    fn equal_split_sums_to_project_count() {
        let tech = pair_tech();
        let x = State::from_indices(3, [0, 1, 2]);
        let total: Rational64 = (0..3)
            .map(|i| {
                PayoffFn::EqualSplit
                    .eval(&tech, &x, AgentId(i))
                    .unwrap()
                    .as_exact()
                    .unwrap()
            })
            .sum();
        assert_eq!(total, r(3, 1));
        assert_eq!(
            PayoffFn::EqualSplit.eval(&tech, &x, AgentId(1)).unwrap(),
            Utility::Exact(r(1, 2) + r(1, 2) + r(1, 3))
        );
    }

    #[test]
    fn publishing_direct_substitution() {
        // Two two-member projects, agent 1 in both, U = V = phi = pgood = 1:
        // 1·(1/2 + 1/2) + 1·(1/2 + 1/2) = 2.
        let tech = pair_tech();
        let x = State::from_indices(3, [0, 1]);
        let f = PayoffFn::Publishing(Publishing::uniform(1.0, 1.0, 3));
        assert!((f.eval(&tech, &x, AgentId(1)).unwrap().to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn table_miss_names_the_state() {
        let tech = pair_tech();
        let f = PayoffFn::Table(BTreeMap::new());
        let err = f
            .eval(&tech, &State::from_indices(3, [1]), AgentId(0))
            .unwrap_err();
        assert!(err.to_string().contains("[1]"));
    }

    #[test]
    fn linear_rejects_non_positive_v() {
        assert!(PayoffFn::linear(r(0, 1)).validate(&pair_tech()).is_err());
    }

    fn pub_model() -> Model {
        let ps = vec![
            Project::new(ActivityId(0), vec![1, 1, 0, 0]).unwrap(),
            Project::new(ActivityId(0), vec![0, 0, 1, 1]).unwrap(),
            Project::new(ActivityId(0), vec![1, 0, 1, 0]).unwrap(),
            Project::new(ActivityId(0), vec![0, 1, 0, 1]).unwrap(),
        ];
        let tech = Technology::new(vec!["a".into()], ps, false).unwrap();
        let names = ["a1", "a2", "a3", "a4"].map(String::from).to_vec();
        Model::builder(
            names,
            Endowments::new(vec![2; 4]).unwrap(),
            tech,
            PayoffFn::Publishing(Publishing::uniform(1.0, 1.0, 4)),
        )
        .build()
        .unwrap()
    }

    #[test]
    fn marginal_null_first_term_when_member_of_every_project() {
        let m = pub_model();
        // Agent 0 is in project 0, the only project of x; joins project 2.
        let x = State::from_indices(4, [0]);
        let chk = publishing_marginal_check(&m, &x, 2, AgentId(0)).unwrap();
        assert!((chk.direct - 0.5).abs() < 1e-12);
        assert_eq!(chk.agrees(1e-9), Some(true));
    }

    #[test]
    fn marginal_empty_state_has_no_closed_form() {
        let m = pub_model();
        let chk = publishing_marginal_check(&m, &State::empty(4), 0, AgentId(0)).unwrap();
        assert_eq!(chk.closed_form, None);
        assert!((chk.direct - 1.5).abs() < 1e-12);
    }

    #[test]
    fn marginal_agrees_with_hand_computation() {
        // x = {p0 (a1,a2), p1 (a3,a4)}; agent a1 joins p2 (a1,a3).
        // Before: 1·(1/2) + 1/2 = 1. After: 1·(2/3) + 1/2 + 1/2 = 5/3. Gain 2/3.
        let m = pub_model();
        let x = State::from_indices(4, [0, 1]);
        let chk = publishing_marginal_check(&m, &x, 2, AgentId(0)).unwrap();
        assert!((chk.direct - 2.0 / 3.0).abs() < 1e-12);
        assert!((chk.closed_form.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_preconditions() {
        let m = pub_model();
        let x = State::from_indices(4, [0]);
        assert!(publishing_marginal_check(&m, &x, 0, AgentId(0)).is_err());
        assert!(publishing_marginal_check(&m, &x, 1, AgentId(0)).is_err());
    }
}
