//! Model primitives: agents, endowments, projects, technology and the model
//! itself.

use std::collections::HashSet;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::PayoffFn;
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Time endowments, one positive integer per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endowments(Vec<u32>);

impl Endowments {
    pub fn new(w: Vec<u32>) -> Result<Self> {
        if let Some(i) = w.iter().position(|&x| x == 0) {
            return Err(Error::model(format!(
                "endowment of agent {i} must be at least 1"
            )));
        }
        Ok(Endowments(w))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An activity carried out by a team; `time[i]` is agent i's contribution.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Project {
    activity: ActivityId,
    time: Vec<u32>,
}

impl Project {
    pub fn new(activity: ActivityId, time: Vec<u32>) -> Result<Self> {
        if time.iter().all(|&t| t == 0) {
            return Err(Error::model("project time vector must not be zero"));
        }
        Ok(Project { activity, time })
    }

    pub fn activity(&self) -> ActivityId {
        self.activity
    }

    pub fn time(&self) -> &[u32] {
        &self.time
    }

    /// The agents putting positive time into the project.
    pub fn participants(&self) -> Vec<AgentId> {
        self.time
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0)
            .map(|(i, _)| AgentId(i))
            .collect()
    }

    /// Participants as a bitmask (agents beyond 63 are not representable).
    pub(crate) fn member_mask(&self) -> u64 {
        self.time
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    pub fn includes(&self, i: AgentId) -> bool {
        self.time.get(i.0).is_some_and(|&t| t > 0)
    }

    pub fn team_size(&self) -> usize {
        self.time.iter().filter(|&&t| t > 0).count()
    }

    pub fn total_hours(&self) -> u32 {
        self.time.iter().sum()
    }
}

/// The admissible projects P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Technology {
    activities: Vec<String>,
    projects: Vec<Project>,
    unique_activity_per_state: bool,
}

impl Technology {
    pub fn new(
        activities: Vec<String>,
        projects: Vec<Project>,
        unique_activity_per_state: bool,
    ) -> Result<Self> {
        let mut seen_names = HashSet::new();
        for a in &activities {
            if !seen_names.insert(a) {
                return Err(Error::model(format!("duplicate activity `{a}`")));
            }
        }
        let width = projects.first().map(|p| p.time.len());
        let mut seen = HashSet::new();
        for (k, p) in projects.iter().enumerate() {
            if p.activity.0 >= activities.len() {
                return Err(Error::model(format!(
                    "project {k} refers to unknown activity {}",
                    p.activity.0
                )));
            }
            if Some(p.time.len()) != width {
                return Err(Error::model(format!(
                    "project {k} has a time vector of the wrong length"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::model(format!(
                    "project {k} duplicates (activity `{}`, {:?})",
                    activities[p.activity.0], p.time
                )));
            }
        }
        Ok(Technology {
            activities,
            projects,
            unique_activity_per_state,
        })
    }

    pub fn activities(&self) -> &[String] {
        &self.activities
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn project(&self, p: usize) -> &Project {
        &self.projects[p]
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    pub fn unique_activity_per_state(&self) -> bool {
        self.unique_activity_per_state
    }

    /// e(x): per-agent time used by the projects of `x`.
    pub fn resource_usage(&self, x: &State, n: usize) -> Vec<u32> {
        let mut e = vec![0u32; n];
        for p in x.iter() {
            for (ei, t) in e.iter_mut().zip(&self.projects[p].time) {
                *ei += t;
            }
        }
        e
    }

    /// True when no two projects of `x` share an activity.
    pub fn activities_distinct(&self, x: &State) -> bool {
        let mut used = HashSet::new();
        x.iter().all(|p| used.insert(self.projects[p].activity))
    }
}

/// ℓ(x).
pub fn project_count(x: &State) -> usize {
    x.len()
}

/// Size limits for the exponential parts of the analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guards {
    pub max_states: usize,
    pub max_coalition_n: usize,
    pub max_blocking_projects: usize,
    pub max_farsighted_states: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_states: 2_000_000,
            max_coalition_n: 12,
            max_blocking_projects: 24,
            max_farsighted_states: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationScheme {
    /// Errors both destroy existing and create addable projects.
    Uniform,
    /// Errors only destroy existing projects.
    UniformDestructive,
}

/// Optional defaults for the dynamics commands, carried by model files.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DynamicsDefaults {
    pub epsilon: Option<f64>,
    pub scheme: Option<PerturbationScheme>,
}

/// A team formation model (N, w, P, u) together with dynamics configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    agents: Vec<String>,
    endowments: Endowments,
    technology: Technology,
    payoff: PayoffFn,
    draw_weights: Vec<u64>,
    numeric_tolerance: f64,
    dynamics: DynamicsDefaults,
    guards: Guards,
}

impl Model {
    pub fn builder(
        agents: Vec<String>,
        endowments: Endowments,
        technology: Technology,
        payoff: PayoffFn,
    ) -> ModelBuilder {
        ModelBuilder {
            model: Model {
                draw_weights: vec![1; technology.len()],
                agents,
                endowments,
                technology,
                payoff,
                numeric_tolerance: 1e-9,
                dynamics: DynamicsDefaults::default(),
                guards: Guards::default(),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_name(&self, i: AgentId) -> &str {
        &self.agents[i.0]
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(AgentId)
    }

    pub fn endowments(&self) -> &Endowments {
        &self.endowments
    }

    pub fn technology(&self) -> &Technology {
        &self.technology
    }

    pub fn payoff(&self) -> &PayoffFn {
        &self.payoff
    }

    pub fn draw_weights(&self) -> &[u64] {
        &self.draw_weights
    }

    pub fn numeric_tolerance(&self) -> f64 {
        self.numeric_tolerance
    }

    pub fn dynamics(&self) -> &DynamicsDefaults {
        &self.dynamics
    }

    pub fn guards(&self) -> &Guards {
        &self.guards
    }

    /// Same model with a different payoff.
    pub fn with_payoff(&self, payoff: PayoffFn) -> Result<Model> {
        payoff.validate(&self.technology)?;
        Ok(Model {
            payoff,
            ..self.clone()
        })
    }

    pub fn with_guards(mut self, guards: Guards) -> Model {
        self.guards = guards;
        self
    }

    pub fn resource_usage(&self, x: &State) -> Vec<u32> {
        self.technology.resource_usage(x, self.n())
    }

    /// e(x) ≤ w, plus distinct activities when the technology asks for it.
    pub fn is_feasible(&self, x: &State) -> bool {
        let fits = self
            .resource_usage(x)
            .iter()
            .zip(self.endowments.as_slice())
            .all(|(e, w)| e <= w);
        fits && (!self.technology.unique_activity_per_state
            || self.technology.activities_distinct(x))
    }

    /// Label for a project, e.g. `a:ij` or `a:(1,2,0,0)` when times differ from 1.
    pub fn project_label(&self, p: usize) -> String {
        let proj = self.technology.project(p);
        let act = &self.technology.activities()[proj.activity.0];
        if proj.time.iter().all(|&t| t <= 1) {
            let team: Vec<&str> = proj
                .participants()
                .iter()
                .map(|&i| self.agents[i.0].as_str())
                .collect();
            format!("{act}:{}", team.join("+"))
        } else {
            let parts: Vec<String> = proj
                .time
                .iter()
                .enumerate()
                .filter(|(_, &t)| t > 0)
                .map(|(i, t)| format!("{}={t}", self.agents[i]))
                .collect();
            format!("{act}:{}", parts.join("+"))
        }
    }

    pub fn state_label(&self, x: &State) -> String {
        let parts: Vec<String> = x.iter().map(|p| self.project_label(p)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

pub struct ModelBuilder {
    model: Model,
}

impl ModelBuilder {
    pub fn draw_weights(mut self, w: Vec<u64>) -> Self {
        self.model.draw_weights = w;
        self
    }

    pub fn numeric_tolerance(mut self, tol: f64) -> Self {
        self.model.numeric_tolerance = tol;
        self
    }

    pub fn dynamics(mut self, d: DynamicsDefaults) -> Self {
        self.model.dynamics = d;
        self
    }

    pub fn guards(mut self, g: Guards) -> Self {
        self.model.guards = g;
        self
    }

    pub fn build(self) -> Result<Model> {
        let m = self.model;
        let n = m.agents.len();
        if n == 0 {
            return Err(Error::model("a model needs at least one agent"));
        }
        if n > 63 {
            return Err(Error::model("at most 63 agents are supported"));
        }
        let mut names = HashSet::new();
        for a in &m.agents {
            if !names.insert(a) {
                return Err(Error::model(format!("duplicate agent name `{a}`")));
            }
        }
        if m.endowments.len() != n {
            return Err(Error::model("one endowment per agent is required"));
        }
        for (k, p) in m.technology.projects.iter().enumerate() {
            if p.time.len() != n {
                return Err(Error::model(format!(
                    "project {k} has {} time entries for {n} agents",
                    p.time.len()
                )));
            }
            if let Some(i) = (0..n).find(|&i| p.time[i] > m.endowments.0[i]) {
                return Err(Error::model(format!(
                    "project {k} (`{}`) needs {} units of agent `{}` who has {}",
                    m.technology.activities[p.activity.0],
                    p.time[i],
                    m.agents[i],
                    m.endowments.0[i]
                )));
            }
        }
        if m.draw_weights.len() != m.technology.len() {
            return Err(Error::model("one draw weight per project is required"));
        }
        if m.draw_weights.contains(&0) {
            return Err(Error::model("draw weights must be strictly positive"));
        }
        if m.numeric_tolerance.is_nan() || m.numeric_tolerance < 0.0 {
            return Err(Error::model("numeric tolerance must be non-negative"));
        }
        if let Some(eps) = m.dynamics.epsilon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::model("epsilon must lie in (0, 1)"));
            }
        }
        m.payoff.validate(&m.technology)?;
        Ok(m)
    }
}

/// A switching cost must be non-negative.
pub(crate) fn check_cost(c: Rational64) -> Result<()> {
    if c < Rational64::from_integer(0) {
        Err(Error::precondition(format!(
            "switching cost {c} is negative"
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(act: usize, t: &[u32]) -> Project {
        Project::new(ActivityId(act), t.to_vec()).unwrap()
    }

    #[test]
    fn participants_and_hours() {
        assert_eq!(
            p(0, &[1, 1, 0, 0]).participants(),
            vec![AgentId(0), AgentId(1)]
        );
        assert_eq!(
            p(0, &[2, 1, 0, 3]).participants(),
            vec![AgentId(0), AgentId(1), AgentId(3)]
        );
        assert_eq!(p(0, &[1, 1, 0, 0]).total_hours(), 2);
        assert_eq!(p(0, &[1, 2, 0, 0]).total_hours(), 3);
        assert_eq!(p(0, &[0, 0, 5, 0]).total_hours(), 5);
    }

    #[test]
    fn zero_time_vector_rejected() {
        assert!(Project::new(ActivityId(0), vec![0, 0, 0]).is_err());
    }

    #[test]
    fn duplicate_projects_rejected() {
        let r = Technology::new(vec!["a".into()], vec![p(0, &[1, 1]), p(0, &[1, 1])], false);
        assert!(r.is_err());
        // Same team under different activities is fine.
        let ok = Technology::new(
            vec!["a".into(), "b".into()],
            vec![p(0, &[1, 1]), p(1, &[1, 1])],
            false,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn zero_endowment_rejected() {
        assert!(Endowments::new(vec![1, 0]).is_err());
    }
}
