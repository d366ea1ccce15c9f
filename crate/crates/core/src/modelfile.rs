//! JSON model files.
//!
//! Rationals are accepted as integers, `"a/b"` strings or `{"num", "den"}`
//! objects and always written as objects. Reals are accepted as numbers or
//! decimal strings and written as strings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ActivityId, DynamicsDefaults, Endowments, Guards, Model, PerturbationScheme, Project,
    Technology,
};
use crate::payoff::{PayoffFn, Publishing};
use crate::report::format_real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub agents: Vec<AgentEntry>,
    pub activities: Vec<String>,
    pub projects: Vec<ProjectEntry>,
    pub payoff: PayoffEntry,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub dynamics: DynamicsEntry,
    #[serde(default)]
    pub guards: GuardsEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub name: String,
    pub endowment: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectEntry {
    pub activity: String,
    /// Units of time per participating agent; absent agents contribute 0.
    pub time: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PayoffEntry {
    Linear {
        v: RationalRepr,
    },
    EqualSplit,
    Table {
        entries: Vec<TableEntry>,
    },
    Publishing {
        u: RealRepr,
        v: RealRepr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<Vec<RealRepr>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pgood: Option<Vec<RealRepr>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    /// Project indices of the state, in file order.
    pub state: Vec<usize>,
    /// One utility per agent, in agent order.
    pub utilities: Vec<RationalRepr>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub unique_activity_per_state: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric_tolerance: Option<RealRepr>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draw_weights: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<RealRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<PerturbationScheme>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardsEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_coalition_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_blocking_projects: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_farsighted_states: Option<usize>,
}

/// A rational in any accepted spelling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalRepr(pub Rational64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalInput {
    Int(i64),
    Text(String),
    Fraction { num: i64, den: i64 },
}

impl<'de> Deserialize<'de> for RationalRepr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let parsed = match RationalInput::deserialize(d)? {
            RationalInput::Int(v) => Ok(Rational64::from_integer(v)),
            RationalInput::Fraction { num, den } => fraction(num, den),
            RationalInput::Text(s) => parse_rational(&s),
        };
        parsed.map(RationalRepr).map_err(D::Error::custom)
    }
}

impl Serialize for RationalRepr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::report::ser_rational(&self.0, s)
    }
}

fn fraction(num: i64, den: i64) -> std::result::Result<Rational64, String> {
    if den == 0 {
        Err("rational with zero denominator".into())
    } else {
        Ok(Rational64::new(num, den))
    }
}

/// Parse `"a"` or `"a/b"`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational64, String> {
    let bad = || format!("`{s}` is not a rational (expected `a` or `a/b`)");
    match s.split_once('/') {
        Some((a, b)) => fraction(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => s
            .trim()
            .parse()
            .map(Rational64::from_integer)
            .map_err(|_| bad()),
    }
}

/// A real number written as a decimal string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealRepr(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RealInput {
    Number(f64),
    Text(String),
}

impl<'de> Deserialize<'de> for RealRepr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match RealInput::deserialize(d)? {
            RealInput::Number(v) => Ok(RealRepr(v)),
            RealInput::Text(s) => s
                .trim()
                .parse()
                .map(RealRepr)
                .map_err(|_| D::Error::custom(format!("`{s}` is not a decimal number"))),
        }
    }
}

impl Serialize for RealRepr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_real(self.0))
    }
}

impl fmt::Display for ModelFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_string_pretty(self).map_err(|_| fmt::Error)?;
        f.write_str(&text)
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn into_model(self) -> Result<Model> {
        let agents: Vec<String> = self.agents.iter().map(|a| a.name.clone()).collect();
        let endowments = Endowments::new(self.agents.iter().map(|a| a.endowment).collect())?;
        let n = agents.len();
        let agent_index = |name: &str, k: usize| {
            agents
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| Error::Schema(format!("projects[{k}].time: unknown agent `{name}`")))
        };
        let mut projects = Vec::with_capacity(self.projects.len());
        for (k, p) in self.projects.iter().enumerate() {
            let act = self
                .activities
                .iter()
                .position(|a| *a == p.activity)
                .ok_or_else(|| {
                    Error::Schema(format!(
                        "projects[{k}].activity: unknown activity `{}`",
                        p.activity
                    ))
                })?;
            let mut time = vec![0u32; n];
            for (name, &t) in &p.time {
                time[agent_index(name, k)?] = t;
            }
            projects.push(
                Project::new(ActivityId(act), time)
                    .map_err(|e| Error::Model(format!("projects[{k}]: {e}")))?,
            );
        }
        let np = projects.len();
        let technology = Technology::new(
            self.activities.clone(),
            projects,
            self.flags.unique_activity_per_state,
        )?;
        let payoff = match self.payoff {
            PayoffEntry::Linear { v } => PayoffFn::Linear { v: v.0 },
            PayoffEntry::EqualSplit => PayoffFn::EqualSplit,
            PayoffEntry::Table { entries } => {
                let mut table = BTreeMap::new();
                for (k, e) in entries.into_iter().enumerate() {
                    let mut key = e.state.clone();
                    key.sort_unstable();
                    let utilities = e.utilities.iter().map(|r| r.0).collect();
                    if table.insert(key, utilities).is_some() {
                        return Err(Error::Schema(format!(
                            "payoff.entries[{k}]: duplicate state {:?}",
                            e.state
                        )));
                    }
                }
                PayoffFn::Table(table)
            }
            PayoffEntry::Publishing { u, v, phi, pgood } => {
                let reals = |xs: Option<Vec<RealRepr>>| {
                    xs.map(|xs| xs.into_iter().map(|r| r.0).collect())
                        .unwrap_or_else(|| vec![1.0; np])
                };
                PayoffFn::Publishing(Publishing {
                    u: u.0,
                    v: v.0,
                    phi: reals(phi),
                    pgood: reals(pgood),
                })
            }
        };
        let defaults = Guards::default();
        let guards = Guards {
            max_states: self.guards.max_states.unwrap_or(defaults.max_states),
            max_coalition_n: self
                .guards
                .max_coalition_n
                .unwrap_or(defaults.max_coalition_n),
            max_blocking_projects: self
                .guards
                .max_blocking_projects
                .unwrap_or(defaults.max_blocking_projects),
            max_farsighted_states: self
                .guards
                .max_farsighted_states
                .unwrap_or(defaults.max_farsighted_states),
        };
        let mut builder = Model::builder(agents, endowments, technology, payoff)
            .dynamics(DynamicsDefaults {
                epsilon: self.dynamics.epsilon.map(|r| r.0),
                scheme: self.dynamics.scheme,
            })
            .guards(guards);
        if let Some(w) = self.dynamics.draw_weights {
            builder = builder.draw_weights(w);
        }
        if let Some(tol) = self.flags.numeric_tolerance {
            builder = builder.numeric_tolerance(tol.0);
        }
        builder.build()
    }

    /// The file describing `model`; loading it yields an equal model.
    pub fn from_model(model: &Model) -> Self {
        let tech = model.technology();
        let agents = model
            .agents()
            .iter()
            .zip(model.endowments().as_slice())
            .map(|(name, &endowment)| AgentEntry {
                name: name.clone(),
                endowment,
            })
            .collect();
        let projects = tech
            .projects()
            .iter()
            .map(|p| ProjectEntry {
                activity: tech.activities()[p.activity().0].clone(),
                time: p
                    .time()
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t > 0)
                    .map(|(i, &t)| (model.agents()[i].clone(), t))
                    .collect(),
            })
            .collect();
        let payoff = match model.payoff() {
            PayoffFn::Linear { v } => PayoffEntry::Linear {
                v: RationalRepr(*v),
            },
            PayoffFn::EqualSplit => PayoffEntry::EqualSplit,
            PayoffFn::Table(t) => PayoffEntry::Table {
                entries: t
                    .iter()
                    .map(|(state, us)| TableEntry {
                        state: state.clone(),
                        utilities: us.iter().map(|&u| RationalRepr(u)).collect(),
                    })
                    .collect(),
            },
            PayoffFn::Publishing(p) => PayoffEntry::Publishing {
                u: RealRepr(p.u),
                v: RealRepr(p.v),
                phi: Some(p.phi.iter().map(|&x| RealRepr(x)).collect()),
                pgood: Some(p.pgood.iter().map(|&x| RealRepr(x)).collect()),
            },
        };
        let g = model.guards();
        let d = model.dynamics();
        ModelFile {
            agents,
            activities: tech.activities().to_vec(),
            projects,
            payoff,
            flags: Flags {
                unique_activity_per_state: tech.unique_activity_per_state(),
                numeric_tolerance: Some(RealRepr(model.numeric_tolerance())),
            },
            dynamics: DynamicsEntry {
                draw_weights: Some(model.draw_weights().to_vec()),
                epsilon: d.epsilon.map(RealRepr),
                scheme: d.scheme,
            },
            guards: GuardsEntry {
                max_states: Some(g.max_states),
                max_coalition_n: Some(g.max_coalition_n),
                max_blocking_projects: Some(g.max_blocking_projects),
                max_farsighted_states: Some(g.max_farsighted_states),
            },
        }
    }
}

/// Parse and validate a model from JSON text.
pub fn parse_model(text: &str) -> Result<Model> {
    ModelFile::parse(text)?.into_model()
}

/// Read, parse and validate a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Pretty JSON for `model`.
pub fn to_json(model: &Model) -> String {
    ModelFile::from_model(model).to_string()
}
