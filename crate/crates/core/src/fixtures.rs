//! Built-in example models.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::lattice::StateSpace;
use crate::model::{ActivityId, AgentId, Endowments, Guards, Model, Project, Technology};
use crate::payoff::{AffinityBonus, PayoffFn, Publishing};

/// Name and one-line description of every built-in example.
pub const EXAMPLES: &[(&str, &str)] = &[
    ("EX1", "four agents, two activities, pairs ij/jk/km, endowment 2, linear payoff 1/2"),
    ("EX1-JK", "EX1 where the j-k pair earns a bonus of 1 per joint project on top of 1 per project"),
    ("EX2", "four agents with endowment 3, three activities, five unequal two-person teams, linear payoff 1/2"),
    ("EX3", "two three-person teams made mutually exclusive by a shared agent h with endowment 1"),
    ("MAR", "marriage market: three women, four men, seven admissible couples, equal split"),
    ("PUB", "publishing model: four authors with endowment 2, every team of two or more, U = V = 1"),
];

/// Look up a built-in example by name, ignoring case.
pub fn builtin_example(name: &str) -> Result<Model> {
    match name.to_ascii_uppercase().as_str() {
        "EX1" => ex1(),
        "EX1-JK" => ex1_jk(),
        "EX2" => ex2(),
        "EX3" => ex3(),
        "MAR" => mar(),
        "PUB" => publishing(),
        _ => Err(Error::Schema(format!(
            "unknown example `{name}` (known: {})",
            EXAMPLES
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn half() -> PayoffFn {
    PayoffFn::linear(Rational64::new(1, 2))
}

fn ex1_technology() -> Result<Technology> {
    let teams: [[u32; 4]; 3] = [[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]];
    let mut projects = Vec::new();
    for team in teams {
        for act in 0..2 {
            projects.push(Project::new(ActivityId(act), team.to_vec())?);
        }
    }
    Technology::new(names(&["a", "b"]), projects, false)
}

fn ex1() -> Result<Model> {
    Model::builder(
        names(&["i", "j", "k", "m"]),
        Endowments::new(vec![2; 4])?,
        ex1_technology()?,
        half(),
    )
    .build()
}

fn ex1_jk() -> Result<Model> {
    let tech = ex1_technology()?;
    let w = Endowments::new(vec![2; 4])?;
    let space = StateSpace::enumerate(&w, &tech, Guards::default().max_states)?;
    let one = Rational64::from_integer(1);
    let payoff = AffinityBonus::new(one, one, (AgentId(1), AgentId(2)))?.table(&tech, &space, 4);
    Model::builder(names(&["i", "j", "k", "m"]), w, tech, payoff).build()
}

fn ex2() -> Result<Model> {
    let teams: [[u32; 4]; 5] = [
        [1, 2, 0, 0],
        [2, 1, 0, 0],
        [0, 1, 1, 0],
        [0, 0, 1, 2],
        [0, 0, 2, 1],
    ];
    let mut projects = Vec::new();
    for team in teams {
        for act in 0..3 {
            projects.push(Project::new(ActivityId(act), team.to_vec())?);
        }
    }
    Model::builder(
        names(&["i", "j", "k", "m"]),
        Endowments::new(vec![3; 4])?,
        Technology::new(names(&["a", "b", "c"]), projects, false)?,
        half(),
    )
    .build()
}

fn ex3() -> Result<Model> {
    let projects = vec![
        Project::new(ActivityId(0), vec![1, 1, 0, 0, 1])?,
        Project::new(ActivityId(0), vec![0, 0, 1, 1, 1])?,
    ];
    Model::builder(
        names(&["i", "j", "k", "m", "h"]),
        Endowments::new(vec![1; 5])?,
        Technology::new(names(&["a"]), projects, false)?,
        half(),
    )
    .build()
}

fn mar() -> Result<Model> {
    let agents = names(&["w1", "w2", "w3", "m1", "m2", "m3", "m4"]);
    let couples = [(0, 3), (0, 4), (1, 3), (1, 4), (2, 4), (2, 5), (2, 6)];
    let projects = couples
        .iter()
        .map(|&(w, m)| {
            let mut t = vec![0; 7];
            t[w] = 1;
            t[m] = 1;
            Project::new(ActivityId(0), t)
        })
        .collect::<Result<Vec<_>>>()?;
    Model::builder(
        agents,
        Endowments::new(vec![1; 7])?,
        Technology::new(names(&["a"]), projects, false)?,
        PayoffFn::EqualSplit,
    )
    .build()
}

fn publishing() -> Result<Model> {
    let mut projects = Vec::new();
    for code in 0..81u32 {
        let t: Vec<u32> = (0..4).rev().map(|d| code / 3u32.pow(d) % 3).collect();
        if t.iter().filter(|&&v| v > 0).count() >= 2 {
            projects.push(Project::new(ActivityId(0), t)?);
        }
    }
    let np = projects.len();
    Model::builder(
        names(&["a1", "a2", "a3", "a4"]),
        Endowments::new(vec![2; 4])?,
        Technology::new(names(&["a"]), projects, false)?,
        PayoffFn::Publishing(Publishing::uniform(1.0, 1.0, np)),
    )
    .build()
}
