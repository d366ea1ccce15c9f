//! Sparse Markov chains over the state space and their recurrent classes.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Which process a transition matrix describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "cost")]
pub enum ChainScheme {
    Unperturbed,
    Uniform,
    UniformDestructive,
    #[serde(serialize_with = "crate::report::ser_rational")]
    CoalitionWise(Rational64),
}

/// Transition probabilities that can be tested for positivity.
pub trait Probability: Copy {
    fn is_positive(&self) -> bool;
}

impl Probability for Rational64 {
    fn is_positive(&self) -> bool {
        *self > Rational64::zero()
    }
}

impl Probability for f64 {
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
}

/// One sparse row per state: `(column, probability)` sorted by column.
pub type SparseRows<W> = Vec<Vec<(usize, W)>>;

#[derive(Clone, Debug)]
pub struct ChainAnalysis<W> {
    pub transition: SparseRows<W>,
    pub absorbing: Vec<usize>,
    pub recurrent: Vec<usize>,
    pub scheme: ChainScheme,
}

impl<W: Probability> ChainAnalysis<W> {
    pub(crate) fn new(transition: SparseRows<W>, scheme: ChainScheme) -> Self {
        let (absorbing, recurrent) = classify_recurrent(&transition);
        ChainAnalysis {
            transition,
            absorbing,
            recurrent,
            scheme,
        }
    }

    pub fn len(&self) -> usize {
        self.transition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transition.is_empty()
    }

    /// Probability of the one-step move `from → to`.
    pub fn get(&self, from: usize, to: usize) -> Option<W> {
        let row = &self.transition[from];
        row.binary_search_by_key(&to, |&(c, _)| c)
            .ok()
            .map(|k| row[k].1)
    }
}

impl ChainAnalysis<Rational64> {
    pub fn to_f64(&self) -> ChainAnalysis<f64> {
        let rows = self
            .transition
            .iter()
            .map(|row| row.iter().map(|&(c, p)| (c, rational_to_f64(p))).collect())
            .collect();
        ChainAnalysis {
            transition: rows,
            absorbing: self.absorbing.clone(),
            recurrent: self.recurrent.clone(),
            scheme: self.scheme,
        }
    }
}

pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Collapse `(column, weight)` pairs into a sorted sparse row.
pub(crate) fn collect_row<W, I>(entries: I) -> Vec<(usize, W)>
where
    W: Copy + std::ops::Add<Output = W>,
    I: IntoIterator<Item = (usize, W)>,
{
    let mut acc: BTreeMap<usize, W> = BTreeMap::new();
    for (c, w) in entries {
        acc.entry(c).and_modify(|v| *v = *v + w).or_insert(w);
    }
    acc.into_iter().collect()
}

/// Myopic team-wise dynamics: draw one project with probability
/// proportional to its weight; form it if feasible and every member gains.
pub fn build_unperturbed_chain(inst: &Instance) -> Result<ChainAnalysis<Rational64>> {
    let weights = inst.model().draw_weights();
    let total: u64 = weights.iter().sum();
    if total == 0 || weights.contains(&0) {
        return Err(Error::precondition(
            "draw weights must be strictly positive",
        ));
    }
    let total = i64::try_from(total).map_err(|_| Error::precondition("draw weights overflow"))?;
    let space = inst.space();
    let rows = (0..space.len())
        .map(|x| {
            let state = space.state(x);
            collect_row(weights.iter().enumerate().map(|(p, &q)| {
                let prob = Rational64::new(q as i64, total);
                let dest = if state.contains(p) {
                    x
                } else {
                    match space.index_of(&state.with(p)) {
                        Some(y) if inst.members_gain(p, y, x) => y,
                        _ => x,
                    }
                };
                (dest, prob)
            }))
        })
        .collect();
    Ok(ChainAnalysis::new(rows, ChainScheme::Unperturbed))
}

/// Recurrent states are those in sink strongly connected components;
/// absorbing states are the singleton sinks. Returns `(absorbing, recurrent)`.
pub fn classify_recurrent<W: Probability>(rows: &[Vec<(usize, W)>]) -> (Vec<usize>, Vec<usize>) {
    let graph = support_graph(rows);
    let mut comp_of = vec![0usize; rows.len()];
    let sccs = tarjan_scc(&graph);
    for (k, comp) in sccs.iter().enumerate() {
        for v in comp {
            comp_of[v.index()] = k;
        }
    }
    let mut absorbing = Vec::new();
    let mut recurrent = Vec::new();
    for comp in &sccs {
        let k = comp_of[comp[0].index()];
        let is_sink = comp.iter().all(|v| {
            rows[v.index()]
                .iter()
                .all(|&(c, p)| !p.is_positive() || comp_of[c] == k)
        });
        if is_sink {
            recurrent.extend(comp.iter().map(|v| v.index()));
            if comp.len() == 1 {
                absorbing.push(comp[0].index());
            }
        }
    }
    absorbing.sort_unstable();
    recurrent.sort_unstable();
    (absorbing, recurrent)
}

pub(crate) fn support_graph<W: Probability>(rows: &[Vec<(usize, W)>]) -> DiGraph<(), ()> {
    let mut graph = DiGraph::<(), ()>::with_capacity(rows.len(), 0);
    for _ in 0..rows.len() {
        graph.add_node(());
    }
    for (r, row) in rows.iter().enumerate() {
        for &(c, p) in row {
            if p.is_positive() && c != r {
                graph.add_edge(NodeIndex::new(r), NodeIndex::new(c), ());
            }
        }
    }
    graph
}

/// Whether every row of an exact matrix sums to one.
pub fn rows_sum_to_one(rows: &[Vec<(usize, Rational64)>]) -> bool {
    rows.iter()
        .all(|row| row.iter().fold(Rational64::zero(), |a, &(_, p)| a + p) == Rational64::one())
}
