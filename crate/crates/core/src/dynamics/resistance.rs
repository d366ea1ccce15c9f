//! Resistances between absorbing states and stochastic potentials.

use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::{ensure_capacity, Error, Result};
use crate::instance::Instance;
use crate::lattice::StateSpace;

use super::arborescence::min_in_tree_cost;
use super::chain::{build_unperturbed_chain, ChainAnalysis};

/// Largest state size for which destruction subsets are enumerated.
pub(crate) const MAX_DESTRUCTION_BITS: usize = 20;

/// Minimum number of project deletions needed to leave `x` for `x'` under
/// non-satiation: the projects of `x` not kept in `x'`.
pub fn resistance(space: &StateSpace, x: usize, target: usize) -> u32 {
    let (a, b) = (space.state(x), space.state(target));
    (a.len() - a.intersection_len(b)) as u32
}

/// Complete resistance digraph over a set of absorbing states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResistanceGraph {
    /// State indices of the nodes.
    pub nodes: Vec<usize>,
    /// `weights[a][b]`: resistance from `nodes[a]` to `nodes[b]`.
    pub weights: Vec<Vec<u32>>,
}

impl ResistanceGraph {
    pub fn new(space: &StateSpace, nodes: &[usize]) -> Self {
        let weights = nodes
            .iter()
            .map(|&a| nodes.iter().map(|&b| resistance(space, a, b)).collect())
            .collect();
        ResistanceGraph {
            nodes: nodes.to_vec(),
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Stochastic potential of every node and the minimisers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PotentialTable {
    pub nodes: Vec<usize>,
    pub gamma: Vec<u64>,
    /// State indices of minimum potential, ascending.
    pub ss: Vec<usize>,
}

impl PotentialTable {
    pub fn potential_of(&self, state: usize) -> Option<u64> {
        self.nodes
            .iter()
            .position(|&s| s == state)
            .map(|k| self.gamma[k])
    }
}

/// Minimum total resistance over spanning trees directed at each node.
pub fn stochastic_potentials(graph: &ResistanceGraph) -> Result<PotentialTable> {
    if graph.is_empty() {
        return Err(Error::precondition("no absorbing states"));
    }
    let m = graph.len();
    let gamma: Vec<u64> = (0..m)
        .map(|root| {
            min_in_tree_cost(m, root, |a, b| Some(u64::from(graph.weights[a][b])))
                .expect("complete digraph")
        })
        .collect();
    let min = *gamma.iter().min().expect("non-empty");
    let mut ss: Vec<usize> = (0..m)
        .filter(|&k| gamma[k] == min)
        .map(|k| graph.nodes[k])
        .collect();
    ss.sort_unstable();
    Ok(PotentialTable {
        nodes: graph.nodes.clone(),
        gamma,
        ss,
    })
}

/// Stochastically stable states together with the characterisation they
/// are compared against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StochasticStability {
    pub absorbing: Vec<usize>,
    pub potentials: PotentialTable,
    /// Minimisers of the stochastic potential.
    pub from_potentials: Vec<usize>,
    /// States with the largest number of projects.
    pub max_projects: Vec<usize>,
}

impl StochasticStability {
    pub fn agree(&self) -> bool {
        self.from_potentials == self.max_projects
    }
}

pub(crate) fn require_non_satiation(inst: &Instance) -> Result<()> {
    let report = inst.assumptions();
    if report.v0 {
        return Ok(());
    }
    let detail = match report.v0_violation {
        Some((x, p, i)) => format!(
            ": agent {} does not gain from joining {} at {}",
            inst.model().agent_name(i),
            inst.model().project_label(p),
            inst.model().state_label(inst.space().state(x)),
        ),
        None => String::new(),
    };
    Err(Error::precondition(format!(
        "closed-form resistances require non-satiation (v0){detail}"
    )))
}

pub(crate) fn stability_over(
    inst: &Instance,
    absorbing: Vec<usize>,
) -> Result<StochasticStability> {
    let graph = ResistanceGraph::new(inst.space(), &absorbing);
    let potentials = stochastic_potentials(&graph)?;
    Ok(StochasticStability {
        absorbing,
        from_potentials: potentials.ss.clone(),
        potentials,
        max_projects: inst.space().max_projects().to_vec(),
    })
}

/// Stochastically stable set of the myopic dynamics. Requires v0.
pub fn ss_set(inst: &Instance) -> Result<StochasticStability> {
    require_non_satiation(inst)?;
    let chain = build_unperturbed_chain(inst)?;
    stability_over(inst, chain.absorbing)
}

/// Shortest-path resistances: each tick may delete any set D of projects
/// at cost |D| and then either stop or take one step of the unperturbed
/// chain.
pub struct PathOracle {
    graph: DiGraph<(), u32>,
}

impl PathOracle {
    pub fn new(inst: &Instance) -> Result<Self> {
        let chain = build_unperturbed_chain(inst)?;
        Self::from_chain(inst.space(), &chain)
    }

    pub fn from_chain<W: super::chain::Probability>(
        space: &StateSpace,
        chain: &ChainAnalysis<W>,
    ) -> Result<Self> {
        let longest = space.by_size().len().saturating_sub(1);
        ensure_capacity(
            "projects per state in path oracle",
            MAX_DESTRUCTION_BITS,
            longest,
        )?;
        let mut graph = DiGraph::<(), u32>::with_capacity(space.len(), 0);
        for _ in 0..space.len() {
            graph.add_node(());
        }
        for y in 0..space.len() {
            let projects = space.state(y).indices();
            let mut best: std::collections::BTreeMap<usize, u32> = Default::default();
            for mask in 0u32..(1 << projects.len()) {
                let mut kept = space.state(y).clone();
                for (b, &p) in projects.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        kept.remove(p);
                    }
                }
                let mid = space.index_of(&kept).expect("closed under removal");
                let cost = mask.count_ones();
                let step = chain.transition[mid]
                    .iter()
                    .filter(|(_, prob)| prob.is_positive())
                    .map(|&(dest, _)| dest);
                for dest in std::iter::once(mid).chain(step) {
                    if dest != y {
                        best.entry(dest)
                            .and_modify(|c| *c = (*c).min(cost))
                            .or_insert(cost);
                    }
                }
            }
            for (dest, cost) in best {
                graph.add_edge(NodeIndex::new(y), NodeIndex::new(dest), cost);
            }
        }
        Ok(PathOracle { graph })
    }

    /// Minimum resistance from `source` to every state (None if unreachable).
    pub fn from_source(&self, source: usize) -> Vec<Option<u32>> {
        let dist = dijkstra(&self.graph, NodeIndex::new(source), None, |e| *e.weight());
        let mut out = vec![None; self.graph.node_count()];
        for (node, d) in dist {
            out[node.index()] = Some(d);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_has_zero_potential() {
        let g = ResistanceGraph {
            nodes: vec![7],
            weights: vec![vec![0]],
        };
        let t = stochastic_potentials(&g).unwrap();
        assert_eq!(t.gamma, vec![0]);
        assert_eq!(t.ss, vec![7]);
    }

    #[test]
    fn two_nodes_pick_the_harder_to_leave() {
        let g = ResistanceGraph {
            nodes: vec![0, 1],
            weights: vec![vec![0, 3], vec![1, 0]],
        };
        let t = stochastic_potentials(&g).unwrap();
        assert_eq!(t.gamma, vec![1, 3]);
        assert_eq!(t.ss, vec![0]);
    }
}
