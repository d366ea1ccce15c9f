//! The lattice X of feasible states, its covering relation, and the sets M
//! (maximal states) and L (states with the most projects).

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{ensure_capacity, Result};
use crate::model::{Endowments, Model, Technology};
use crate::state::{canonical_cmp, State};

#[derive(Clone, Debug)]
pub struct StateSpace {
    num_projects: usize,
    states: Vec<State>,
    index: HashMap<State, usize>,
    hasse_up: Vec<Vec<usize>>,
    maximal: Vec<usize>,
    max_projects: Vec<usize>,
    by_size: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    num_classes: usize,
}

/// Enumerate every feasible state of `model`, bounded by its state guard.
pub fn enumerate_states(model: &Model) -> Result<StateSpace> {
    StateSpace::enumerate(
        model.endowments(),
        model.technology(),
        model.guards().max_states,
    )
}

impl StateSpace {
    /// Breadth-first closure of the empty state under single-project additions.
    pub fn enumerate(w: &Endowments, tech: &Technology, max_states: usize) -> Result<Self> {
        let n = w.len();
        let np = tech.len();
        let w = w.as_slice();
        let empty = State::empty(np);

        let mut seen: HashSet<State> = HashSet::new();
        let mut found: Vec<State> = Vec::new();
        let mut queue: VecDeque<(State, Vec<u32>)> = VecDeque::new();
        seen.insert(empty.clone());
        queue.push_back((empty, vec![0; n]));

        while let Some((x, usage)) = queue.pop_front() {
            for p in 0..np {
                if x.contains(p) {
                    continue;
                }
                let proj = tech.project(p);
                let fits = usage
                    .iter()
                    .zip(proj.time())
                    .zip(w)
                    .all(|((e, t), cap)| e + t <= *cap);
                if !fits {
                    continue;
                }
                if tech.unique_activity_per_state()
                    && x.iter()
                        .any(|q| tech.project(q).activity() == proj.activity())
                {
                    continue;
                }
                let y = x.with(p);
                if seen.contains(&y) {
                    continue;
                }
                ensure_capacity("feasible states", max_states, seen.len() + 1)?;
                seen.insert(y.clone());
                let next: Vec<u32> = usage.iter().zip(proj.time()).map(|(e, t)| e + t).collect();
                queue.push_back((y, next));
            }
            found.push(x);
        }

        found.sort_by(canonical_cmp);
        Ok(Self::from_sorted(np, found, tech))
    }

    fn from_sorted(num_projects: usize, states: Vec<State>, tech: &Technology) -> Self {
        let index: HashMap<State, usize> = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, s)| (s, k))
            .collect();
        let hasse_up: Vec<Vec<usize>> = states
            .iter()
            .map(|x| {
                (0..num_projects)
                    .filter(|&p| !x.contains(p))
                    .filter_map(|p| index.get(&x.with(p)).copied())
                    .collect()
            })
            .collect();
        let maximal: Vec<usize> = (0..states.len())
            .filter(|&k| hasse_up[k].is_empty())
            .collect();
        let top = states.iter().map(State::len).max().unwrap_or(0);
        let max_projects: Vec<usize> = (0..states.len())
            .filter(|&k| states[k].len() == top)
            .collect();
        let mut by_size = vec![Vec::new(); top + 1];
        for (k, s) in states.iter().enumerate() {
            by_size[s.len()].push(k);
        }
        let (class_of, num_classes) = relabel_classes(&states, tech);
        debug_assert!(max_projects.iter().all(|k| maximal.contains(k)));
        StateSpace {
            num_projects,
            states,
            index,
            hasse_up,
            maximal,
            max_projects,
            by_size,
            class_of,
            num_classes,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn num_projects(&self) -> usize {
        self.num_projects
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &State {
        &self.states[k]
    }

    pub fn index_of(&self, x: &State) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Index of the empty state (always 0).
    pub fn empty_index(&self) -> usize {
        0
    }

    /// States reachable from `k` by adding one project.
    pub fn hasse_up(&self, k: usize) -> &[usize] {
        &self.hasse_up[k]
    }

    /// M: states admitting no feasible single-project addition.
    pub fn maximal(&self) -> &[usize] {
        &self.maximal
    }

    /// L: states with the largest number of projects.
    pub fn max_projects(&self) -> &[usize] {
        &self.max_projects
    }

    pub fn by_size(&self) -> &[Vec<usize>] {
        &self.by_size
    }

    pub fn is_maximal(&self, k: usize) -> bool {
        self.hasse_up[k].is_empty()
    }

    /// Activity-relabeling class of state `k`.
    pub fn class_of(&self, k: usize) -> usize {
        self.class_of[k]
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Number of distinct relabeling classes among `states`.
    pub fn count_classes(&self, states: &[usize]) -> usize {
        states
            .iter()
            .map(|&k| self.class_of[k])
            .collect::<HashSet<_>>()
            .len()
    }

    /// Group `states` by class, each group in state order, groups ordered by
    /// their first member.
    pub fn group_by_class(&self, states: &[usize]) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = Vec::new();
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for &k in states {
            let c = self.class_of[k];
            groups
                .entry(c)
                .or_insert_with(|| {
                    order.push(c);
                    Vec::new()
                })
                .push(k);
        }
        order
            .into_iter()
            .map(|c| groups.remove(&c).unwrap_or_default())
            .collect()
    }
}

/// Group states that differ only in the activities their projects carry out:
/// two states share a class when they contain the same multiset of teams.
fn relabel_classes(states: &[State], tech: &Technology) -> (Vec<usize>, usize) {
    let mut ids: HashMap<Vec<&[u32]>, usize> = HashMap::new();
    let class_of = states
        .iter()
        .map(|x| {
            let mut teams: Vec<&[u32]> = x.iter().map(|p| tech.project(p).time()).collect();
            teams.sort_unstable();
            let next = ids.len();
            *ids.entry(teams).or_insert(next)
        })
        .collect();
    (class_of, ids.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActivityId, Project};

    fn tech(projects: &[(usize, &[u32])], na: usize) -> Technology {
        let acts = (0..na).map(|a| format!("a{a}")).collect();
        let ps = projects
            .iter()
            .map(|(a, t)| Project::new(ActivityId(*a), t.to_vec()).unwrap())
            .collect();
        Technology::new(acts, ps, false).unwrap()
    }

    #[test]
    fn single_project_technology() {
        let t = tech(&[(0, &[1, 1])], 1);
        let w = Endowments::new(vec![1, 1]).unwrap();
        let s = StateSpace::enumerate(&w, &t, 100).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.maximal(), &[1]);
        assert_eq!(s.max_projects(), &[1]);
        assert!(s.state(0).is_empty());
    }

    #[test]
    fn guard_limit_is_reported() {
        let t = tech(&[(0, &[1, 0]), (0, &[0, 1]), (1, &[1, 0])], 2);
        let w = Endowments::new(vec![2, 2]).unwrap();
        let err = StateSpace::enumerate(&w, &t, 3).unwrap_err();
        assert!(err.is_capacity());
        assert!(err.to_string().contains("limit 3"));
    }

    #[test]
    fn unique_activity_flag_restricts_states() {
        let acts = vec!["a".to_string()];
        let ps = vec![
            Project::new(ActivityId(0), vec![1, 0]).unwrap(),
            Project::new(ActivityId(0), vec![0, 1]).unwrap(),
        ];
        let w = Endowments::new(vec![1, 1]).unwrap();
        let free = Technology::new(acts.clone(), ps.clone(), false).unwrap();
        let strict = Technology::new(acts, ps, true).unwrap();
        assert_eq!(StateSpace::enumerate(&w, &free, 100).unwrap().len(), 4);
        assert_eq!(StateSpace::enumerate(&w, &strict, 100).unwrap().len(), 3);
    }

    #[test]
    fn relabeling_merges_activity_swaps() {
        // Two activities over the same single team.
        let t = tech(&[(0, &[1, 1]), (1, &[1, 1])], 2);
        let w = Endowments::new(vec![1, 1]).unwrap();
        let s = StateSpace::enumerate(&w, &t, 100).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.num_classes(), 2);
        assert_eq!(s.count_classes(s.maximal()), 1);
    }

    #[test]
    fn relabeling_is_per_project() {
        // One team, two activities, endowment for both: {a}, {b} share a class
        // and so do the two mixed states of a second team.
        let t = tech(
            &[
                (0, &[1, 1, 0]),
                (1, &[1, 1, 0]),
                (0, &[0, 1, 1]),
                (1, &[0, 1, 1]),
            ],
            2,
        );
        let w = Endowments::new(vec![1, 2, 1]).unwrap();
        let s = StateSpace::enumerate(&w, &t, 100).unwrap();
        // ∅, {ij}, {jk}, {ij, jk} up to activities.
        assert_eq!(s.num_classes(), 4);
        assert_eq!(s.maximal().len(), 4);
        assert_eq!(s.count_classes(s.maximal()), 1);
    }
}
