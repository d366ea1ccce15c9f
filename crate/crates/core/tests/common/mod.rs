//! Brute-force reference computations used by the integration tests.
//!
//! Everything here works from the raw model data (time vectors, endowments,
//! payoff evaluation) and never calls the library's search routines.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teamform_core::{
    ActivityId, AgentId, Endowments, Model, PayoffFn, Project, State, StateSpace, Technology,
};

pub const TOL: f64 = 1e-9;

/// Feasible states as bitmasks over projects, with utilities.
pub struct Brute {
    pub n: usize,
    pub np: usize,
    pub times: Vec<Vec<u32>>,
    pub members: Vec<u64>,
    pub states: Vec<u128>,
    pub index: HashMap<u128, usize>,
    /// utils[s][i] as floating point.
    pub utils: Vec<Vec<f64>>,
    pub weights: Vec<u64>,
    w: Vec<u32>,
    activity: Vec<usize>,
    unique_activity: bool,
}

pub fn ones(m: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |b| m >> b & 1 == 1)
}

impl Brute {
    pub fn new(model: &Model) -> Brute {
        let tech = model.technology();
        let np = tech.len();
        assert!(np <= 128);
        let n = model.n();
        let times: Vec<Vec<u32>> = tech.projects().iter().map(|p| p.time().to_vec()).collect();
        let members = times
            .iter()
            .map(|t| (0..n).filter(|&i| t[i] > 0).fold(0u64, |m, i| m | 1 << i))
            .collect();
        let mut b = Brute {
            n,
            np,
            times,
            members,
            states: Vec::new(),
            index: HashMap::new(),
            utils: Vec::new(),
            weights: model.draw_weights().to_vec(),
            w: model.endowments().as_slice().to_vec(),
            activity: tech.projects().iter().map(|p| p.activity().0).collect(),
            unique_activity: tech.unique_activity_per_state(),
        };
        let mut load = vec![0u32; n];
        b.extend(0, 0, &mut load);
        b.states
            .sort_by_key(|&m| (m.count_ones(), m.reverse_bits()));
        for (k, &m) in b.states.iter().enumerate() {
            b.index.insert(m, k);
        }
        let payoff = model.payoff();
        b.utils = b
            .states
            .iter()
            .map(|&m| {
                let x = b.to_state(m);
                (0..n)
                    .map(|i| payoff.eval(tech, &x, AgentId(i)).unwrap().to_f64())
                    .collect()
            })
            .collect();
        b
    }

    fn extend(&mut self, p: usize, mask: u128, load: &mut Vec<u32>) {
        if p == self.np {
            self.states.push(mask);
            return;
        }
        self.extend(p + 1, mask, load);
        let fits = (0..self.n).all(|i| load[i] + self.times[p][i] <= self.w[i]);
        let distinct =
            !self.unique_activity || ones(mask).all(|q| self.activity[q] != self.activity[p]);
        if fits && distinct {
            for (l, t) in load.iter_mut().zip(&self.times[p]) {
                *l += t;
            }
            self.extend(p + 1, mask | 1 << p, load);
            for (l, t) in load.iter_mut().zip(&self.times[p]) {
                *l -= t;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn feasible(&self, m: u128) -> bool {
        self.index.contains_key(&m)
    }

    pub fn to_state(&self, m: u128) -> State {
        State::from_indices(self.np, ones(m))
    }

    /// Library index of oracle state `k`.
    pub fn lib_index(&self, space: &StateSpace, k: usize) -> usize {
        space
            .index_of(&self.to_state(self.states[k]))
            .expect("state known to the library")
    }

    pub fn oracle_index(&self, space: &StateSpace, x: usize) -> usize {
        let m = space.state(x).iter().fold(0u128, |m, p| m | 1 << p);
        self.index[&m]
    }

    pub fn to_lib(&self, space: &StateSpace, ks: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = ks.iter().map(|&k| self.lib_index(space, k)).collect();
        v.sort_unstable();
        v
    }

    pub fn size(&self, k: usize) -> usize {
        self.states[k].count_ones() as usize
    }

    pub fn is_maximal(&self, k: usize) -> bool {
        let m = self.states[k];
        (0..self.np).all(|p| m >> p & 1 == 1 || !self.feasible(m | 1 << p))
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_maximal(k)).collect()
    }

    pub fn most_projects(&self) -> Vec<usize> {
        let top = (0..self.len()).map(|k| self.size(k)).max().unwrap_or(0);
        (0..self.len()).filter(|&k| self.size(k) == top).collect()
    }

    pub fn gains(&self, from: usize, to: usize, i: usize) -> bool {
        self.utils[to][i] > self.utils[from][i] + TOL
    }

    /// Key identifying a state up to relabeling the activity of each project.
    pub fn class_key(&self, k: usize) -> Vec<Vec<u32>> {
        let mut key: Vec<Vec<u32>> = ones(self.states[k])
            .map(|p| self.times[p].clone())
            .collect();
        key.sort();
        key
    }

    pub fn count_classes(&self, ks: &[usize]) -> usize {
        let mut keys: Vec<_> = ks.iter().map(|&k| self.class_key(k)).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }

    /// Myopic team-wise stability straight from the definition.
    pub fn is_mts(&self, k: usize) -> bool {
        let m = self.states[k];
        let leave_ok = ones(m).all(|p| {
            let down = self.index[&(m & !(1 << p))];
            (0..self.n)
                .filter(|&i| self.members[p] >> i & 1 == 1)
                .all(|i| self.utils[k][i] + TOL >= self.utils[down][i])
        });
        let no_join = (0..self.np).filter(|&p| m >> p & 1 == 0).all(|p| {
            match self.index.get(&(m | 1 << p)) {
                None => true,
                Some(&up) => !(0..self.n)
                    .filter(|&i| self.members[p] >> i & 1 == 1)
                    .all(|i| self.gains(k, up, i)),
            }
        });
        leave_ok && no_join
    }

    /// Every coalition that can move x → target at switching cost `c`,
    /// checked clause by clause against the definition.
    pub fn blocking_coalitions(&self, x: usize, target: usize, c: f64) -> Vec<u64> {
        let (mx, mt) = (self.states[x], self.states[target]);
        if mx == mt {
            return Vec::new();
        }
        let y: Vec<usize> = ones(mx & !mt).collect();
        let z: Vec<usize> = ones(mt & !mx).collect();
        (1u64..1 << self.n)
            .filter(|&coal| {
                let touches_y = y.iter().all(|&p| self.members[p] & coal != 0);
                let owns_z = z.iter().all(|&p| self.members[p] & !coal == 0);
                let all_gain = (0..self.n).filter(|i| coal >> i & 1 == 1).all(|i| {
                    let exits = y.iter().filter(|&&p| self.members[p] >> i & 1 == 1).count();
                    self.utils[target][i] - c * exits as f64 > self.utils[x][i] + TOL
                });
                touches_y && owns_z && all_gain
            })
            .collect()
    }

    pub fn is_blocked(&self, x: usize, c: f64) -> bool {
        (0..self.len()).any(|t| !self.blocking_coalitions(x, t, c).is_empty())
    }

    pub fn cs(&self, c: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| !self.is_blocked(x, c))
            .collect()
    }

    /// (c_low, c_high): min and max over zero-cost blocking operations of
    /// the worst coalition member's gain.
    pub fn thresholds(&self) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for x in 0..self.len() {
            for t in 0..self.len() {
                for coal in self.blocking_coalitions(x, t, 0.0) {
                    let worst = (0..self.n)
                        .filter(|i| coal >> i & 1 == 1)
                        .map(|i| self.utils[t][i] - self.utils[x][i])
                        .fold(f64::INFINITY, f64::min);
                    range = Some(match range {
                        None => (worst, worst),
                        Some((lo, hi)) => (lo.min(worst), hi.max(worst)),
                    });
                }
            }
        }
        range
    }

    /// One-step improving moves with the smallest (then lexicographically
    /// first) coalition.
    pub fn improving(&self, x: usize) -> Vec<(usize, u64)> {
        (0..self.len())
            .filter_map(|t| {
                self.blocking_coalitions(x, t, 0.0)
                    .into_iter()
                    .min_by_key(|&c| (c.count_ones(), member_list(c)))
                    .map(|c| (t, c))
            })
            .collect()
    }

    /// Conditions (i) and (ii) of a farsightedly stable set, from scratch.
    pub fn farsighted_conditions(
        &self,
        moves: &[Vec<(usize, u64)>],
        set: &[usize],
    ) -> (bool, bool) {
        let inside = |s: usize| set.contains(&s);
        let cond_i = set.iter().all(|&x| {
            moves[x]
                .iter()
                .filter(|(t, _)| !inside(*t))
                .all(|&(t, coal)| {
                    moves[t].iter().any(|&(t2, _)| {
                        (0..self.n)
                            .filter(|i| coal >> i & 1 == 1)
                            .any(|i| self.utils[t2][i] < self.utils[x][i] - TOL)
                    })
                })
        });
        let cond_ii = (0..self.len())
            .filter(|&x| !inside(x))
            .all(|x| moves[x].iter().any(|(t, _)| inside(*t)));
        (cond_i, cond_ii)
    }

    /// Positive-probability successors of `k` under the unperturbed
    /// draw-and-add dynamics (including a self-loop when one exists).
    pub fn unperturbed_successors(&self, k: usize) -> Vec<usize> {
        let m = self.states[k];
        let mut out = Vec::new();
        let mut stays = false;
        for p in 0..self.np {
            if self.weights[p] == 0 {
                continue;
            }
            match self.index.get(&(m | 1 << p)) {
                Some(&up)
                    if up != k
                        && (0..self.n)
                            .filter(|&i| self.members[p] >> i & 1 == 1)
                            .all(|i| self.gains(k, up, i)) =>
                {
                    out.push(up)
                }
                _ => stays = true,
            }
        }
        if stays {
            out.push(k);
        }
        out
    }

    /// Minimum number of destroyed projects to get from `source` to every
    /// state, where a tick destroys any subset and then takes one
    /// unperturbed step.
    pub fn min_errors_from(&self, source: usize) -> Vec<Option<u32>> {
        let succ: Vec<Vec<usize>> = (0..self.len())
            .map(|k| self.unperturbed_successors(k))
            .collect();
        let mut dist = vec![None; self.len()];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u32, source)));
        while let Some(Reverse((d, k))) = heap.pop() {
            if dist[k].is_some() {
                continue;
            }
            dist[k] = Some(d);
            let m = self.states[k];
            let projects: Vec<usize> = ones(m).collect();
            for sub in 0u32..1 << projects.len() {
                let gone = projects
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| sub >> b & 1 == 1)
                    .fold(0u128, |acc, (_, &p)| acc | 1 << p);
                let mid = self.index[&(m & !gone)];
                let cost = d + sub.count_ones();
                for &next in &succ[mid] {
                    if dist[next].is_none() {
                        heap.push(Reverse((cost, next)));
                    }
                }
            }
        }
        dist
    }

    /// Pareto dominator of `k` among all feasible states, if any.
    pub fn pareto_dominated(&self, k: usize) -> bool {
        (0..self.len()).any(|t| {
            (0..self.n).all(|i| self.utils[t][i] + TOL >= self.utils[k][i])
                && (0..self.n).any(|i| self.utils[t][i] > self.utils[k][i] + TOL)
        })
    }
}

pub fn member_list(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Minimum-weight in-tree to `root` by enumerating every parent function.
pub fn brute_potential(weights: &[Vec<u32>], root: usize) -> u64 {
    let n = weights.len();
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut best = u64::MAX;
    let mut parent = vec![0usize; n];
    let total = (n as u64).pow(others.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut ok = true;
        for &v in &others {
            parent[v] = (c % n as u64) as usize;
            c /= n as u64;
            if parent[v] == v {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let reaches_root = others.iter().all(|&v| {
            let mut u = v;
            for _ in 0..n {
                if u == root {
                    return true;
                }
                u = parent[u];
            }
            u == root
        });
        if reaches_root {
            let cost = others.iter().map(|&v| weights[v][parent[v]] as u64).sum();
            best = best.min(cost);
        }
    }
    best
}

/// Stationary distribution by dense Gaussian elimination on
/// π(P − I) = 0, Σπ = 1.
pub fn dense_stationary(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    // Rows of the transposed system; the last equation is replaced by Σπ = 1.
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row: Vec<f64> = (0..n)
                .map(|c| p[c][r] - if r == c { 1.0 } else { 0.0 })
                .collect();
            row.push(0.0);
            row
        })
        .collect();
    a[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        a[col][col..].iter_mut().for_each(|v| *v /= d);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            let f = row[col];
            if r != col && f != 0.0 {
                for (v, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *v -= f * pv;
                }
            }
        }
    }
    (0..n).map(|r| a[r][n]).collect()
}

/// Dense destructive-scheme matrix built from the oracle's own dynamics.
pub fn dense_destructive(b: &Brute, eps: f64) -> Vec<Vec<f64>> {
    let n = b.len();
    let total: f64 = b.weights.iter().sum::<u64>() as f64;
    let mut p = vec![vec![0.0; n]; n];
    for (k, row) in p.iter_mut().enumerate() {
        let m = b.states[k];
        let projects: Vec<usize> = ones(m).collect();
        let l = projects.len() as i32;
        for sub in 0u32..1 << projects.len() {
            let d = sub.count_ones() as i32;
            let weight = eps.powi(d) * (1.0 - eps).powi(l - d);
            let gone = projects
                .iter()
                .enumerate()
                .filter(|(b, _)| sub >> b & 1 == 1)
                .fold(0u128, |acc, (_, &q)| acc | 1 << q);
            let mid = b.index[&(m & !gone)];
            let mm = b.states[mid];
            for q in 0..b.np {
                let draw = b.weights[q] as f64 / total;
                let next = match b.index.get(&(mm | 1 << q)) {
                    Some(&up)
                        if (0..b.n)
                            .filter(|&i| b.members[q] >> i & 1 == 1)
                            .all(|i| b.gains(mid, up, i)) =>
                    {
                        up
                    }
                    _ => mid,
                };
                row[next] += weight * draw;
            }
        }
    }
    p
}

/// A random model with `n ≤ 5` agents and at most 8 distinct projects.
/// The payoff is linear or equal split, so joining always helps.
pub fn random_model(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(2..=5);
        let w: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let activities = rng.gen_range(1..=2);
        let target = rng.gen_range(1..=8);
        let mut projects: Vec<Project> = Vec::new();
        for _ in 0..4 * target {
            if projects.len() == target {
                break;
            }
            let t: Vec<u32> = (0..n)
                .map(|i| {
                    if rng.gen_bool(0.5) {
                        rng.gen_range(1..=w[i])
                    } else {
                        0
                    }
                })
                .collect();
            if t.iter().all(|&v| v == 0) {
                continue;
            }
            let p = Project::new(ActivityId(rng.gen_range(0..activities)), t).unwrap();
            if !projects.contains(&p) {
                projects.push(p);
            }
        }
        if projects.is_empty() {
            continue;
        }
        let payoff = if rng.gen_bool(0.5) {
            PayoffFn::linear(Rational64::new(rng.gen_range(1..=3), 2))
        } else {
            PayoffFn::EqualSplit
        };
        let names = (0..n).map(|i| format!("a{i}")).collect();
        let acts = (0..activities).map(|a| format!("x{a}")).collect();
        let tech = Technology::new(acts, projects, false).unwrap();
        return Model::builder(names, Endowments::new(w).unwrap(), tech, payoff)
            .build()
            .unwrap();
    }
}

/// A random model where every time entry is 0 or 1 and utility is linear.
pub fn random_unit_time_linear_model(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    loop {
        let n = rng.gen_range(2..=5);
        let w: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
        let target = rng.gen_range(1..=7);
        let mut projects: Vec<Project> = Vec::new();
        for _ in 0..4 * target {
            if projects.len() == target {
                break;
            }
            let t: Vec<u32> = (0..n).map(|_| rng.gen_bool(0.5) as u32).collect();
            if t.iter().all(|&v| v == 0) {
                continue;
            }
            let p = Project::new(ActivityId(rng.gen_range(0..2)), t).unwrap();
            if !projects.contains(&p) {
                projects.push(p);
            }
        }
        if projects.is_empty() {
            continue;
        }
        let names = (0..n).map(|i| format!("a{i}")).collect();
        let tech = Technology::new(vec!["x0".into(), "x1".into()], projects, false).unwrap();
        return Model::builder(
            names,
            Endowments::new(w).unwrap(),
            tech,
            PayoffFn::linear(Rational64::new(1, 2)),
        )
        .build()
        .unwrap();
    }
}

pub fn fixture(name: &str) -> Model {
    teamform_core::builtin_example(name).unwrap()
}

pub const FIXTURES: [&str; 6] = ["EX1", "EX1-JK", "EX2", "EX3", "MAR", "PUB"];

pub fn agent(model: &Model, name: &str) -> usize {
    model.agent_id(name).unwrap().0
}
