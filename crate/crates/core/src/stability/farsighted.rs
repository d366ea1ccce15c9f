//! Farsightedly stable sets of states.
//!
//! A set S is valid when (i) every move out of S by a coalition can be
//! answered by a further move that leaves some coalition member worse off
//! than at the start, and (ii) every state outside S has a move into S. A
//! farsightedly stable set is an inclusion-minimal valid set.

use serde::Serialize;

use crate::error::{ensure_capacity, Error, Result};
use crate::instance::Instance;

use super::blocking::{improving_moves, ImprovingMove};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FarsightedMode {
    /// All minimal valid sets; needs |X| within the farsighted guard.
    Exhaustive,
    /// One set, by deterministic single-state removal from X.
    Greedy,
}

impl std::str::FromStr for FarsightedMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(FarsightedMode::Exhaustive),
            "greedy" => Ok(FarsightedMode::Greedy),
            other => Err(Error::Schema(format!("unknown farsighted mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FarsightedSet {
    pub members: Vec<usize>,
    pub certified_i: bool,
    pub certified_ii: bool,
    /// Minimality was established by exhausting the subsets of `members`.
    pub certified_iii: bool,
}

/// One-step improving moves F(x) for every state, with deterrence flags.
pub struct MoveGraph {
    moves: Vec<Vec<ImprovingMove>>,
    /// `deterred[x][k]`: the k-th move out of x can be answered by a move
    /// that hurts a member of its coalition relative to x.
    deterred: Vec<Vec<bool>>,
    words: usize,
    f_bits: Vec<Vec<u64>>,
    need_bits: Vec<Vec<u64>>,
}

impl MoveGraph {
    pub fn build(inst: &Instance) -> Result<MoveGraph> {
        let n_states = inst.space().len();
        let moves: Vec<Vec<ImprovingMove>> = (0..n_states)
            .map(|x| improving_moves(inst, x))
            .collect::<Result<_>>()?;
        let tol = inst.tol();
        let deterred: Vec<Vec<bool>> = (0..n_states)
            .map(|x| {
                moves[x]
                    .iter()
                    .map(|mv| {
                        moves[mv.target].iter().any(|next| {
                            mv.coalition
                                .iter()
                                .any(|&i| inst.utility(next.target, i).lt(inst.utility(x, i), tol))
                        })
                    })
                    .collect()
            })
            .collect();

        let words = n_states.div_ceil(64);
        let to_bits = |targets: &mut dyn Iterator<Item = usize>| {
            let mut b = vec![0u64; words];
            for t in targets {
                b[t / 64] |= 1 << (t % 64);
            }
            b
        };
        let f_bits = moves
            .iter()
            .map(|ms| to_bits(&mut ms.iter().map(|m| m.target)))
            .collect();
        let need_bits = (0..n_states)
            .map(|x| {
                to_bits(
                    &mut moves[x]
                        .iter()
                        .zip(&deterred[x])
                        .filter(|(_, &d)| !d)
                        .map(|(m, _)| m.target),
                )
            })
            .collect();
        Ok(MoveGraph {
            moves,
            deterred,
            words,
            f_bits,
            need_bits,
        })
    }

    pub fn moves(&self, x: usize) -> &[ImprovingMove] {
        &self.moves[x]
    }

    pub fn is_deterred(&self, x: usize, k: usize) -> bool {
        self.deterred[x][k]
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    fn bits_of(&self, set: &[usize]) -> Vec<u64> {
        let mut b = vec![0u64; self.words];
        for &x in set {
            b[x / 64] |= 1 << (x % 64);
        }
        b
    }

    fn condition_i(&self, s: &[u64]) -> bool {
        (0..self.len())
            .filter(|&x| s[x / 64] >> (x % 64) & 1 == 1)
            .all(|x| self.need_bits[x].iter().zip(s).all(|(n, s)| n & !s == 0))
    }

    fn condition_ii(&self, s: &[u64]) -> bool {
        (0..self.len())
            .filter(|&x| s[x / 64] >> (x % 64) & 1 == 0)
            .all(|x| self.f_bits[x].iter().zip(s).any(|(f, s)| f & s != 0))
    }

    /// Conditions (i) and (ii) for the set `members`.
    pub fn satisfies(&self, members: &[usize]) -> (bool, bool) {
        let s = self.bits_of(members);
        (self.condition_i(&s), self.condition_ii(&s))
    }

    /// All inclusion-minimal valid subsets of `universe` (|universe| ≤ 20),
    /// sorted by size then members.
    fn minimal_subsets(&self, universe: &[usize]) -> Vec<Vec<usize>> {
        let m = universe.len();
        debug_assert!(m <= 24);
        let mut local = vec![usize::MAX; self.len()];
        for (j, &x) in universe.iter().enumerate() {
            local[x] = j;
        }
        let project = |bits: &[u64]| -> Option<u32> {
            let mut mask = 0u32;
            for x in 0..self.len() {
                if bits[x / 64] >> (x % 64) & 1 == 1 {
                    if local[x] == usize::MAX {
                        return None;
                    }
                    mask |= 1 << local[x];
                }
            }
            Some(mask)
        };
        let local_hits = |x: usize| -> u32 {
            self.moves[x]
                .iter()
                .filter(|mv| local[mv.target] != usize::MAX)
                .fold(0, |acc, mv| acc | 1 << local[mv.target])
        };
        // None: x can never belong to a subset of the universe.
        let need: Vec<Option<u32>> = universe
            .iter()
            .map(|&x| project(&self.need_bits[x]))
            .collect();
        let inner_hits: Vec<u32> = universe.iter().map(|&x| local_hits(x)).collect();
        let mut outer_hits: Vec<u32> = (0..self.len())
            .filter(|&x| local[x] == usize::MAX)
            .map(local_hits)
            .collect();
        outer_hits.sort_unstable();
        outer_hits.dedup();

        let total = 1usize << m;
        let mut valid = vec![false; total];
        for (t, slot) in valid.iter_mut().enumerate() {
            let t = t as u32;
            *slot = outer_hits.iter().all(|&h| h & t != 0)
                && (0..m).all(|j| {
                    if t >> j & 1 == 1 {
                        need[j].is_some_and(|nb| nb & !t == 0)
                    } else {
                        inner_hits[j] & t != 0
                    }
                });
        }
        // reach[t]: some subset of t (t included) is valid.
        let mut reach = valid.clone();
        for t in 0..total {
            if !reach[t] {
                reach[t] = (0..m).any(|j| t >> j & 1 == 1 && reach[t & !(1 << j)]);
            }
        }
        let mut out: Vec<Vec<usize>> = (0..total)
            .filter(|&t| valid[t] && (0..m).all(|j| t >> j & 1 == 0 || !reach[t & !(1 << j)]))
            .map(|t| {
                (0..m)
                    .filter(|j| t >> j & 1 == 1)
                    .map(|j| universe[j])
                    .collect()
            })
            .collect();
        out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// Farsightedly stable sets of `inst`.
pub fn farsighted_stable_sets(inst: &Instance, mode: FarsightedMode) -> Result<Vec<FarsightedSet>> {
    let guard = inst.model().guards().max_farsighted_states.min(24);
    if mode == FarsightedMode::Exhaustive {
        ensure_capacity(
            "states for exhaustive farsighted search",
            guard,
            inst.space().len(),
        )?;
    }
    let graph = MoveGraph::build(inst)?;
    let certify = |members: Vec<usize>, minimal: bool| {
        let (ci, cii) = graph.satisfies(&members);
        FarsightedSet {
            members,
            certified_i: ci,
            certified_ii: cii,
            certified_iii: minimal,
        }
    };
    match mode {
        FarsightedMode::Exhaustive => {
            let all: Vec<usize> = (0..graph.len()).collect();
            Ok(graph
                .minimal_subsets(&all)
                .into_iter()
                .map(|s| certify(s, true))
                .collect())
        }
        FarsightedMode::Greedy => {
            let mut s = vec![true; graph.len()];
            let members_of =
                |s: &[bool]| -> Vec<usize> { (0..s.len()).filter(|&x| s[x]).collect() };
            loop {
                let mut changed = false;
                for x in 0..graph.len() {
                    if !s[x] {
                        continue;
                    }
                    s[x] = false;
                    let (ci, cii) = graph.satisfies(&members_of(&s));
                    if ci && cii {
                        changed = true;
                    } else {
                        s[x] = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let reduced = members_of(&s);
            if reduced.len() <= guard {
                let minimal = graph
                    .minimal_subsets(&reduced)
                    .into_iter()
                    .next()
                    .expect("the reduced set is itself valid");
                Ok(vec![certify(minimal, true)])
            } else {
                Ok(vec![certify(reduced, false)])
            }
        }
    }
}
