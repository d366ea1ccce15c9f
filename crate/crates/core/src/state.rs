//! Fixed-width bitsets over project indices.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

const WORD: usize = 64;

/// A set of projects, stored as a bitset over the technology's project indices.
///
/// All states built for the same technology share the same word count, so
/// equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State {
    words: SmallVec<[u64; 2]>,
}

impl State {
    /// The empty state for a technology with `num_projects` projects.
    pub fn empty(num_projects: usize) -> Self {
        let n = num_projects.div_ceil(WORD).max(1);
        State {
            words: SmallVec::from_elem(0, n),
        }
    }

    pub fn from_indices<I>(num_projects: usize, indices: I) -> Self
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = State::empty(num_projects);
        for p in indices {
            s.insert(p);
        }
        s
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        self.words
            .get(p / WORD)
            .is_some_and(|w| w >> (p % WORD) & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, p: usize) {
        self.words[p / WORD] |= 1 << (p % WORD);
    }

    #[inline]
    pub fn remove(&mut self, p: usize) {
        self.words[p / WORD] &= !(1 << (p % WORD));
    }

    pub fn with(&self, p: usize) -> Self {
        let mut s = self.clone();
        s.insert(p);
        s
    }

    pub fn without(&self, p: usize) -> Self {
        let mut s = self.clone();
        s.remove(p);
        s
    }

    /// Number of projects, written ℓ(x) in the model.
    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection(&self, other: &State) -> State {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &State) -> State {
        self.zip_with(other, |a, b| a | b)
    }

    /// Projects in `self` but not in `other`.
    pub fn difference(&self, other: &State) -> State {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &State) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// Size of the intersection without allocating it.
    pub fn intersection_len(&self, other: &State) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Project indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + b)
                }
            })
        })
    }

    /// Canonical encoding: sorted project indices.
    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &State, f: impl Fn(u64, u64) -> u64) -> State {
        debug_assert_eq!(self.words.len(), other.words.len());
        State {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Order used throughout the crate: by size, then lexicographically on the
/// sorted project indices.
pub fn canonical_cmp(a: &State, b: &State) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
