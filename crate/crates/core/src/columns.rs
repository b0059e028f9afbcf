//! The set of undiscarded columns maintained by both algorithms.

use std::collections::BTreeSet;

use crate::rng::{uniform_below, SeededRng};

/// Column set with O(1) membership and O(1) uniform sampling. The live list
/// stays in ascending order, so iteration and sampling are deterministic
/// functions of the seed and the removal history.
#[derive(Debug, Clone)]
pub struct ColumnSet {
    present: Vec<bool>,
    live: Vec<usize>,
}

impl ColumnSet {
    /// All columns of a side-`s` matrix.
    pub fn full(s: usize) -> Self {
        Self {
            present: vec![true; s],
            live: (0..s).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn contains(&self, col: usize) -> bool {
        col < self.present.len() && self.present[col]
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.live.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.live
    }

    pub fn to_set(&self) -> BTreeSet<usize> {
        self.live.iter().copied().collect()
    }

    pub fn sample(&self, rng: &mut SeededRng) -> usize {
        self.live[uniform_below(rng, self.live.len())]
    }

    /// Two distinct columns, uniform over ordered pairs.
    pub fn sample_two_distinct(&self, rng: &mut SeededRng) -> (usize, usize) {
        debug_assert!(self.live.len() >= 2);
        let first = uniform_below(rng, self.live.len());
        let mut second = uniform_below(rng, self.live.len() - 1);
        if second >= first {
            second += 1;
        }
        (self.live[first], self.live[second])
    }

    pub fn remove(&mut self, col: usize) {
        if self.contains(col) {
            self.present[col] = false;
            self.live.retain(|&c| c != col);
        }
    }

    pub fn remove_all<'a, I: IntoIterator<Item = &'a usize>>(&mut self, cols: I) {
        let mut any = false;
        for &col in cols {
            if self.contains(col) {
                self.present[col] = false;
                any = true;
            }
        }
        if any {
            let present = &self.present;
            self.live.retain(|&c| present[c]);
        }
    }
}
