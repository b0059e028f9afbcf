//! Domain types for the pointer-matrix function and its full-knowledge
//! reference evaluation.
//!
//! An input is an `s`×`s` grid of cells. Each cell carries a bit-entry and a
//! `w`-bit pointer-entry, where `n = s²` and `w = ⌈log₂ n⌉`. A pointer-entry
//! decodes to another cell of the grid, or to null (`⊥`). The function
//! evaluates to 1 exactly when a unique all-1 column launches a valid pointer
//! chain that covers every column.
//!
//! Everything in this module reads the whole matrix with no accounting. The
//! query-counted algorithms never call into here; `evaluate_reference` is a
//! deliberately independent, definition-literal implementation that serves as
//! the correctness oracle for them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 0-based cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub row: usize,
    pub col: usize,
}

impl CellRef {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Row-major linear index.
    pub fn linear(&self, s: usize) -> usize {
        self.row * s + self.col
    }

    pub fn from_linear(idx: usize, s: usize) -> Self {
        Self {
            row: idx / s,
            col: idx % s,
        }
    }
}

/// One cell: a bit-entry plus the raw `w`-bit pointer word as stored.
///
/// The decoded pointer is derived, never stored: a raw word is a live pointer
/// iff it is below `n` and differs from the cell's own linear index. Every
/// other word means `⊥`. Self-reference has to be the null encoding because a
/// pointer must name *some other* cell, and when `n` is a power of two every
/// `w`-bit word already names a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub bit: u8,
    pub raw_ptr: usize,
}

impl Cell {
    pub fn new(bit: u8, raw_ptr: usize) -> Self {
        Self { bit, raw_ptr }
    }
}

/// A pointer chain: consecutive cells linked by pointer-entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub cells: Vec<CellRef>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn columns(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.col).collect()
    }
}

/// `⌈log₂ n⌉` for `n ≥ 2`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 2);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// An immutable `s`×`s` pointer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    s: usize,
    w: usize,
    cells: Vec<Cell>,
}

impl Matrix {
    /// Builds a matrix from row-major cells. Requires `s ≥ 2`, exactly `s²`
    /// cells, and every raw pointer word below `2^w`.
    pub fn new(s: usize, cells: Vec<Cell>) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidSideLength(s));
        }
        let n = s * s;
        if cells.len() != n {
            return Err(Error::Parse(format!(
                "expected {} cells for s={}, got {}",
                n,
                s,
                cells.len()
            )));
        }
        let w = ceil_log2(n);
        let limit = 1usize << w;
        for (idx, cell) in cells.iter().enumerate() {
            if cell.bit > 1 {
                return Err(Error::Parse(format!(
                    "cell {} has non-binary bit-entry",
                    idx
                )));
            }
            if cell.raw_ptr >= limit {
                return Err(Error::Parse(format!(
                    "cell {} has raw pointer {} outside [0, 2^{})",
                    idx, cell.raw_ptr, w
                )));
            }
        }
        Ok(Self { s, w, cells })
    }

    pub fn side(&self) -> usize {
        self.s
    }

    /// Total number of cells, `n = s²`.
    pub fn n(&self) -> usize {
        self.s * self.s
    }

    /// Pointer width `w = ⌈log₂ n⌉`.
    pub fn ptr_width(&self) -> usize {
        self.w
    }

    pub fn contains(&self, r: CellRef) -> bool {
        r.row < self.s && r.col < self.s
    }

    pub fn check_bounds(&self, r: CellRef) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                row: r.row,
                col: r.col,
                s: self.s,
            })
        }
    }

    pub fn cell(&self, r: CellRef) -> Cell {
        self.cells[r.linear(self.s)]
    }

    pub fn bit(&self, r: CellRef) -> u8 {
        self.cells[r.linear(self.s)].bit
    }

    pub fn raw_ptr(&self, r: CellRef) -> usize {
        self.cells[r.linear(self.s)].raw_ptr
    }

    /// Decoded pointer-entry: `None` is `⊥`.
    pub fn ptr(&self, r: CellRef) -> Option<CellRef> {
        let own = r.linear(self.s);
        let raw = self.cells[own].raw_ptr;
        if raw >= self.n() || raw == own {
            None
        } else {
            Some(CellRef::from_linear(raw, self.s))
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn column_is_all_ones(&self, col: usize) -> bool {
        (0..self.s).all(|row| self.bit(CellRef::new(row, col)) == 1)
    }

    pub fn all_ones_columns(&self) -> Vec<usize> {
        (0..self.s)
            .filter(|&c| self.column_is_all_ones(c))
            .collect()
    }

    pub fn zeros_in_column(&self, col: usize) -> usize {
        (0..self.s)
            .filter(|&row| self.bit(CellRef::new(row, col)) == 0)
            .count()
    }

    /// Row of the first non-null pointer-entry in a column, scanning from
    /// row 0. All earlier rows hold `⊥` by construction of the scan.
    pub fn first_nonnull_ptr_row(&self, col: usize) -> Option<usize> {
        (0..self.s).find(|&row| self.ptr(CellRef::new(row, col)).is_some())
    }

    /// Walks the pointer chain from `start` and returns it when it is valid:
    /// the start bit is 1, the following `s − 1` cells all carry bit 0 and
    /// live in pairwise-distinct columns, every cell but the last has a
    /// non-null pointer, and the last cell's pointer is `⊥`. With length
    /// exactly `s` and distinct columns the chain necessarily covers every
    /// column. Traversal stops early (returning `None`) on a premature `⊥`,
    /// a revisited column, or a bit-entry violation.
    pub fn valid_chain_from(&self, start: CellRef) -> Option<Chain> {
        if !self.contains(start) || self.bit(start) != 1 {
            return None;
        }
        let s = self.s;
        let mut cells = Vec::with_capacity(s);
        let mut seen_cols = vec![false; s];
        cells.push(start);
        seen_cols[start.col] = true;
        let mut current = start;
        while cells.len() < s {
            let next = self.ptr(current)?;
            if self.bit(next) != 0 {
                return None;
            }
            if seen_cols[next.col] {
                return None;
            }
            seen_cols[next.col] = true;
            cells.push(next);
            current = next;
        }
        if self.ptr(current).is_some() {
            return None;
        }
        Some(Chain { cells })
    }

    /// Definition-literal evaluation of the function: 1 iff a unique all-1
    /// column exists and the chain launched from its first non-null
    /// pointer-entry is valid.
    pub fn evaluate_reference(&self) -> u8 {
        let all_ones = self.all_ones_columns();
        if all_ones.len() != 1 {
            return 0;
        }
        let col = all_ones[0];
        let Some(row) = self.first_nonnull_ptr_row(col) else {
            return 0;
        };
        match self.valid_chain_from(CellRef::new(row, col)) {
            Some(_) => 1,
            None => 0,
        }
    }

    /// The witnessing column and chain of a 1-input.
    pub fn principle_chain(&self) -> Option<(usize, Chain)> {
        let all_ones = self.all_ones_columns();
        if all_ones.len() != 1 {
            return None;
        }
        let col = all_ones[0];
        let row = self.first_nonnull_ptr_row(col)?;
        let chain = self.valid_chain_from(CellRef::new(row, col))?;
        Some((col, chain))
    }

    /// Full-knowledge column span: `col` plus every column holding a 0-bit
    /// cell reachable from some 0-bit cell of `col` by following
    /// pointer-entries through 0-bit cells only. Cycle-safe via a visited
    /// set over cells.
    pub fn span_full(&self, col: usize) -> BTreeSet<usize> {
        let mut span = BTreeSet::new();
        span.insert(col);
        let mut visited = vec![false; self.n()];
        let mut stack = Vec::new();
        for row in 0..self.s {
            let r = CellRef::new(row, col);
            if self.bit(r) == 0 && !visited[r.linear(self.s)] {
                visited[r.linear(self.s)] = true;
                stack.push(r);
            }
        }
        while let Some(cell) = stack.pop() {
            span.insert(cell.col);
            if let Some(next) = self.ptr(cell) {
                if self.bit(next) == 0 && !visited[next.linear(self.s)] {
                    visited[next.linear(self.s)] = true;
                    stack.push(next);
                }
            }
        }
        span
    }
}
