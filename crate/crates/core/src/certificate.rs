//! Certificates: structured witnesses whose acceptance forces the function
//! value regardless of unread entries.
//!
//! A `One` certificate pins the value to 1. The three zero variants pin it
//! to 0:
//!
//! * `ZeroEveryColumn` — a witnessed 0-bit in every column, so no all-1
//!   column exists.
//! * `ZeroNonSpanningPair` — two columns, each containing a 0-bit, neither
//!   in the other's span. A valid chain would pass through a 0-cell of both
//!   columns in some order, making the earlier one span the later, so no
//!   valid chain exists.
//! * `ZeroBrokenColumn` — an all-1 column whose own chain is invalid (or
//!   whose pointers are all null). Uniqueness of the all-1 column in the
//!   function definition makes any witnessing column the only candidate.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::matrix::{CellRef, Chain, Matrix};

/// Why an all-1 column fails to launch a valid chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrokenReason {
    /// Every pointer-entry in the column is null.
    AllPointersNull,
    /// The chain hit a null pointer before visiting all columns.
    PrematureNull,
    /// The chain revisited a column.
    RepeatedColumn,
    /// A chain cell after the head carries bit 1.
    NonZeroBit,
    /// The chain visited all columns but its last cell still points onward.
    Unterminated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    One {
        column: usize,
        chain: Chain,
    },
    ZeroEveryColumn {
        /// column -> a cell of that column holding bit 0.
        witnesses: BTreeMap<usize, CellRef>,
    },
    ZeroNonSpanningPair {
        col_a: usize,
        col_b: usize,
        span_a: BTreeSet<usize>,
        span_b: BTreeSet<usize>,
    },
    ZeroBrokenColumn {
        column: usize,
        reason: BrokenReason,
    },
}

impl Certificate {
    /// 1 for the `One` variant, 0 for all zero variants.
    pub fn claimed_value(&self) -> u8 {
        match self {
            Certificate::One { .. } => 1,
            _ => 0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::One { .. } => "one",
            Certificate::ZeroEveryColumn { .. } => "zero_every_column",
            Certificate::ZeroNonSpanningPair { .. } => "zero_non_spanning_pair",
            Certificate::ZeroBrokenColumn { .. } => "zero_broken_column",
        }
    }
}

fn in_range(m: &Matrix, r: CellRef) -> bool {
    m.contains(r)
}

/// Checks a certificate against the matrix it was produced from. Acceptance
/// of the `One` variant implies `evaluate_reference = 1`; acceptance of any
/// zero variant implies `evaluate_reference = 0`.
pub fn verify_certificate(m: &Matrix, cert: &Certificate) -> bool {
    let s = m.side();
    match cert {
        Certificate::One { column, chain } => {
            if *column >= s || chain.cells.is_empty() {
                return false;
            }
            if chain.cells.iter().any(|&c| !in_range(m, c)) {
                return false;
            }
            if !m.column_is_all_ones(*column) {
                return false;
            }
            let head = chain.cells[0];
            if head.col != *column {
                return false;
            }
            // Rows above the chain head in the special column must hold ⊥.
            if (0..head.row).any(|row| m.ptr(CellRef::new(row, *column)).is_some()) {
                return false;
            }
            match m.valid_chain_from(head) {
                Some(found) => found == *chain,
                None => false,
            }
        }
        Certificate::ZeroEveryColumn { witnesses } => {
            if witnesses.len() != s {
                return false;
            }
            (0..s).all(|col| match witnesses.get(&col) {
                Some(&cell) => in_range(m, cell) && cell.col == col && m.bit(cell) == 0,
                None => false,
            })
        }
        Certificate::ZeroNonSpanningPair { col_a, col_b, .. } => {
            if *col_a >= s || *col_b >= s || col_a == col_b {
                return false;
            }
            // Both columns must contain a 0-bit: an all-1 column never lies
            // in any span, so without this check the pair (all-1 column,
            // anything) would pass on a 1-input.
            if m.zeros_in_column(*col_a) == 0 || m.zeros_in_column(*col_b) == 0 {
                return false;
            }
            !m.span_full(*col_a).contains(col_b) && !m.span_full(*col_b).contains(col_a)
        }
        Certificate::ZeroBrokenColumn { column, .. } => {
            if *column >= s {
                return false;
            }
            if !m.column_is_all_ones(*column) {
                return false;
            }
            match m.first_nonnull_ptr_row(*column) {
                None => true,
                Some(row) => m.valid_chain_from(CellRef::new(row, *column)).is_none(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Cell;
    use crate::testutil::m2;

    #[test]
    fn accepts_the_worked_one_certificate() {
        let m = m2();
        let cert = Certificate::One {
            column: 0,
            chain: Chain {
                cells: vec![CellRef::new(0, 0), CellRef::new(0, 1)],
            },
        };
        assert!(verify_certificate(&m, &cert));
    }

    #[test]
    fn rejects_one_certificate_on_column_with_zero() {
        let m = m2();
        let cert = Certificate::One {
            column: 1,
            chain: Chain {
                cells: vec![CellRef::new(0, 1), CellRef::new(0, 0)],
            },
        };
        assert!(!verify_certificate(&m, &cert));
    }

    #[test]
    fn accepts_zero_every_column_on_all_zero_matrix() {
        let m = Matrix::new(
            2,
            vec![
                Cell::new(0, 0),
                Cell::new(0, 1),
                Cell::new(0, 2),
                Cell::new(0, 3),
            ],
        )
        .unwrap();
        let cert = Certificate::ZeroEveryColumn {
            witnesses: BTreeMap::from([(0, CellRef::new(0, 0)), (1, CellRef::new(0, 1))]),
        };
        assert!(verify_certificate(&m, &cert));
    }

    #[test]
    fn zero_every_column_needs_all_columns() {
        let m = m2();
        let cert = Certificate::ZeroEveryColumn {
            witnesses: BTreeMap::from([(1, CellRef::new(0, 1))]),
        };
        assert!(!verify_certificate(&m, &cert));
    }

    #[test]
    fn non_spanning_pair_rejected_when_a_column_is_all_ones() {
        // On the 1-input m2, span(0) = {0} and span(1) = {1}, so the bare
        // span condition would hold; the 0-bit requirement must reject it.
        let m = m2();
        let cert = Certificate::ZeroNonSpanningPair {
            col_a: 0,
            col_b: 1,
            span_a: BTreeSet::from([0]),
            span_b: BTreeSet::from([1]),
        };
        assert!(!verify_certificate(&m, &cert));
        assert_eq!(m.evaluate_reference(), 1);
    }

    #[test]
    fn non_spanning_pair_accepted_on_pointerless_zero_input() {
        let m = Matrix::new(
            2,
            vec![
                Cell::new(0, 0),
                Cell::new(0, 1),
                Cell::new(1, 2),
                Cell::new(0, 3),
            ],
        )
        .unwrap();
        let cert = Certificate::ZeroNonSpanningPair {
            col_a: 0,
            col_b: 1,
            span_a: BTreeSet::from([0]),
            span_b: BTreeSet::from([1]),
        };
        assert!(verify_certificate(&m, &cert));
        assert_eq!(m.evaluate_reference(), 0);
    }

    #[test]
    fn broken_column_accepted_when_chain_fails() {
        // Column 0 all-1 with (0,0) pointing at (1,0): the chain revisits
        // column 0 immediately.
        let m = Matrix::new(
            2,
            vec![
                Cell::new(1, 2),
                Cell::new(0, 1),
                Cell::new(1, 2),
                Cell::new(0, 3),
            ],
        )
        .unwrap();
        assert_eq!(m.evaluate_reference(), 0);
        let cert = Certificate::ZeroBrokenColumn {
            column: 0,
            reason: BrokenReason::NonZeroBit,
        };
        assert!(verify_certificate(&m, &cert));
    }

    #[test]
    fn broken_column_accepted_when_all_pointers_null() {
        let m = Matrix::new(
            2,
            vec![
                Cell::new(1, 0),
                Cell::new(0, 1),
                Cell::new(1, 2),
                Cell::new(0, 3),
            ],
        )
        .unwrap();
        let cert = Certificate::ZeroBrokenColumn {
            column: 0,
            reason: BrokenReason::AllPointersNull,
        };
        assert!(verify_certificate(&m, &cert));
    }

    #[test]
    fn broken_column_rejected_on_valid_chain() {
        let m = m2();
        let cert = Certificate::ZeroBrokenColumn {
            column: 0,
            reason: BrokenReason::PrematureNull,
        };
        assert!(!verify_certificate(&m, &cert));
    }
}
