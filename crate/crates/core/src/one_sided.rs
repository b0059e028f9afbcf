//! The one-sided-error algorithm: milestone-disciplined pointer traces, a
//! column verifier, and the sampling main loop.
//!
//! The algorithm hunts for a 1-certificate and answers 0 whenever it fails
//! to find one, so a 1 answer is always certified and 0-inputs are never
//! misclassified. The milestone discipline is the budget rule in the trace
//! loop: a pointer walk is abandoned unless it keeps discarding roughly one
//! fresh column per `√n/|C|` steps.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::certificate::{verify_certificate, BrokenReason, Certificate};
use crate::columns::ColumnSet;
use crate::matrix::{CellRef, Chain, Matrix};
use crate::oracle::{OracleMode, QueryOracle, Transcript};
use crate::report::RunReport;
use crate::rng::{seeded, uniform_below};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneSidedConfig {
    /// Constant in the while-loop budget `budget_factor · √n · discard/|C|`.
    pub budget_factor: f64,
    /// The loop exits early once `|C|` drops below this; the final phase
    /// reads the survivors in full.
    pub small_set_threshold: usize,
    /// The main loop runs `⌈loop_multiplier · √n · log₂ n⌉` iterations.
    pub loop_multiplier: f64,
    pub rng_seed: u64,
}

impl Default for OneSidedConfig {
    fn default() -> Self {
        Self {
            budget_factor: 100.0,
            small_set_threshold: 100,
            loop_multiplier: 10.0,
            rng_seed: 0,
        }
    }
}

impl OneSidedConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }

    pub fn iterations(&self, s: usize) -> u64 {
        let n = (s * s) as f64;
        (self.loop_multiplier * (s as f64) * n.log2()).ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEnd {
    /// The starting bit-entry was 1; nothing discarded.
    HitOneBit,
    /// The walk reached a null pointer.
    NullPointer,
    /// The step budget ran out.
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct TraceOutcome {
    /// Columns removed from the live set by this call.
    pub discarded: BTreeSet<usize>,
    /// Entry reads made by this call, repeats included.
    pub queries_entry: u64,
    pub ended_by: TraceEnd,
}

/// One milestone-disciplined pointer trace.
///
/// Reads the bit at `start` and returns immediately if it is 1. Otherwise
/// walks pointers while `step ≤ budget_factor · √n · discard/|C|`, with `|C|`
/// fixed at its size on entry, marking every fresh live column seen with a
/// 0 bit-entry. On exit (null pointer or exhausted budget) the marked
/// columns are removed from `c`.
///
/// The accounting inequality — queries ≤ discarded · 2·budget_factor·√n/|C|
/// + 3 — is asserted on every call.
pub fn milestone_trace(
    o: &mut QueryOracle<'_>,
    c: &mut ColumnSet,
    start: CellRef,
    cfg: &OneSidedConfig,
) -> TraceOutcome {
    debug_assert!(c.contains(start.col), "trace must start in a live column");
    let c_entry = c.len() as f64;
    let s = o.side() as f64;
    let mut queries = 0u64;

    let bit = o.read_bit(start).expect("start cell in range");
    queries += 1;
    if bit == 1 {
        return TraceOutcome {
            discarded: BTreeSet::new(),
            queries_entry: queries,
            ended_by: TraceEnd::HitOneBit,
        };
    }

    let mut seen = BTreeSet::new();
    seen.insert(start.col);
    let mut discard = 1u64;
    let mut step = 0u64;
    let mut current = start;
    let ended_by;
    loop {
        if (step as f64) > cfg.budget_factor * s * (discard as f64) / c_entry {
            ended_by = TraceEnd::BudgetExhausted;
            break;
        }
        let ptr = o.read_ptr(current).expect("current cell in range");
        queries += 1;
        step += 1;
        match ptr {
            None => {
                ended_by = TraceEnd::NullPointer;
                break;
            }
            Some(next) => {
                let b = o.read_bit(next).expect("pointer target in range");
                queries += 1;
                if b == 0 && c.contains(next.col) && !seen.contains(&next.col) {
                    seen.insert(next.col);
                    discard += 1;
                }
                current = next;
            }
        }
    }
    c.remove_all(&seen);

    let bound = (discard as f64) * 2.0 * cfg.budget_factor * s / c_entry + 3.0;
    assert!(
        (queries as f64) <= bound + 1e-9,
        "milestone accounting violated: {} queries, {} discarded, |C|={}, bound {}",
        queries,
        discard,
        c_entry,
        bound
    );
    debug_assert_eq!(discard as usize, seen.len());
    TraceOutcome {
        discarded: seen,
        queries_entry: queries,
        ended_by,
    }
}

/// Outcome of checking one column for completion into a 1-certificate.
#[derive(Debug, Clone)]
pub enum ColumnCheck {
    /// All-1 column with a valid chain; carries the finished certificate.
    ValidOne(Certificate),
    /// All-1 column that cannot be completed: broken or pointerless chain.
    Broken(BrokenReason),
    /// A 0 bit-entry at this cell; the column is not special.
    HasZero(CellRef),
}

impl ColumnCheck {
    /// The 0/1 output of the column verifier.
    pub fn answer(&self) -> u8 {
        match self {
            ColumnCheck::ValidOne(_) => 1,
            _ => 0,
        }
    }
}

/// Checks whether column `k` is all-1 and completes into a 1-certificate:
/// scans the bits, then the pointers in row order down to the first non-null
/// entry, then walks the chain. Every read goes through the oracle.
pub fn verify_column(o: &mut QueryOracle<'_>, k: usize) -> ColumnCheck {
    let s = o.side();
    for row in 0..s {
        let r = CellRef::new(row, k);
        if o.read_bit(r).expect("column cell in range") == 0 {
            return ColumnCheck::HasZero(r);
        }
    }
    let mut head = None;
    for row in 0..s {
        if let Some(target) = o
            .read_ptr(CellRef::new(row, k))
            .expect("column cell in range")
        {
            head = Some((CellRef::new(row, k), target));
            break;
        }
    }
    let Some((head, first_target)) = head else {
        return ColumnCheck::Broken(BrokenReason::AllPointersNull);
    };

    // Walk the chain. The head bit is 1 (the column scan above saw it); the
    // next s−1 cells must carry bit 0 in pairwise-fresh columns, and the
    // last must point nowhere.
    let mut cells = vec![head];
    let mut seen_cols = vec![false; s];
    seen_cols[k] = true;
    let mut next = first_target;
    loop {
        if cells.len() == s {
            return ColumnCheck::Broken(BrokenReason::Unterminated);
        }
        if o.read_bit(next).expect("chain cell in range") != 0 {
            return ColumnCheck::Broken(BrokenReason::NonZeroBit);
        }
        if seen_cols[next.col] {
            return ColumnCheck::Broken(BrokenReason::RepeatedColumn);
        }
        seen_cols[next.col] = true;
        cells.push(next);
        match o.read_ptr(next).expect("chain cell in range") {
            Some(t) => next = t,
            None => {
                if cells.len() == s {
                    let cert = Certificate::One {
                        column: k,
                        chain: Chain { cells },
                    };
                    return ColumnCheck::ValidOne(cert);
                }
                return ColumnCheck::Broken(BrokenReason::PrematureNull);
            }
        }
    }
}

/// Detailed result of a one-sided run, for audits and diagnostics.
pub struct OneSidedRun {
    pub report: RunReport,
    /// Columns still live when the run ended.
    pub surviving_columns: Vec<usize>,
    pub transcript: Transcript,
    pub trace_calls: u64,
}

/// The full one-sided algorithm.
///
/// Starting from all columns live, repeatedly samples a live column and a
/// uniform row and runs [`milestone_trace`], exiting the loop early once
/// fewer than `small_set_threshold` columns survive. The final phase answers
/// 0 when more than the threshold survive (or none do); otherwise it reads
/// the survivors in full and tries to verify an all-1 column. A 1 answer
/// always carries a verified certificate.
pub fn run_one_sided(m: &Matrix, cfg: &OneSidedConfig) -> RunReport {
    run_one_sided_full(m, cfg).report
}

pub fn run_one_sided_full(m: &Matrix, cfg: &OneSidedConfig) -> OneSidedRun {
    assert!(cfg.budget_factor > 0.0 && cfg.loop_multiplier > 0.0 && cfg.small_set_threshold > 0);
    let s = m.side();
    let mut o = QueryOracle::new(m, OracleMode::Cached);
    let mut rng = seeded(cfg.rng_seed);
    let mut c = ColumnSet::full(s);
    let mut rounds = 0u64;
    let mut trace_calls = 0u64;

    for _ in 0..cfg.iterations(s) {
        if c.len() < cfg.small_set_threshold {
            break;
        }
        rounds += 1;
        let col = c.sample(&mut rng);
        let row = uniform_below(&mut rng, s);
        milestone_trace(&mut o, &mut c, CellRef::new(row, col), cfg);
        trace_calls += 1;
    }

    let (answer, cert) = if c.len() > cfg.small_set_threshold || c.is_empty() {
        (0, None)
    } else {
        // Read the surviving columns in full, then verify the first all-1
        // column if any.
        let mut all_ones_col = None;
        for col in c.iter() {
            let mut all_ones = true;
            for row in 0..s {
                if o.read_bit(CellRef::new(row, col)).expect("in range") == 0 {
                    all_ones = false;
                }
            }
            if all_ones && all_ones_col.is_none() {
                all_ones_col = Some(col);
            }
        }
        match all_ones_col {
            None => (0, None),
            Some(k) => match verify_column(&mut o, k) {
                ColumnCheck::ValidOne(cert) => {
                    assert!(
                        verify_certificate(m, &cert),
                        "one-sided produced an invalid certificate"
                    );
                    (1, Some(cert))
                }
                _ => (0, None),
            },
        }
    };

    let report = RunReport::from_stats(answer, cert, o.stats(), cfg.rng_seed, rounds);
    OneSidedRun {
        report,
        surviving_columns: c.as_slice().to_vec(),
        transcript: o.transcript(),
        trace_calls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Cell;
    use crate::oracle::ReadKind;
    use crate::testutil::{m2, one_chain_matrix};

    #[test]
    fn trace_on_one_bit_returns_immediately() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut c = ColumnSet::full(2);
        let out = milestone_trace(
            &mut o,
            &mut c,
            CellRef::new(0, 0),
            &OneSidedConfig::default(),
        );
        assert!(out.discarded.is_empty());
        assert_eq!(out.queries_entry, 1);
        assert!(matches!(out.ended_by, TraceEnd::HitOneBit));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn trace_follows_a_clean_chain_to_null() {
        // s=4 single valid chain from column 0, all other pointers null.
        let m = one_chain_matrix(4);
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut c = ColumnSet::full(4);
        // First 0-cell of the chain is (1,1).
        let out = milestone_trace(
            &mut o,
            &mut c,
            CellRef::new(1, 1),
            &OneSidedConfig::default(),
        );
        assert_eq!(out.discarded, BTreeSet::from([1, 2, 3]));
        assert!(matches!(out.ended_by, TraceEnd::NullPointer));
        assert_eq!(c.as_slice(), &[0]);
    }

    #[test]
    fn trace_abandons_a_decoy_cycle_by_budget() {
        // A 2-cycle of 0-cells inside column 1: (0,1) <-> (1,1). Fresh
        // columns stop arriving after the first, so the budget binds.
        let s = 4;
        let n = s * s;
        let mut cells: Vec<Cell> = (0..n).map(|i| Cell::new(1, i)).collect();
        let a = CellRef::new(0, 1);
        let b = CellRef::new(1, 1);
        cells[a.linear(s)] = Cell::new(0, b.linear(s));
        cells[b.linear(s)] = Cell::new(0, a.linear(s));
        let m = Matrix::new(s, cells).unwrap();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut c = ColumnSet::full(s);
        let out = milestone_trace(&mut o, &mut c, a, &OneSidedConfig::default());
        assert!(matches!(out.ended_by, TraceEnd::BudgetExhausted));
        assert_eq!(out.discarded, BTreeSet::from([1]));
        // Budget 100·4·1/4 = 100 steps, two reads per step plus the start.
        assert!(out.queries_entry <= 2 * 100 + 3);
    }

    #[test]
    fn verify_column_accepts_the_special_column() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        match verify_column(&mut o, 0) {
            ColumnCheck::ValidOne(cert) => {
                assert!(verify_certificate(&m, &cert));
                match cert {
                    Certificate::One { column, chain } => {
                        assert_eq!(column, 0);
                        assert_eq!(chain.cells, vec![CellRef::new(0, 0), CellRef::new(0, 1)]);
                    }
                    _ => unreachable!(),
                }
            }
            other => panic!("expected ValidOne, got {other:?}"),
        }
    }

    #[test]
    fn verify_column_rejects_on_zero_bit() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        assert!(matches!(verify_column(&mut o, 1), ColumnCheck::HasZero(_)));
    }

    #[test]
    fn verify_column_rejects_all_null_pointers() {
        // Column 0 all-1 with both pointers null.
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
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        assert!(matches!(
            verify_column(&mut o, 0),
            ColumnCheck::Broken(BrokenReason::AllPointersNull)
        ));
    }

    #[test]
    fn m2_is_answered_one_deterministically() {
        let m = m2();
        for seed in 0..16 {
            let report = run_one_sided(&m, &OneSidedConfig::with_seed(seed));
            assert_eq!(report.answer, 1);
            assert!(report.certified());
        }
    }

    #[test]
    fn all_zero_matrix_is_answered_zero() {
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
        let report = run_one_sided(&m, &OneSidedConfig::with_seed(3));
        assert_eq!(report.answer, 0);
        assert!(report.cert.is_none());
    }

    #[test]
    fn discards_are_justified_by_transcript_zeros() {
        let m = one_chain_matrix(8);
        let run = run_one_sided_full(&m, &OneSidedConfig::with_seed(9));
        assert_eq!(run.report.answer, 1);
        let discarded: Vec<usize> = (0..8)
            .filter(|c| !run.surviving_columns.contains(c))
            .collect();
        for col in discarded {
            let witnessed = run
                .transcript
                .entries()
                .iter()
                .any(|e| matches!(e.kind, ReadKind::Bit) && e.cell.col == col && e.value == 0);
            assert!(
                witnessed,
                "column {col} was discarded without a transcript zero"
            );
        }
        // The special column survives every run of every seed.
        assert!(run.surviving_columns.contains(&0));
    }
}
