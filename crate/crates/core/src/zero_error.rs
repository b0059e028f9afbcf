//! The zero-error side: sparsification, span-based column elimination
//! (procedures A and B), the one-sided-toward-zero algorithm, and the
//! composed driver that alternates both algorithms until either produces a
//! certificate.
//!
//! This side errs toward 1: a 0 answer always carries a verified
//! certificate, while a 1 answer may be uncertified (heavy-column aborts,
//! loop exhaustion). The driver treats any uncertified answer as "unknown,
//! retry with fresh seeds", so its final answer is always certified and
//! always correct.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::certificate::{verify_certificate, Certificate};
use crate::columns::ColumnSet;
use crate::error::{Error, Result};
use crate::matrix::{CellRef, Matrix};
use crate::one_sided::{run_one_sided_full, verify_column, ColumnCheck, OneSidedConfig};
use crate::oracle::{OracleMode, QueryOracle, ReadKind, Transcript};
use crate::report::{RoundSummary, RunReport};
use crate::rng::{derive_seed, seeded, uniform_below, SeededRng};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroErrorConfig {
    /// Sparsification samples `⌈spars_multiplier · n^{1/4} · log₂ n⌉` cells
    /// per column.
    pub spars_multiplier: f64,
    /// Procedure A repeats `⌈alpha · log₂ log₂ n⌉` times per stage.
    pub alpha: f64,
    pub rng_seed: u64,
}

impl Default for ZeroErrorConfig {
    fn default() -> Self {
        Self {
            spars_multiplier: 10.0,
            alpha: 4.0,
            rng_seed: 0,
        }
    }
}

impl ZeroErrorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }

    /// Per-column sample count `T`.
    pub fn sample_budget(&self, s: usize) -> u64 {
        let n = (s * s) as f64;
        (self.spars_multiplier * n.powf(0.25) * n.log2()).ceil() as u64
    }

    /// Stage repeat count for procedure A.
    pub fn repeat_count(&self, s: usize) -> u64 {
        let n = (s * s) as f64;
        (self.alpha * n.log2().log2()).ceil().max(1.0) as u64
    }
}

/// Least `t` with `√n · (99/100)^t ≤ 1`.
pub fn tau(s: usize) -> u32 {
    let mut x = s as f64;
    let mut t = 0u32;
    while x > 1.0 {
        x *= 0.99;
        t += 1;
    }
    t
}

/// A column is heavy when it holds strictly more than `n^{1/4} = √s` zeros.
pub fn heavy_threshold(s: usize) -> f64 {
    (s as f64).sqrt()
}

/// Per-run memo over traced 0-cells. Sharing one memo across the span
/// removals guarantees every 0-cell is traversed at most once per run, which
/// both detects pointer cycles and bounds the total tracing work by the
/// number of 0-cells in the matrix.
#[derive(Debug, Clone)]
pub struct SpanTraceMemo {
    visited: Vec<bool>,
    visited_count: u64,
}

impl SpanTraceMemo {
    pub fn new(n: usize) -> Self {
        Self {
            visited: vec![false; n],
            visited_count: 0,
        }
    }

    pub fn is_visited(&self, idx: usize) -> bool {
        self.visited[idx]
    }

    fn mark(&mut self, idx: usize) -> bool {
        if self.visited[idx] {
            false
        } else {
            self.visited[idx] = true;
            self.visited_count += 1;
            true
        }
    }

    /// 0-cells traversed so far through this memo.
    pub fn visited_count(&self) -> u64 {
        self.visited_count
    }
}

/// Result of scanning one column and tracing its span.
#[derive(Debug, Clone)]
pub struct SpanScan {
    pub span: BTreeSet<usize>,
    pub heavy: bool,
    pub all_ones: bool,
    pub zero_count: u64,
}

/// Reads all entries of column `col` through the oracle, then — unless the
/// column is all-1 or heavy — traces pointers from every 0-cell, moving
/// through 0-bit cells only and stopping at 1-bit cells, null pointers, and
/// memo-visited cells. The span is `col` plus the columns of all 0-cells
/// sighted. With a fresh memo the result equals the full-knowledge span;
/// with a shared memo it may omit columns whose cells were already traced
/// (and therefore already removed) earlier in the run.
pub fn span_traced(o: &mut QueryOracle<'_>, col: usize, memo: &mut SpanTraceMemo) -> SpanScan {
    let s = o.side();
    let mut zeros = Vec::new();
    for row in 0..s {
        let r = CellRef::new(row, col);
        if o.read_bit(r).expect("column cell in range") == 0 {
            zeros.push(r);
        }
    }
    for row in 0..s {
        o.read_ptr(CellRef::new(row, col))
            .expect("column cell in range");
    }
    let zero_count = zeros.len() as u64;
    let all_ones = zero_count == 0;
    let heavy = (zero_count as f64) > heavy_threshold(s);
    let mut span = BTreeSet::from([col]);
    if all_ones || heavy {
        return SpanScan {
            span,
            heavy,
            all_ones,
            zero_count,
        };
    }

    let mut stack = Vec::new();
    for &r in &zeros {
        if memo.mark(r.linear(s)) {
            stack.push(r);
        }
    }
    while let Some(cell) = stack.pop() {
        span.insert(cell.col);
        if let Some(next) = o.read_ptr(cell).expect("traced cell in range") {
            if o.read_bit(next).expect("pointer target in range") == 0 {
                span.insert(next.col);
                if memo.mark(next.linear(s)) {
                    stack.push(next);
                }
            }
        }
    }
    SpanScan {
        span,
        heavy,
        all_ones,
        zero_count,
    }
}

/// Sparsification: for each live column, up to `T` uniform row samples with
/// replacement; the column is removed as soon as a sampled bit-entry is 0.
/// Stopping at the first zero reads fewer entries but removes exactly the
/// same columns as sampling all `T` cells up front.
pub fn sparsify(
    o: &mut QueryOracle<'_>,
    rng: &mut SeededRng,
    c: &mut ColumnSet,
    cfg: &ZeroErrorConfig,
) {
    let s = o.side();
    let budget = cfg.sample_budget(s);
    let mut removed = BTreeSet::new();
    for col in c.iter() {
        for _ in 0..budget {
            let row = uniform_below(rng, s);
            if o.read_bit(CellRef::new(row, col))
                .expect("sampled cell in range")
                == 0
            {
                removed.insert(col);
                break;
            }
        }
    }
    c.remove_all(&removed);
}

/// Terminal or continuing outcome of one procedure step.
#[derive(Debug, Clone)]
pub enum StepOutcome {
    /// Keep going; procedure A has already removed the sampled span from
    /// the live set.
    Continue,
    /// A heavy column slipped past sparsification: give up on certifying 0
    /// and answer an uncertified 1.
    AbortOne,
    /// An all-1 column was sampled and fully checked.
    Verified { answer: u8, cert: Certificate },
    /// Procedure B found two mutually non-spanning columns.
    ZeroPair(Certificate),
}

/// Procedure A: sample a live column uniformly, scan it, and either verify
/// it (all-1), abort (heavy), or discard its whole span from the live set.
pub fn procedure_a(
    o: &mut QueryOracle<'_>,
    rng: &mut SeededRng,
    c: &mut ColumnSet,
    memo: &mut SpanTraceMemo,
) -> StepOutcome {
    debug_assert!(!c.is_empty());
    let col = c.sample(rng);
    let scan = span_traced(o, col, memo);
    if scan.all_ones {
        return verified_outcome(o, col);
    }
    if scan.heavy {
        return StepOutcome::AbortOne;
    }
    c.remove_all(&scan.span);
    StepOutcome::Continue
}

/// Procedure B: sample two distinct live columns and test whether either
/// spans the other. All-1 and heavy handling mirror procedure A, applied to
/// each column. The two spans are traced with fresh memos so they equal the
/// full-knowledge spans; a span truncated by the shared removal memo could
/// miss a covered column and fabricate a non-spanning pair.
pub fn procedure_b(o: &mut QueryOracle<'_>, rng: &mut SeededRng, c: &mut ColumnSet) -> StepOutcome {
    debug_assert!(c.len() >= 2);
    let (col_a, col_b) = c.sample_two_distinct(rng);
    let n = o.n();

    let scan_a = span_traced(o, col_a, &mut SpanTraceMemo::new(n));
    if scan_a.all_ones {
        return verified_outcome(o, col_a);
    }
    let scan_b = span_traced(o, col_b, &mut SpanTraceMemo::new(n));
    if scan_b.all_ones {
        return verified_outcome(o, col_b);
    }
    if scan_a.heavy || scan_b.heavy {
        return StepOutcome::AbortOne;
    }
    if !scan_a.span.contains(&col_b) && !scan_b.span.contains(&col_a) {
        let cert = Certificate::ZeroNonSpanningPair {
            col_a,
            col_b,
            span_a: scan_a.span,
            span_b: scan_b.span,
        };
        return StepOutcome::ZeroPair(cert);
    }
    StepOutcome::Continue
}

fn verified_outcome(o: &mut QueryOracle<'_>, col: usize) -> StepOutcome {
    match verify_column(o, col) {
        ColumnCheck::ValidOne(cert) => StepOutcome::Verified { answer: 1, cert },
        ColumnCheck::Broken(reason) => StepOutcome::Verified {
            answer: 0,
            cert: Certificate::ZeroBrokenColumn {
                column: col,
                reason,
            },
        },
        // The caller only verifies columns whose scan saw no zero.
        ColumnCheck::HasZero(_) => unreachable!("verified column rescanned with a zero"),
    }
}

/// Assembles the every-column 0-certificate from the oracle transcript: the
/// first witnessed 0 bit-entry of each column. Every elimination path reads
/// the zero it acts on, so when the live set empties a witness exists for
/// every column.
fn zero_every_column_cert(o: &QueryOracle<'_>) -> Certificate {
    let mut witnesses: BTreeMap<usize, CellRef> = BTreeMap::new();
    for e in o.transcript_entries() {
        if matches!(e.kind, ReadKind::Bit) && e.value == 0 {
            witnesses.entry(e.cell.col).or_insert(e.cell);
        }
    }
    Certificate::ZeroEveryColumn { witnesses }
}

/// Detailed result of a zero-sided run.
pub struct ZeroSidedRun {
    pub report: RunReport,
    pub transcript: Transcript,
}

/// The zero-error-side algorithm: sparsify, then for up to `τ` stages run
/// procedure A `⌈alpha·log₂ log₂ n⌉` times and procedure B once, exiting as
/// soon as at most one column survives or a terminal outcome fires. The
/// endgame: an empty live set certifies 0 with a zero-in-every-column
/// witness; a single survivor goes through the column verifier; anything
/// else answers an uncertified 1.
pub fn run_zero_sided(m: &Matrix, cfg: &ZeroErrorConfig) -> RunReport {
    run_zero_sided_full(m, cfg).report
}

pub fn run_zero_sided_full(m: &Matrix, cfg: &ZeroErrorConfig) -> ZeroSidedRun {
    assert!(cfg.spars_multiplier > 0.0 && cfg.alpha > 0.0);
    let s = m.side();
    let mut o = QueryOracle::new(m, OracleMode::Cached);
    let mut rng = seeded(cfg.rng_seed);
    let mut c = ColumnSet::full(s);
    let mut memo = SpanTraceMemo::new(m.n());
    let mut rounds = 0u64;

    sparsify(&mut o, &mut rng, &mut c, cfg);

    let mut terminal: Option<(u8, Option<Certificate>)> = None;
    'stages: for _ in 0..tau(s) {
        if c.len() <= 1 {
            break;
        }
        rounds += 1;
        for _ in 0..cfg.repeat_count(s) {
            if c.len() <= 1 {
                break;
            }
            match procedure_a(&mut o, &mut rng, &mut c, &mut memo) {
                StepOutcome::Continue => {}
                StepOutcome::AbortOne => {
                    terminal = Some((1, None));
                    break 'stages;
                }
                StepOutcome::Verified { answer, cert } => {
                    terminal = Some((answer, Some(cert)));
                    break 'stages;
                }
                StepOutcome::ZeroPair(_) => unreachable!("procedure A cannot emit a pair"),
            }
        }
        if c.len() >= 2 {
            match procedure_b(&mut o, &mut rng, &mut c) {
                StepOutcome::Continue => {}
                StepOutcome::AbortOne => {
                    terminal = Some((1, None));
                    break 'stages;
                }
                StepOutcome::Verified { answer, cert } => {
                    terminal = Some((answer, Some(cert)));
                    break 'stages;
                }
                StepOutcome::ZeroPair(cert) => {
                    terminal = Some((0, Some(cert)));
                    break 'stages;
                }
            }
        }
    }

    let (answer, cert) = match terminal {
        Some(t) => t,
        None => {
            if c.is_empty() {
                (0, Some(zero_every_column_cert(&o)))
            } else if c.len() == 1 {
                let col = c.as_slice()[0];
                match verify_column(&mut o, col) {
                    ColumnCheck::ValidOne(cert) => (1, Some(cert)),
                    ColumnCheck::Broken(reason) => (
                        0,
                        Some(Certificate::ZeroBrokenColumn {
                            column: col,
                            reason,
                        }),
                    ),
                    // A lone 0-bit in the survivor rules this column out but
                    // certifies nothing about the rest of the matrix, so the
                    // answer stays an uncertified 1.
                    ColumnCheck::HasZero(_) => (1, None),
                }
            } else {
                (1, None)
            }
        }
    };

    // A certified answer must verify and a 0 answer must be certified;
    // anything else is an internal bug.
    if let Some(ref cert) = cert {
        assert!(
            verify_certificate(m, cert),
            "zero-sided produced an invalid certificate"
        );
        assert_eq!(cert.claimed_value(), answer);
    } else {
        assert_eq!(answer, 1, "a 0 answer must carry a certificate");
    }

    let report = RunReport::from_stats(answer, cert, o.stats(), cfg.rng_seed, rounds);
    ZeroSidedRun {
        report,
        transcript: o.transcript(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZppConfig {
    pub one_sided: OneSidedConfig,
    pub zero_error: ZeroErrorConfig,
    /// A correctness bug is the only way to get anywhere near this.
    pub round_cap: u32,
    pub rng_seed: u64,
}

impl Default for ZppConfig {
    fn default() -> Self {
        Self {
            one_sided: OneSidedConfig::default(),
            zero_error: ZeroErrorConfig::default(),
            round_cap: 1000,
            rng_seed: 0,
        }
    }
}

impl ZppConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }
}

/// Detailed result of a driver run: the report plus one transcript per
/// algorithm invocation, in execution order.
pub struct ZppRun {
    pub report: RunReport,
    pub round_transcripts: Vec<Transcript>,
}

/// The composed zero-error driver: per round, run the one-sided algorithm
/// and stop on a certified answer; otherwise run the zero-error side and
/// stop on a certified answer; otherwise draw fresh seeds and repeat. The
/// returned answer always equals the reference evaluation, and the stats
/// aggregate every round.
pub fn run_zpp(m: &Matrix, cfg: &ZppConfig) -> Result<RunReport> {
    run_zpp_full(m, cfg).map(|run| run.report)
}

pub fn run_zpp_full(m: &Matrix, cfg: &ZppConfig) -> Result<ZppRun> {
    let mut total = crate::oracle::QueryStats::default();
    let mut breakdown = Vec::new();
    let mut transcripts = Vec::new();
    let finish = |answer: u8,
                  cert: Option<Certificate>,
                  total: crate::oracle::QueryStats,
                  round: u32,
                  breakdown: Vec<RoundSummary>,
                  transcripts: Vec<Transcript>| {
        let mut report = RunReport::from_stats(answer, cert, total, cfg.rng_seed, u64::from(round));
        report.round_breakdown = breakdown;
        Ok(ZppRun {
            report,
            round_transcripts: transcripts,
        })
    };
    for round in 1..=cfg.round_cap {
        let one_seed = derive_seed(cfg.rng_seed, u64::from(round) * 2);
        let one_cfg = OneSidedConfig {
            rng_seed: one_seed,
            ..cfg.one_sided.clone()
        };
        let one = run_one_sided_full(m, &one_cfg);
        transcripts.push(one.transcript);
        let one = one.report;
        total.entry_queries += one.entry_queries;
        total.bit_queries += one.bit_queries;
        total.raw_reads += one.raw_reads;
        breakdown.push(RoundSummary {
            round,
            algorithm: "one_sided".into(),
            answer: one.answer,
            certified: one.certified(),
            entry_queries: one.entry_queries,
        });
        if one.certified() {
            return finish(one.answer, one.cert, total, round, breakdown, transcripts);
        }

        let zero_seed = derive_seed(cfg.rng_seed, u64::from(round) * 2 + 1);
        let zero_cfg = ZeroErrorConfig {
            rng_seed: zero_seed,
            ..cfg.zero_error.clone()
        };
        let zero = run_zero_sided_full(m, &zero_cfg);
        transcripts.push(zero.transcript);
        let zero = zero.report;
        total.entry_queries += zero.entry_queries;
        total.bit_queries += zero.bit_queries;
        total.raw_reads += zero.raw_reads;
        breakdown.push(RoundSummary {
            round,
            algorithm: "zero_sided".into(),
            answer: zero.answer,
            certified: zero.certified(),
            entry_queries: zero.entry_queries,
        });
        if zero.certified() {
            return finish(zero.answer, zero.cert, total, round, breakdown, transcripts);
        }
    }
    Err(Error::RoundLimitExceeded(cfg.round_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Cell;
    use crate::testutil::{all_zero_matrix, m2, one_chain_matrix};

    #[test]
    fn sparsify_keeps_all_one_columns_and_drops_all_zero_columns() {
        // Column 0 all ones, column 1 all zeros.
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
        for seed in 0..32 {
            let mut o = QueryOracle::new(&m, OracleMode::Cached);
            let mut rng = seeded(seed);
            let mut c = ColumnSet::full(2);
            sparsify(&mut o, &mut rng, &mut c, &ZeroErrorConfig::default());
            assert_eq!(c.as_slice(), &[0]);
        }
    }

    #[test]
    fn span_scan_matches_full_knowledge_span_when_fresh() {
        // s=4, heavy threshold 2: a single 0-cell in column 1 pointing at a
        // 0-cell in column 2.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        let a = CellRef::new(0, 1);
        let b = CellRef::new(1, 2);
        cells[a.linear(s)] = Cell::new(0, b.linear(s));
        cells[b.linear(s)] = Cell::new(0, b.linear(s));
        let m = Matrix::new(s, cells).unwrap();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut memo = SpanTraceMemo::new(m.n());
        let scan = span_traced(&mut o, 1, &mut memo);
        assert!(!scan.heavy);
        assert!(!scan.all_ones);
        assert_eq!(scan.span, m.span_full(1));
        assert_eq!(scan.span, BTreeSet::from([1, 2]));
    }

    #[test]
    fn tiny_side_spans_count_as_heavy_at_two_zeros() {
        // At s=2 the threshold √2 makes any 2-zero column heavy.
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let scan = span_traced(&mut o, 1, &mut SpanTraceMemo::new(m.n()));
        assert!(scan.heavy);
        assert_eq!(scan.span, BTreeSet::from([1]));
    }

    #[test]
    fn span_scan_flags_all_one_columns() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut memo = SpanTraceMemo::new(m.n());
        let scan = span_traced(&mut o, 0, &mut memo);
        assert!(scan.all_ones);
        assert_eq!(scan.span, BTreeSet::from([0]));
    }

    #[test]
    fn span_scan_flags_heavy_columns() {
        // s=4: threshold is √4 = 2 zeros; give column 0 three zeros.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        for row in 0..3 {
            cells[CellRef::new(row, 0).linear(s)] = Cell::new(0, CellRef::new(row, 0).linear(s));
        }
        let m = Matrix::new(s, cells).unwrap();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let scan = span_traced(&mut o, 0, &mut SpanTraceMemo::new(m.n()));
        assert!(scan.heavy);
        assert_eq!(scan.zero_count, 3);
    }

    #[test]
    fn memo_bounds_total_traversal_by_zero_cell_count() {
        // Chain matrix: every non-special column holds exactly one 0-cell.
        let s = 8;
        let m = one_chain_matrix(s);
        let total_zeros: u64 = (0..s).map(|c| m.zeros_in_column(c) as u64).sum();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut memo = SpanTraceMemo::new(m.n());
        for col in 0..s {
            span_traced(&mut o, col, &mut memo);
            span_traced(&mut o, col, &mut memo);
        }
        assert!(memo.visited_count() <= total_zeros);
        assert_eq!(memo.visited_count(), total_zeros);
    }

    #[test]
    fn zero_sided_accepts_every_one_input_path() {
        for seed in 0..24 {
            let report = run_zero_sided(&m2(), &ZeroErrorConfig::with_seed(seed));
            assert_eq!(report.answer, 1, "seed {seed}");
        }
    }

    #[test]
    fn all_zero_matrix_yields_every_column_certificate() {
        let m = all_zero_matrix(2);
        let report = run_zero_sided(&m, &ZeroErrorConfig::with_seed(1));
        assert_eq!(report.answer, 0);
        match report.cert {
            Some(Certificate::ZeroEveryColumn { ref witnesses }) => {
                assert_eq!(witnesses.len(), 2);
            }
            other => panic!("expected ZeroEveryColumn, got {other:?}"),
        }
    }

    #[test]
    fn procedure_b_finds_non_spanning_pairs_when_sparsification_is_weak() {
        // Four columns, one pointerless 0-cell each: all spans are
        // singletons. A tiny sampling budget lets columns survive into the
        // pair check, and a small alpha reaches procedure B before A
        // whittles the set down.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        for col in 0..s {
            let r = CellRef::new(col, col);
            cells[r.linear(s)] = Cell::new(0, r.linear(s));
        }
        let m = Matrix::new(s, cells).unwrap();
        assert_eq!(m.evaluate_reference(), 0);
        let mut saw_pair = false;
        for seed in 0..64 {
            let cfg = ZeroErrorConfig {
                spars_multiplier: 0.01,
                alpha: 0.1,
                rng_seed: seed,
            };
            let report = run_zero_sided(&m, &cfg);
            // A weak sparsification budget may leave too few columns for the
            // pair check; those seeds answer an uncertified 1, never a bad 0.
            if report.answer == 0 {
                assert!(report.certified(), "seed {seed}");
            }
            if matches!(report.cert, Some(Certificate::ZeroNonSpanningPair { .. })) {
                saw_pair = true;
            }
        }
        assert!(saw_pair, "no seed exercised the non-spanning pair path");
    }

    #[test]
    fn procedure_a_verifies_a_lone_all_one_column() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut rng = seeded(1);
        let mut c = ColumnSet::full(2);
        c.remove(1);
        let mut memo = SpanTraceMemo::new(m.n());
        match procedure_a(&mut o, &mut rng, &mut c, &mut memo) {
            StepOutcome::Verified { answer: 1, cert } => {
                assert!(verify_certificate(&m, &cert));
            }
            other => panic!("expected Verified(1), got {other:?}"),
        }
    }

    #[test]
    fn procedure_a_aborts_on_a_heavy_column() {
        // s=4, single column with 3 zeros (> threshold 2), rest all-1.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        for row in 0..3 {
            let r = CellRef::new(row, 0);
            cells[r.linear(s)] = Cell::new(0, r.linear(s));
        }
        let m = Matrix::new(s, cells).unwrap();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut rng = seeded(2);
        let mut c = ColumnSet::full(s);
        c.remove(1);
        c.remove(2);
        c.remove(3);
        let mut memo = SpanTraceMemo::new(m.n());
        assert!(matches!(
            procedure_a(&mut o, &mut rng, &mut c, &mut memo),
            StepOutcome::AbortOne
        ));
    }

    #[test]
    fn procedure_a_can_empty_the_live_set_in_one_step() {
        // A rope of 0-cells threading every column: the sampled column's
        // span covers all of C.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        for col in 0..s {
            let r = CellRef::new(0, col);
            let next = CellRef::new(0, (col + 1) % s);
            cells[r.linear(s)] = Cell::new(0, next.linear(s));
        }
        let m = Matrix::new(s, cells).unwrap();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        let mut rng = seeded(3);
        let mut c = ColumnSet::full(s);
        let mut memo = SpanTraceMemo::new(m.n());
        assert!(matches!(
            procedure_a(&mut o, &mut rng, &mut c, &mut memo),
            StepOutcome::Continue
        ));
        assert!(c.is_empty());
    }

    #[test]
    fn procedure_b_verifies_the_second_column_when_it_is_all_ones() {
        // s=4: column picked alongside the special one must route through
        // verify_column on the *second* branch. Columns 0 and 1 live;
        // column 1 is on a valid-chain 1-input, column 0 has a zero.
        let m = {
            // Special column 1: chain (0,1) -> (1,0) -> (2,2) -> (3,3).
            let s = 4;
            let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
            let chain = [
                CellRef::new(0, 1),
                CellRef::new(1, 0),
                CellRef::new(2, 2),
                CellRef::new(3, 3),
            ];
            for col in 0..s {
                for row in 0..s {
                    if col != 1 {
                        continue;
                    }
                    cells[CellRef::new(row, col).linear(s)].raw_ptr =
                        CellRef::new(row, col).linear(s);
                }
            }
            for (i, &cell) in chain.iter().enumerate() {
                let bit = u8::from(i == 0);
                let raw = if i + 1 < chain.len() {
                    chain[i + 1].linear(s)
                } else {
                    cell.linear(s)
                };
                cells[cell.linear(s)] = Cell::new(bit, raw);
            }
            Matrix::new(s, cells).unwrap()
        };
        assert_eq!(m.evaluate_reference(), 1);
        let mut c = ColumnSet::full(4);
        c.remove(2);
        c.remove(3);
        // Find a seed whose first pair draw is (0, 1): column 0 scanned
        // first, column 1 (all-1) verified second.
        let mut done = false;
        for seed in 0..64 {
            let mut probe = seeded(seed);
            if c.sample_two_distinct(&mut probe) != (0, 1) {
                continue;
            }
            let mut o = QueryOracle::new(&m, OracleMode::Cached);
            let mut rng = seeded(seed);
            match procedure_b(&mut o, &mut rng, &mut c) {
                StepOutcome::Verified { answer: 1, cert } => {
                    assert!(verify_certificate(&m, &cert));
                    assert!(matches!(cert, Certificate::One { column: 1, .. }));
                    done = true;
                    break;
                }
                other => panic!("expected Verified(1) for column 1, got {other:?}"),
            }
        }
        assert!(done, "no seed drew the pair (0, 1)");
    }

    #[test]
    fn procedure_b_continues_when_one_span_reaches_the_other() {
        // Column 0's 0-cell points into a 0-cell of column 1.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        let a = CellRef::new(0, 0);
        let b = CellRef::new(1, 1);
        cells[a.linear(s)] = Cell::new(0, b.linear(s));
        cells[b.linear(s)] = Cell::new(0, b.linear(s));
        let m = Matrix::new(s, cells).unwrap();
        let mut c = ColumnSet::full(s);
        c.remove(2);
        c.remove(3);
        for seed in 0..16 {
            let mut o = QueryOracle::new(&m, OracleMode::Cached);
            let mut rng = seeded(seed);
            assert!(matches!(
                procedure_b(&mut o, &mut rng, &mut c),
                StepOutcome::Continue
            ));
        }
    }

    #[test]
    fn broken_column_survivor_is_certified() {
        // Column 0 all-1 with null pointers everywhere: survives
        // sparsification, fails verification.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        for col in 1..s {
            let r = CellRef::new(col, col);
            cells[r.linear(s)] = Cell::new(0, r.linear(s));
        }
        let m = Matrix::new(s, cells).unwrap();
        assert_eq!(m.evaluate_reference(), 0);
        let report = run_zero_sided(&m, &ZeroErrorConfig::with_seed(5));
        assert_eq!(report.answer, 0);
        assert!(matches!(
            report.cert,
            Some(Certificate::ZeroBrokenColumn { .. })
        ));
    }

    #[test]
    fn every_column_certificate_assembles_from_span_eliminations() {
        // A rope of 0-cells through all columns. With a single-sample
        // budget, sparsification usually misses the lone zero per column;
        // procedure A's first span removal then empties the live set, and
        // the certificate must find a witnessed zero for every column in
        // the transcript.
        let s = 4;
        let mut cells: Vec<Cell> = (0..s * s).map(|i| Cell::new(1, i)).collect();
        for col in 0..s {
            let r = CellRef::new(0, col);
            let next = CellRef::new(0, (col + 1) % s);
            cells[r.linear(s)] = Cell::new(0, next.linear(s));
        }
        let m = Matrix::new(s, cells).unwrap();
        let mut via_span_removal = false;
        for seed in 0..64 {
            let cfg = ZeroErrorConfig {
                spars_multiplier: 0.01,
                alpha: 4.0,
                rng_seed: seed,
            };
            let report = run_zero_sided(&m, &cfg);
            if report.answer == 0 {
                let cert = report.cert.expect("0 answers are certified");
                assert!(verify_certificate(&m, &cert));
                // Rounds > 0 means the stage loop ran, i.e. at least two
                // columns survived sparsification and A did the emptying.
                if matches!(cert, Certificate::ZeroEveryColumn { .. }) && report.rounds > 0 {
                    via_span_removal = true;
                }
            }
        }
        assert!(
            via_span_removal,
            "no seed emptied the live set through procedure A"
        );
    }

    #[test]
    fn zpp_answers_m2_in_one_round() {
        let report = run_zpp(&m2(), &ZppConfig::with_seed(2)).unwrap();
        assert_eq!(report.answer, 1);
        assert_eq!(report.rounds, 1);
        assert!(report.certified());
    }

    #[test]
    fn zpp_answers_all_zero_in_one_round() {
        let report = run_zpp(&all_zero_matrix(2), &ZppConfig::with_seed(2)).unwrap();
        assert_eq!(report.answer, 0);
        assert_eq!(report.rounds, 1);
        assert!(report.certified());
    }

    #[test]
    fn tau_is_the_least_shrink_count() {
        assert_eq!(tau(2), 69);
        // Direct check of minimality.
        for s in [2usize, 4, 16, 100] {
            let t = tau(s);
            let shrink = |k: u32| (s as f64) * 0.99f64.powi(k as i32);
            assert!(shrink(t) <= 1.0);
            if t > 0 {
                assert!(shrink(t - 1) > 1.0);
            }
        }
    }
}
