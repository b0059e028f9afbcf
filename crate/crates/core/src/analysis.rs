//! Combinatorial checkers and statistical aggregation: the bad-index lemma
//! (both exact routes), milestone-gap diagnostics, log-log scaling fits, and
//! run-report summaries.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::RunReport;

/// A sequence of non-negative gap counts `x₁..x_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSequence {
    pub xs: Vec<f64>,
}

impl GapSequence {
    pub fn new(xs: Vec<f64>) -> Self {
        debug_assert!(xs.iter().all(|&x| x >= 0.0));
        Self { xs }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.xs.iter().sum()
    }
}

/// Prefix sums shared by both bad-index routes so their floating-point
/// comparisons agree exactly.
fn prefix_sums(xs: &[f64]) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(xs.len() + 1);
    prefix.push(0.0);
    for &x in xs {
        prefix.push(prefix.last().unwrap() + x);
    }
    prefix
}

/// An index `I ∈ [ℓ]` (1-based) is bad when some window starting at `I` has
/// `Σ_{i=I}^{I+D} x_i > 100·(D+1)·N/ℓ`. Exact O(ℓ) computation: with
/// `g(k) = prefix(k) − (100N/ℓ)·k`, index `I` is bad iff some `g(e)` with
/// `e ≥ I` exceeds `g(I−1)`, so one suffix-max scan decides every index.
pub fn bad_indices(g: &GapSequence) -> BTreeSet<usize> {
    let l = g.len();
    assert!(l >= 1);
    let n_total = g.total();
    let rate = 100.0 * n_total / l as f64;
    let prefix = prefix_sums(&g.xs);
    let score: Vec<f64> = (0..=l).map(|k| prefix[k] - rate * k as f64).collect();
    let mut suffix_max = vec![f64::NEG_INFINITY; l + 2];
    for k in (1..=l).rev() {
        suffix_max[k] = score[k].max(suffix_max[k + 1]);
    }
    (1..=l).filter(|&i| suffix_max[i] > score[i - 1]).collect()
}

/// Brute-force route: scans every `(I, D)` window directly.
pub fn bad_indices_brute(g: &GapSequence) -> BTreeSet<usize> {
    let l = g.len();
    assert!(l >= 1);
    let n_total = g.total();
    let rate = 100.0 * n_total / l as f64;
    let prefix = prefix_sums(&g.xs);
    let mut bad = BTreeSet::new();
    for i in 1..=l {
        for e in i..=l {
            let window = prefix[e] - prefix[i - 1];
            let d = e - i; // D = e − I, window covers D+1 terms
            if window > rate * (d + 1) as f64 {
                bad.insert(i);
                break;
            }
        }
    }
    bad
}

/// The greedy interval cover from the lemma's proof: disjoint intervals
/// `[j, j+d]` that contain every bad index, each with window sum strictly
/// above `100·|J|·N/ℓ`.
pub fn greedy_intervals(g: &GapSequence) -> Vec<(usize, usize)> {
    let l = g.len();
    let n_total = g.total();
    let rate = 100.0 * n_total / l as f64;
    let prefix = prefix_sums(&g.xs);
    let bad = bad_indices(g);
    let mut intervals = Vec::new();
    let mut floor = 0usize; // highest index already covered
    for &j in &bad {
        if j <= floor {
            continue;
        }
        // Smallest witness window for j.
        let mut end = None;
        for e in j..=l {
            let window = prefix[e] - prefix[j - 1];
            if window > rate * (e - j + 1) as f64 {
                end = Some(e);
                break;
            }
        }
        let e = end.expect("a bad index has a witness window");
        intervals.push((j, e));
        floor = e;
    }
    intervals
}

/// Milestone gaps of a 1-input: with the principle chain crossing the
/// columns of the live set `C` at positions `m₁ < … < m_ℓ` (in chain order),
/// `X_i` counts the chain columns from `m_i` up to but excluding `m_{i+1}`,
/// and `X_ℓ` counts from `m_ℓ` through the end. When `C` contains the
/// special column the gaps sum to exactly `s`.
pub fn milestone_gaps(m: &Matrix, c: &BTreeSet<usize>) -> Result<GapSequence> {
    let Some((special, chain)) = m.principle_chain() else {
        return Err(Error::NotAOneInput);
    };
    assert!(
        c.contains(&special),
        "the live set must contain the special column: it is never discarded"
    );
    let chain_cols = chain.columns();
    let positions: Vec<usize> = chain_cols
        .iter()
        .enumerate()
        .filter(|(_, col)| c.contains(col))
        .map(|(pos, _)| pos)
        .collect();
    let s = m.side();
    let mut xs = Vec::with_capacity(positions.len());
    for (k, &pos) in positions.iter().enumerate() {
        let next = if k + 1 < positions.len() {
            positions[k + 1]
        } else {
            s
        };
        xs.push((next - pos) as f64);
    }
    let g = GapSequence::new(xs);
    debug_assert_eq!(g.total() as usize, s);
    Ok(g)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope of log(y) against log(n).
    pub slope: f64,
    pub r2: f64,
}

/// Least-squares fit of `log y` vs `log n` over at least three points with
/// strictly increasing positive `n` and positive `y`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "{} points, need at least 3",
            points.len()
        )));
    }
    for window in points.windows(2) {
        if window[1].0 <= window[0].0 {
            return Err(Error::DegenerateInput(
                "n values must be strictly increasing".into(),
            ));
        }
    }
    if points.iter().any(|&(n, y)| n <= 0.0 || y <= 0.0) {
        return Err(Error::DegenerateInput(
            "all coordinates must be positive".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, y)| (n.ln(), y.ln())).collect();
    let count = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(x, y) in &logs {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    if var == 0.0 {
        return Err(Error::DegenerateInput("zero variance in log n".into()));
    }
    let slope = cov / var;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = logs.iter().map(|&(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(ScalingFit {
        points: points.to_vec(),
        slope,
        r2,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub mean: f64,
    pub max: u64,
    pub p50: u64,
    pub p95: u64,
    pub p99: u64,
    pub success_rate: f64,
}

/// Descriptive statistics of entry queries plus the success rate against
/// the reference answers. Quantiles are nearest-rank.
pub fn aggregate(reports: &[RunReport], expected: &[u8]) -> Summary {
    assert!(!reports.is_empty());
    assert_eq!(reports.len(), expected.len());
    let mut queries: Vec<u64> = reports.iter().map(|r| r.entry_queries).collect();
    queries.sort_unstable();
    let trials = reports.len();
    let mean = queries.iter().sum::<u64>() as f64 / trials as f64;
    let quantile = |p: f64| -> u64 {
        let rank = (p * trials as f64).ceil().max(1.0) as usize;
        queries[rank.min(trials) - 1]
    };
    let matches = reports
        .iter()
        .zip(expected)
        .filter(|(r, &e)| r.answer == e)
        .count();
    Summary {
        trials,
        mean,
        max: *queries.last().unwrap(),
        p50: quantile(0.50),
        p95: quantile(0.95),
        p99: quantile(0.99),
        success_rate: matches as f64 / trials as f64,
    }
}
