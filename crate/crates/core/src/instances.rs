//! Seeded instance generators: 1-inputs with optional decoy chains, the
//! three 0-input families matching the three zero-certificate kinds, and
//! i.i.d. random matrices for fuzzing.
//!
//! Every generator asserts its declared function value before returning, and
//! the same `GenSpec` always produces the bit-identical matrix.

use serde::{Deserialize, Serialize};

use crate::matrix::{Cell, CellRef, Matrix};
use crate::rng::{coin, seeded, uniform_below, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    OneClean,
    OneDecoy,
    ZeroDense,
    ZeroSparseNonspanning,
    ZeroBrokenColumn,
    Random,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::OneClean => "one_clean",
            Family::OneDecoy => "one_decoy",
            Family::ZeroDense => "zero_dense",
            Family::ZeroSparseNonspanning => "zero_sparse_nonspanning",
            Family::ZeroBrokenColumn => "zero_broken_column",
            Family::Random => "random",
        }
    }

    pub fn parse(text: &str) -> Option<Family> {
        match text {
            "one_clean" => Some(Family::OneClean),
            "one_decoy" => Some(Family::OneDecoy),
            "zero_dense" => Some(Family::ZeroDense),
            "zero_sparse_nonspanning" => Some(Family::ZeroSparseNonspanning),
            "zero_broken_column" => Some(Family::ZeroBrokenColumn),
            "random" => Some(Family::Random),
            _ => None,
        }
    }

    /// The reference value every instance of the family must evaluate to,
    /// when the family pins one.
    pub fn expected_value(&self) -> Option<u8> {
        match self {
            Family::OneClean | Family::OneDecoy => Some(1),
            Family::ZeroDense | Family::ZeroSparseNonspanning | Family::ZeroBrokenColumn => Some(0),
            Family::Random => None,
        }
    }

    /// A stable numeric tag for seed derivation.
    pub fn tag(&self) -> u64 {
        match self {
            Family::OneClean => 1,
            Family::OneDecoy => 2,
            Family::ZeroDense => 3,
            Family::ZeroSparseNonspanning => 4,
            Family::ZeroBrokenColumn => 5,
            Family::Random => 6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenSpec {
    pub s: usize,
    pub family: Family,
    /// zero_dense: fraction of rows per column forced to 0.
    #[serde(default = "default_zero_density")]
    pub zero_density: f64,
    /// one_decoy: number of decoy cycles requested (0 means one per column).
    #[serde(default)]
    pub decoy_count: usize,
    /// one_decoy: cells per decoy cycle (0 means 8).
    #[serde(default)]
    pub decoy_length: usize,
    /// random: probability of a 0 bit-entry.
    #[serde(default = "default_half")]
    pub p_zero_bit: f64,
    /// random: probability of a null pointer-entry.
    #[serde(default = "default_half")]
    pub p_null_ptr: f64,
    pub rng_seed: u64,
}

fn default_zero_density() -> f64 {
    0.5
}

fn default_half() -> f64 {
    0.5
}

impl GenSpec {
    pub fn new(s: usize, family: Family, rng_seed: u64) -> Self {
        Self {
            s,
            family,
            zero_density: 0.5,
            decoy_count: 0,
            decoy_length: 0,
            p_zero_bit: 0.5,
            p_null_ptr: 0.5,
            rng_seed,
        }
    }
}

/// Dispatches on the family and checks the declared function value.
pub fn generate(spec: &GenSpec) -> Matrix {
    assert!(spec.s >= 2, "side length must be at least 2");
    let m = match spec.family {
        Family::OneClean | Family::OneDecoy => gen_one_input(spec),
        Family::ZeroDense | Family::ZeroSparseNonspanning | Family::ZeroBrokenColumn => {
            gen_zero_input(spec)
        }
        Family::Random => gen_random(spec.s, spec.p_zero_bit, spec.p_null_ptr, spec.rng_seed),
    };
    if let Some(expected) = spec.family.expected_value() {
        assert_eq!(
            m.evaluate_reference(),
            expected,
            "generator for {} produced the wrong function value",
            spec.family.as_str()
        );
    }
    m
}

struct Grid {
    s: usize,
    cells: Vec<Cell>,
}

impl Grid {
    /// Starts with every bit 1 and every pointer null (own index).
    fn ones(s: usize) -> Self {
        Self {
            s,
            cells: (0..s * s).map(|i| Cell::new(1, i)).collect(),
        }
    }

    fn set_bit(&mut self, r: CellRef, bit: u8) {
        self.cells[r.linear(self.s)].bit = bit;
    }

    fn bit(&self, r: CellRef) -> u8 {
        self.cells[r.linear(self.s)].bit
    }

    fn point(&mut self, from: CellRef, to: CellRef) {
        self.cells[from.linear(self.s)].raw_ptr = to.linear(self.s);
    }

    fn null_ptr(&mut self, r: CellRef) {
        self.cells[r.linear(self.s)].raw_ptr = r.linear(self.s);
    }

    fn finish(self) -> Matrix {
        Matrix::new(self.s, self.cells).expect("generated grid is well-formed")
    }
}

/// Lays out the special column, a valid chain through a random permutation
/// of the other columns, random non-chain bits, and (for `one_decoy`) decoy
/// cycles of 0-cells confined to the chain's earliest columns.
pub fn gen_one_input(spec: &GenSpec) -> Matrix {
    let s = spec.s;
    let mut rng = seeded(spec.rng_seed);
    let mut g = Grid::ones(s);

    // Special column and chain head.
    let special = uniform_below(&mut rng, s);
    let head_row = uniform_below(&mut rng, s);
    let head = CellRef::new(head_row, special);

    // Chain order: a uniform permutation of the remaining columns, at
    // uniform rows.
    let mut order: Vec<usize> = (0..s).filter(|&c| c != special).collect();
    shuffle(&mut order, &mut rng);
    let mut chain = vec![head];
    for &col in &order {
        chain.push(CellRef::new(uniform_below(&mut rng, s), col));
    }

    // Non-chain bits are random; chain membership overrides them below.
    for row in 0..s {
        for col in 0..s {
            if col != special && coin(&mut rng, 0.5) {
                g.set_bit(CellRef::new(row, col), 0);
            }
        }
    }

    // The special column is all-1 with nulls above (and below) the head.
    for row in 0..s {
        g.set_bit(CellRef::new(row, special), 1);
        g.null_ptr(CellRef::new(row, special));
    }

    // Chain cells: head bit 1, the rest bit 0, linked pointers, last null.
    for (i, &cell) in chain.iter().enumerate() {
        g.set_bit(cell, if i == 0 { 1 } else { 0 });
        if i + 1 < chain.len() {
            g.point(cell, chain[i + 1]);
        } else {
            g.null_ptr(cell);
        }
    }

    if spec.family == Family::OneDecoy {
        plant_decoys(&mut g, &chain, spec, &mut rng);
    }

    g.finish()
}

/// Threads cycles of 0-cells through the earliest non-special chain columns.
/// A milestone trace that lands on a cycle keeps walking without finding
/// fresh columns until its budget binds, which is exactly the failure mode
/// the budget rule exists to contain.
fn plant_decoys(g: &mut Grid, chain: &[CellRef], spec: &GenSpec, rng: &mut SeededRng) {
    let s = spec.s;
    let decoy_count = if spec.decoy_count == 0 {
        s
    } else {
        spec.decoy_count
    };
    let decoy_length = if spec.decoy_length == 0 {
        8
    } else {
        spec.decoy_length.max(2)
    };

    // Enough early chain columns to host the requested mass, at least two
    // when the matrix has them.
    let hosts_wanted = (decoy_count * decoy_length).div_ceil(s.saturating_sub(1).max(1));
    let host_count = hosts_wanted.max(2).min(s - 1).max(1);
    let hosts: Vec<usize> = chain[1..=host_count].iter().map(|c| c.col).collect();

    // Free cells per host column: everything except the chain cell.
    let chain_set: std::collections::BTreeSet<usize> = chain.iter().map(|c| c.linear(s)).collect();
    let mut free: Vec<Vec<usize>> = hosts
        .iter()
        .map(|&col| {
            (0..s)
                .map(|row| CellRef::new(row, col).linear(s))
                .filter(|idx| !chain_set.contains(idx))
                .collect()
        })
        .collect();
    for rows in &mut free {
        shuffle(rows, rng);
    }

    for _ in 0..decoy_count {
        // Round-robin across host columns so consecutive cycle cells change
        // column.
        let mut cycle = Vec::with_capacity(decoy_length);
        'take: for k in 0..decoy_length {
            let host = k % hosts.len();
            match free[host].pop() {
                Some(idx) => cycle.push(CellRef::from_linear(idx, s)),
                None => break 'take,
            }
        }
        if cycle.len() < 2 {
            break;
        }
        for (i, &cell) in cycle.iter().enumerate() {
            g.set_bit(cell, 0);
            g.point(cell, cycle[(i + 1) % cycle.len()]);
        }
    }
}

/// The three 0-input families.
pub fn gen_zero_input(spec: &GenSpec) -> Matrix {
    match spec.family {
        Family::ZeroDense => gen_zero_dense(spec),
        Family::ZeroSparseNonspanning => gen_zero_sparse(spec),
        Family::ZeroBrokenColumn => gen_zero_broken(spec),
        _ => panic!("not a zero family: {}", spec.family.as_str()),
    }
}

/// Every column gets `⌈zero_density·s⌉` zeros at random rows; pointer words
/// are uniform, so they decode to arbitrary cells or `⊥`.
fn gen_zero_dense(spec: &GenSpec) -> Matrix {
    let s = spec.s;
    assert!(spec.zero_density > 0.0 && spec.zero_density <= 1.0);
    let mut rng = seeded(spec.rng_seed);
    let mut g = Grid::ones(s);
    let w = crate::matrix::ceil_log2(s * s);
    let zeros_per_column = ((spec.zero_density * s as f64).ceil() as usize).clamp(1, s);
    for col in 0..s {
        let mut rows: Vec<usize> = (0..s).collect();
        shuffle(&mut rows, &mut rng);
        for &row in rows.iter().take(zeros_per_column) {
            g.set_bit(CellRef::new(row, col), 0);
        }
    }
    for row in 0..s {
        for col in 0..s {
            let raw = (rand::Rng::random::<u64>(&mut rng) & ((1u64 << w) - 1)) as usize;
            g.cells[CellRef::new(row, col).linear(s)].raw_ptr = raw;
        }
    }
    g.finish()
}

/// Few zeros per column (at most `n^{1/4}/2`), pointer-entries of 0-cells
/// null or confined within column pairs, so columns from different pairs are
/// mutually non-spanning.
fn gen_zero_sparse(spec: &GenSpec) -> Matrix {
    let s = spec.s;
    let mut rng = seeded(spec.rng_seed);
    let mut g = Grid::ones(s);
    let zeros_per_column = ((heavy_threshold_half(s)).floor() as usize).max(1);

    // Column cliques of size two; a trailing odd column stays alone.
    let zero_cells: Vec<Vec<CellRef>> = (0..s)
        .map(|col| {
            let mut rows: Vec<usize> = (0..s).collect();
            shuffle(&mut rows, &mut rng);
            rows.iter()
                .take(zeros_per_column)
                .map(|&row| {
                    let r = CellRef::new(row, col);
                    g.set_bit(r, 0);
                    r
                })
                .collect()
        })
        .collect();
    for pair_start in (0..s).step_by(2) {
        let clique: Vec<usize> = if pair_start + 1 < s {
            vec![pair_start, pair_start + 1]
        } else {
            vec![pair_start]
        };
        let members: Vec<CellRef> = clique
            .iter()
            .flat_map(|&c| zero_cells[c].iter().copied())
            .collect();
        for &cell in &members {
            if members.len() > 1 && coin(&mut rng, 0.5) {
                // Point at another 0-cell of the same clique.
                loop {
                    let target = members[uniform_below(&mut rng, members.len())];
                    if target != cell {
                        g.point(cell, target);
                        break;
                    }
                }
            } else {
                g.null_ptr(cell);
            }
        }
    }
    g.finish()
}

fn heavy_threshold_half(s: usize) -> f64 {
    (s as f64).sqrt() / 2.0
}

/// One all-1 column whose chain violates exactly one validity condition,
/// picked at random; every other column gets at least one zero.
fn gen_zero_broken(spec: &GenSpec) -> Matrix {
    let s = spec.s;
    let mut rng = seeded(spec.rng_seed);
    let mut g = Grid::ones(s);

    let special = uniform_below(&mut rng, s);
    let head_row = uniform_below(&mut rng, s);
    let head = CellRef::new(head_row, special);
    for row in 0..s {
        g.null_ptr(CellRef::new(row, special));
    }

    let mut order: Vec<usize> = (0..s).filter(|&c| c != special).collect();
    shuffle(&mut order, &mut rng);
    let mut chain = vec![head];
    for &col in &order {
        chain.push(CellRef::new(uniform_below(&mut rng, s), col));
    }

    // Chain cells bit 0 after the head, linked, null-terminated - then one
    // violation is injected.
    for (i, &cell) in chain.iter().enumerate() {
        if i > 0 {
            g.set_bit(cell, 0);
        }
        if i + 1 < chain.len() {
            g.point(cell, chain[i + 1]);
        } else {
            g.null_ptr(cell);
        }
    }

    let violation = uniform_below(&mut rng, 4);
    match violation {
        0 => {
            // Short chain: cut the pointer somewhere before the end.
            let cut = 1 + uniform_below(&mut rng, s - 1);
            g.null_ptr(chain[cut - 1]);
        }
        1 => {
            // Repeated column: some chain cell points back into an earlier
            // chain column instead of onward.
            let at = 1 + uniform_below(&mut rng, s - 1);
            g.point(
                chain[at - 1],
                chain[uniform_below(&mut rng, at.saturating_sub(1).max(1))],
            );
        }
        2 => {
            // Nonzero bit on the chain.
            let at = 1 + uniform_below(&mut rng, s - 1);
            g.set_bit(chain[at], 1);
        }
        _ => {
            // Missing null terminator: the last cell points back at the head.
            g.point(chain[s - 1], head);
        }
    }

    // Every non-special column needs a zero so the all-1 column is unique.
    // The replacement zero must avoid the column's chain row: landing there
    // would undo a nonzero-bit violation and revalidate the chain.
    for col in 0..s {
        if col == special {
            continue;
        }
        if (0..s).all(|row| g.bit(CellRef::new(row, col)) == 1) {
            let chain_row = chain.iter().find(|c| c.col == col).map(|c| c.row);
            loop {
                let row = uniform_below(&mut rng, s);
                if Some(row) != chain_row {
                    g.set_bit(CellRef::new(row, col), 0);
                    break;
                }
            }
        }
    }
    g.finish()
}

/// I.i.d. cells: bit 0 with probability `p_zero_bit`; pointer null with
/// probability `p_null_ptr`, otherwise uniform over the other cells.
pub fn gen_random(s: usize, p_zero_bit: f64, p_null_ptr: f64, seed: u64) -> Matrix {
    assert!((0.0..=1.0).contains(&p_zero_bit) && (0.0..=1.0).contains(&p_null_ptr));
    let mut rng = seeded(seed);
    let n = s * s;
    let mut cells = Vec::with_capacity(n);
    for idx in 0..n {
        let bit = u8::from(!coin(&mut rng, p_zero_bit));
        let raw = if coin(&mut rng, p_null_ptr) {
            idx
        } else {
            // Uniform over the n-1 other cells.
            let mut t = uniform_below(&mut rng, n - 1);
            if t >= idx {
                t += 1;
            }
            t
        };
        cells.push(Cell::new(bit, raw));
    }
    Matrix::new(s, cells).expect("random grid is well-formed")
}

fn shuffle(items: &mut [usize], rng: &mut SeededRng) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i + 1);
        items.swap(i, j);
    }
}
