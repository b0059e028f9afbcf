//! Full-read baseline: read every entry once, then evaluate. Its exactly
//! `2n` entry queries give the slope-1.0 reference line for every sweep.

use crate::matrix::{CellRef, Matrix};
use crate::oracle::{OracleMode, QueryOracle};
use crate::report::RunReport;

pub fn run_full_read(m: &Matrix, seed: u64) -> RunReport {
    let s = m.side();
    let mut o = QueryOracle::new(m, OracleMode::Cached);
    for row in 0..s {
        for col in 0..s {
            let r = CellRef::new(row, col);
            o.read_bit(r).expect("in range");
            o.read_ptr(r).expect("in range");
        }
    }
    let answer = m.evaluate_reference();
    let cert = if answer == 1 {
        m.principle_chain()
            .map(|(column, chain)| crate::certificate::Certificate::One { column, chain })
    } else {
        None
    };
    RunReport::from_stats(answer, cert, o.stats(), seed, 1)
}
