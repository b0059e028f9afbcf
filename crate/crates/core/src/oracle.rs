//! Counting, caching access layer over a matrix.
//!
//! Algorithms read entries exclusively through a [`QueryOracle`]; nothing on
//! the algorithm side ever touches the matrix directly. The oracle keeps
//! three monotone counters:
//!
//! * `entry_queries` — distinct entries read (bit-entry 1, pointer-entry 1).
//!   This is the decision-tree cost and the scale used by every acceptance
//!   measurement.
//! * `bit_queries` — bit-weighted count: 1 per distinct bit-entry, `w` per
//!   distinct pointer-entry.
//! * `raw_reads` — every read including repeats.
//!
//! Repeated reads are never re-charged to the distinct counters: a decision
//! tree gains nothing from re-asking. `Raw` mode additionally records every
//! repeat in the transcript, which exposes accidental re-read inefficiency;
//! `Cached` mode records first reads only.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{CellRef, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    #[default]
    Cached,
    Raw,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub entry_queries: u64,
    pub bit_queries: u64,
    pub raw_reads: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReadKind {
    #[serde(rename = "b")]
    Bit,
    #[serde(rename = "p")]
    Ptr,
}

/// One transcript record. For pointer reads the value is the linear index of
/// the target cell, or −1 for `⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub kind: ReadKind,
    pub cell: CellRef,
    pub value: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript(pub Vec<TranscriptEntry>);

impl Transcript {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.0
    }

    /// Re-reads every recorded entry from the matrix and checks the values
    /// match.
    pub fn replays_against(&self, m: &Matrix) -> bool {
        self.0.iter().all(|e| {
            if !m.contains(e.cell) {
                return false;
            }
            let v = match e.kind {
                ReadKind::Bit => i64::from(m.bit(e.cell)),
                ReadKind::Ptr => match m.ptr(e.cell) {
                    Some(t) => t.linear(m.side()) as i64,
                    None => -1,
                },
            };
            v == e.value
        })
    }

    /// JSON-lines export: one read per line,
    /// `{"k":"b"|"p","i":row,"j":col,"v":value}` with −1 for `⊥`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.0 {
            let k = match e.kind {
                ReadKind::Bit => "b",
                ReadKind::Ptr => "p",
            };
            out.push_str(&format!(
                "{{\"k\":\"{}\",\"i\":{},\"j\":{},\"v\":{}}}\n",
                k, e.cell.row, e.cell.col, e.value
            ));
        }
        out
    }
}

pub struct QueryOracle<'m> {
    m: &'m Matrix,
    mode: OracleMode,
    stats: QueryStats,
    seen_bit: Vec<bool>,
    seen_ptr: Vec<bool>,
    transcript: Vec<TranscriptEntry>,
}

impl<'m> QueryOracle<'m> {
    pub fn new(m: &'m Matrix, mode: OracleMode) -> Self {
        Self {
            m,
            mode,
            stats: QueryStats::default(),
            seen_bit: vec![false; m.n()],
            seen_ptr: vec![false; m.n()],
            transcript: Vec::new(),
        }
    }

    pub fn side(&self) -> usize {
        self.m.side()
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn ptr_width(&self) -> usize {
        self.m.ptr_width()
    }

    pub fn read_bit(&mut self, r: CellRef) -> Result<u8> {
        self.m.check_bounds(r)?;
        let idx = r.linear(self.m.side());
        let first = !self.seen_bit[idx];
        self.seen_bit[idx] = true;
        self.stats.raw_reads += 1;
        if first {
            self.stats.entry_queries += 1;
            self.stats.bit_queries += 1;
        }
        let value = self.m.bit(r);
        if first || self.mode == OracleMode::Raw {
            self.transcript.push(TranscriptEntry {
                kind: ReadKind::Bit,
                cell: r,
                value: value.into(),
            });
        }
        Ok(value)
    }

    pub fn read_ptr(&mut self, r: CellRef) -> Result<Option<CellRef>> {
        self.m.check_bounds(r)?;
        let idx = r.linear(self.m.side());
        let first = !self.seen_ptr[idx];
        self.seen_ptr[idx] = true;
        self.stats.raw_reads += 1;
        if first {
            self.stats.entry_queries += 1;
            self.stats.bit_queries += self.m.ptr_width() as u64;
        }
        let value = self.m.ptr(r);
        if first || self.mode == OracleMode::Raw {
            let v = match value {
                Some(t) => t.linear(self.m.side()) as i64,
                None => -1,
            };
            self.transcript.push(TranscriptEntry {
                kind: ReadKind::Ptr,
                cell: r,
                value: v,
            });
        }
        Ok(value)
    }

    pub fn stats(&self) -> QueryStats {
        self.stats
    }

    pub fn transcript(&self) -> Transcript {
        Transcript(self.transcript.clone())
    }

    pub fn transcript_entries(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Zeroes counters, clears the cache and the transcript.
    pub fn reset(&mut self) {
        self.stats = QueryStats::default();
        self.seen_bit.iter_mut().for_each(|b| *b = false);
        self.seen_ptr.iter_mut().for_each(|b| *b = false);
        self.transcript.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::testutil::m2;

    #[test]
    fn fresh_oracle_has_zero_stats() {
        let m = m2();
        let o = QueryOracle::new(&m, OracleMode::Cached);
        assert_eq!(o.stats(), QueryStats::default());
    }

    #[test]
    fn cached_mode_counts_distinct_reads_once() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        assert_eq!(o.read_bit(CellRef::new(0, 0)).unwrap(), 1);
        assert_eq!(o.read_bit(CellRef::new(0, 0)).unwrap(), 1);
        let st = o.stats();
        assert_eq!(st.entry_queries, 1);
        assert_eq!(st.bit_queries, 1);
        assert_eq!(st.raw_reads, 2);
        assert_eq!(o.transcript().len(), 1);
    }

    #[test]
    fn raw_mode_records_repeats() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Raw);
        o.read_bit(CellRef::new(0, 0)).unwrap();
        o.read_bit(CellRef::new(0, 0)).unwrap();
        let st = o.stats();
        assert_eq!(st.raw_reads, 2);
        assert_eq!(st.entry_queries, 1);
        assert_eq!(o.transcript().len(), 2);
    }

    #[test]
    fn pointer_reads_are_bit_weighted() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        assert_eq!(
            o.read_ptr(CellRef::new(0, 0)).unwrap(),
            Some(CellRef::new(0, 1))
        );
        assert_eq!(o.stats().bit_queries, m.ptr_width() as u64);
        assert_eq!(o.stats().bit_queries, 2);
        assert_eq!(o.read_ptr(CellRef::new(1, 0)).unwrap(), None);
    }

    #[test]
    fn out_of_range_reads_fail() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        match o.read_bit(CellRef::new(5, 0)) {
            Err(Error::OutOfRange {
                row: 5,
                col: 0,
                s: 2,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bits_read_then_stats_then_reset() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        for col in 0..2 {
            o.read_bit(CellRef::new(0, col)).unwrap();
        }
        o.read_bit(CellRef::new(1, 0)).unwrap();
        assert_eq!(o.stats().entry_queries, 3);
        o.reset();
        assert_eq!(o.stats(), QueryStats::default());
        assert!(o.transcript().is_empty());
        // Cache cleared: the next read is charged again.
        o.read_bit(CellRef::new(0, 0)).unwrap();
        assert_eq!(o.stats().entry_queries, 1);
    }

    #[test]
    fn transcript_replays() {
        let m = m2();
        let mut o = QueryOracle::new(&m, OracleMode::Cached);
        o.read_bit(CellRef::new(0, 0)).unwrap();
        o.read_ptr(CellRef::new(0, 0)).unwrap();
        o.read_ptr(CellRef::new(1, 1)).unwrap();
        assert!(o.transcript().replays_against(&m));
        let jsonl = o.transcript().to_jsonl();
        assert_eq!(
            jsonl,
            "{\"k\":\"b\",\"i\":0,\"j\":0,\"v\":1}\n{\"k\":\"p\",\"i\":0,\"j\":0,\"v\":1}\n{\"k\":\"p\",\"i\":1,\"j\":1,\"v\":-1}\n"
        );
    }
}
