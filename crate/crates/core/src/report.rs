//! Run reports: the answer, its certificate when one exists, and the query
//! accounting for the run.

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::oracle::QueryStats;

/// Per-round summary emitted by the zero-error driver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: u32,
    pub algorithm: String,
    pub answer: u8,
    pub certified: bool,
    pub entry_queries: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub answer: u8,
    /// Present iff the answer is certified; always verified against the
    /// input before being attached.
    pub cert: Option<Certificate>,
    pub entry_queries: u64,
    pub bit_queries: u64,
    pub raw_reads: u64,
    pub seed: u64,
    /// Loop iterations consumed by a single run, or driver rounds for the
    /// composed algorithm.
    pub rounds: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub round_breakdown: Vec<RoundSummary>,
}

impl RunReport {
    pub fn from_stats(
        answer: u8,
        cert: Option<Certificate>,
        stats: QueryStats,
        seed: u64,
        rounds: u64,
    ) -> Self {
        Self {
            answer,
            cert,
            entry_queries: stats.entry_queries,
            bit_queries: stats.bit_queries,
            raw_reads: stats.raw_reads,
            seed,
            rounds,
            round_breakdown: Vec::new(),
        }
    }

    pub fn certified(&self) -> bool {
        self.cert.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is serializable")
    }
}
