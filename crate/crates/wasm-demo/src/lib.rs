//! Browser bindings for the pointer-matrix simulator. Three operations,
//! each returning a JSON string for the page to render:
//!
//! * `generate` — build a seeded instance and report its grid, value, and
//!   principle chain.
//! * `run` — run one of the query algorithms against the held matrix and
//!   report the answer, certificate kind, query counts, and every cell the
//!   algorithm actually read (the heat map is the point: the sublinear
//!   algorithms touch a vanishing corner of the grid).
//! * `column_span` — full-knowledge span of one column, for exploring the
//!   cover structure the zero-error side relies on.

use serde_json::json;
use wasm_bindgen::prelude::*;

use pointer_matrix::instances::{gen_random, generate as gen_instance, Family, GenSpec};
use pointer_matrix::matrix::Matrix;
use pointer_matrix::one_sided::{run_one_sided_full, OneSidedConfig};
use pointer_matrix::oracle::{ReadKind, Transcript};
use pointer_matrix::report::RunReport;
use pointer_matrix::zero_error::{run_zero_sided_full, run_zpp_full, ZeroErrorConfig, ZppConfig};

fn error_json(message: &str) -> String {
    json!({ "error": message }).to_string()
}

fn matrix_json(m: &Matrix, family: &str) -> String {
    let s = m.side();
    let bits: String = m
        .cells()
        .iter()
        .map(|c| if c.bit == 1 { '1' } else { '0' })
        .collect();
    let ptrs: Vec<i64> = (0..m.n())
        .map(|idx| {
            let r = pointer_matrix::CellRef::from_linear(idx, s);
            match m.ptr(r) {
                Some(t) => t.linear(s) as i64,
                None => -1,
            }
        })
        .collect();
    let chain: Option<Vec<[usize; 2]>> = m
        .principle_chain()
        .map(|(_, chain)| chain.cells.iter().map(|c| [c.row, c.col]).collect());
    json!({
        "family": family,
        "s": s,
        "n": m.n(),
        "f": m.evaluate_reference(),
        "bits": bits,
        "ptrs": ptrs,
        "chain": chain,
    })
    .to_string()
}

fn reads_json(transcripts: &[Transcript]) -> (Vec<i64>, usize) {
    // Flat [row, col, kind, row, col, kind, ...] with kind 0 = bit, 1 = ptr.
    let mut flat = Vec::new();
    let mut count = 0usize;
    for t in transcripts {
        for e in t.entries() {
            flat.push(e.cell.row as i64);
            flat.push(e.cell.col as i64);
            flat.push(match e.kind {
                ReadKind::Bit => 0,
                ReadKind::Ptr => 1,
            });
            count += 1;
        }
    }
    (flat, count)
}

fn report_json(report: &RunReport, transcripts: &[Transcript], algorithm: &str) -> String {
    let (reads, read_count) = reads_json(transcripts);
    let cert_kind = report.cert.as_ref().map(|c| c.kind());
    let rounds_detail: Vec<_> = report
        .round_breakdown
        .iter()
        .map(|r| {
            json!({
                "round": r.round,
                "algorithm": r.algorithm,
                "answer": r.answer,
                "certified": r.certified,
                "entry_queries": r.entry_queries,
            })
        })
        .collect();
    json!({
        "algorithm": algorithm,
        "answer": report.answer,
        "certified": report.certified(),
        "cert_kind": cert_kind,
        "entry_queries": report.entry_queries,
        "bit_queries": report.bit_queries,
        "rounds": report.rounds,
        "round_breakdown": rounds_detail,
        "read_count": read_count,
        "reads": reads,
    })
    .to_string()
}

#[wasm_bindgen]
pub struct Demo {
    matrix: Option<Matrix>,
}

impl Default for Demo {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo { matrix: None }
    }

    /// Generates an instance, keeps it as the current matrix, and returns
    /// its JSON description.
    pub fn generate(&mut self, family: &str, s: u32, seed: u32) -> String {
        let Some(family) = Family::parse(family) else {
            return error_json("unknown family");
        };
        let s = s as usize;
        if !(2..=256).contains(&s) {
            return error_json("side length must be between 2 and 256");
        }
        let m = match family {
            Family::Random => gen_random(s, 0.5, 0.5, u64::from(seed)),
            _ => gen_instance(&GenSpec::new(s, family, u64::from(seed))),
        };
        let out = matrix_json(&m, family.as_str());
        self.matrix = Some(m);
        out
    }

    /// Runs an algorithm on the current matrix and reports the answer with
    /// the full read map.
    pub fn run(&self, algorithm: &str, seed: u32) -> String {
        let Some(m) = &self.matrix else {
            return error_json("generate a matrix first");
        };
        let seed = u64::from(seed);
        match algorithm {
            "one_sided" => {
                let run = run_one_sided_full(m, &OneSidedConfig::with_seed(seed));
                report_json(&run.report, &[run.transcript], algorithm)
            }
            "zero_sided" => {
                let run = run_zero_sided_full(m, &ZeroErrorConfig::with_seed(seed));
                report_json(&run.report, &[run.transcript], algorithm)
            }
            "zpp" => match run_zpp_full(m, &ZppConfig::with_seed(seed)) {
                Ok(run) => report_json(&run.report, &run.round_transcripts, algorithm),
                Err(e) => error_json(&e.to_string()),
            },
            "full_read" => {
                let report = pointer_matrix::baseline::run_full_read(m, seed);
                // Every entry is read; the page can shade the whole grid.
                let all: Vec<Transcript> = Vec::new();
                let mut out: serde_json::Value =
                    serde_json::from_str(&report_json(&report, &all, algorithm)).unwrap();
                out["reads_everything"] = json!(true);
                out.to_string()
            }
            _ => error_json("unknown algorithm"),
        }
    }

    /// Full-knowledge span of a column of the current matrix.
    pub fn column_span(&self, col: u32) -> String {
        let Some(m) = &self.matrix else {
            return error_json("generate a matrix first");
        };
        let col = col as usize;
        if col >= m.side() {
            return error_json("column out of range");
        }
        let span: Vec<usize> = m.span_full(col).into_iter().collect();
        let zeros = m.zeros_in_column(col);
        json!({
            "col": col,
            "span": span,
            "zeros": zeros,
            "all_ones": zeros == 0,
            "heavy": (zeros as f64) > pointer_matrix::zero_error::heavy_threshold(m.side()),
        })
        .to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_run_span_round_trip() {
        let mut demo = Demo::new();
        let desc: serde_json::Value =
            serde_json::from_str(&demo.generate("one_decoy", 16, 7)).unwrap();
        assert_eq!(desc["s"], 16);
        assert_eq!(desc["f"], 1);
        assert_eq!(desc["bits"].as_str().unwrap().len(), 256);
        assert!(desc["chain"].as_array().unwrap().len() == 16);

        let run: serde_json::Value = serde_json::from_str(&demo.run("zpp", 3)).unwrap();
        assert_eq!(run["answer"], 1);
        assert_eq!(run["certified"], true);
        assert!(run["read_count"].as_u64().unwrap() > 0);
        assert_eq!(run["reads"].as_array().unwrap().len() % 3, 0);

        let span: serde_json::Value = serde_json::from_str(&demo.column_span(0)).unwrap();
        assert!(!span["span"].as_array().unwrap().is_empty());
    }

    #[test]
    fn errors_are_json_not_panics() {
        let demo = Demo::new();
        let err: serde_json::Value = serde_json::from_str(&demo.run("zpp", 0)).unwrap();
        assert!(err["error"].is_string());
        let mut demo = Demo::new();
        let err: serde_json::Value = serde_json::from_str(&demo.generate("bogus", 8, 0)).unwrap();
        assert!(err["error"].is_string());
        demo.generate("zero_dense", 8, 0);
        let err: serde_json::Value = serde_json::from_str(&demo.run("bogus", 0)).unwrap();
        assert!(err["error"].is_string());
        let err: serde_json::Value = serde_json::from_str(&demo.column_span(99)).unwrap();
        assert!(err["error"].is_string());
    }
}
