//! Bit-exact serialization and the two matrix file formats.
//!
//! Canonical bitstring: cells emitted row-major by (row, col); per cell the
//! bit-entry first, then the `w` pointer bits most-significant-first. The
//! bitstring file wraps that in a one-line `s=<int>` header and is the
//! interchange format for cross-implementation equivalence tests. The JSON
//! form is `{"s": int, "cells": [[{"b":0|1,"p":int}, ...], ...]}` row-major
//! with `p` the raw pointer word.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ceil_log2, Cell, Matrix};

/// Encodes a matrix as a string of '0'/'1' characters of length `n·(1+w)`.
pub fn encode(m: &Matrix) -> String {
    let w = m.ptr_width();
    let mut out = String::with_capacity(m.n() * (1 + w));
    for cell in m.cells() {
        out.push(if cell.bit == 1 { '1' } else { '0' });
        for k in (0..w).rev() {
            out.push(if (cell.raw_ptr >> k) & 1 == 1 {
                '1'
            } else {
                '0'
            });
        }
    }
    out
}

/// Decodes a bitstring produced by [`encode`]. Raw pointer words that fail
/// to name another cell decode to `⊥` on access; the bits themselves round
/// trip unchanged.
pub fn decode(bits: &str, s: usize) -> Result<Matrix> {
    if s < 2 {
        return Err(Error::InvalidSideLength(s));
    }
    let n = s * s;
    let w = ceil_log2(n);
    let expected = n * (1 + w);
    let got = bits.chars().count();
    if got != expected {
        return Err(Error::LengthMismatch { s, expected, got });
    }
    let mut values = Vec::with_capacity(expected);
    for ch in bits.chars() {
        match ch {
            '0' => values.push(0usize),
            '1' => values.push(1usize),
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {:?} in bitstring",
                    other
                )))
            }
        }
    }
    let mut cells = Vec::with_capacity(n);
    for chunk in values.chunks(1 + w) {
        let bit = chunk[0] as u8;
        let raw = chunk[1..].iter().fold(0usize, |acc, &b| (acc << 1) | b);
        cells.push(Cell::new(bit, raw));
    }
    Matrix::new(s, cells)
}

/// Renders the bitstring file: `s=<int>` header line, then the bits.
pub fn to_bits_file(m: &Matrix) -> String {
    format!("s={}\n{}\n", m.side(), encode(m))
}

/// Parses the bitstring file format. Whitespace inside the bit body is
/// ignored, so wrapped lines are fine.
pub fn from_bits_file(text: &str) -> Result<Matrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))?;
    let s: usize = header
        .trim()
        .strip_prefix("s=")
        .ok_or_else(|| Error::Parse(format!("expected 's=<int>' header, got {:?}", header)))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad side length in header: {}", e)))?;
    let bits: String = lines
        .flat_map(|l| l.chars())
        .filter(|c| !c.is_whitespace())
        .collect();
    decode(&bits, s)
}

#[derive(Serialize, Deserialize)]
struct JsonCell {
    b: u8,
    p: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    s: usize,
    cells: Vec<Vec<JsonCell>>,
}

pub fn to_json(m: &Matrix) -> String {
    let s = m.side();
    let rows: Vec<Vec<JsonCell>> = (0..s)
        .map(|row| {
            (0..s)
                .map(|col| {
                    let cell = m.cells()[row * s + col];
                    JsonCell {
                        b: cell.bit,
                        p: cell.raw_ptr,
                    }
                })
                .collect()
        })
        .collect();
    serde_json::to_string(&JsonMatrix { s, cells: rows }).expect("matrix json is serializable")
}

pub fn from_json(text: &str) -> Result<Matrix> {
    let parsed: JsonMatrix =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad matrix json: {}", e)))?;
    let s = parsed.s;
    if parsed.cells.len() != s {
        return Err(Error::Parse(format!(
            "expected {} rows, got {}",
            s,
            parsed.cells.len()
        )));
    }
    let mut cells = Vec::with_capacity(s * s);
    for (i, row) in parsed.cells.iter().enumerate() {
        if row.len() != s {
            return Err(Error::Parse(format!(
                "row {} has {} cells, expected {}",
                i,
                row.len(),
                s
            )));
        }
        for cell in row {
            cells.push(Cell::new(cell.b, cell.p));
        }
    }
    Matrix::new(s, cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Bits,
    Json,
}

pub fn save_matrix(m: &Matrix, path: &Path, format: FileFormat) -> Result<()> {
    let text = match format {
        FileFormat::Bits => to_bits_file(m),
        FileFormat::Json => to_json(m),
    };
    fs::write(path, text)?;
    Ok(())
}

/// Loads a matrix from either file format, sniffing JSON by its leading '{'.
pub fn load_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        from_json(&text)
    } else {
        from_bits_file(&text)
    }
}
