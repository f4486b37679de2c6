// SPDX-License-Identifier: Apache-2.0

//! Multi-vector runs, vector files and CSV batch reports.

use std::fmt;
use std::io;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::DelayConfig;
use crate::netlist::Netlist;
use crate::time::Ps;

use super::{CycleReport, Handshake, HandshakeOptions, SimError};

/// Largest width accepted for exhaustive enumeration (2^(2n+1) vectors).
const MAX_EXHAUSTIVE_WIDTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vector {
    pub a: u64,
    pub b: u64,
    pub cin: bool,
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x} {:x} {}", self.a, self.b, u8::from(self.cin))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VectorSource {
    List(Vec<Vector>),
    Random { count: usize, seed: u64 },
    Exhaustive,
}

impl VectorSource {
    pub fn vectors(&self, width: usize) -> Result<Vec<Vector>, SimError> {
        let mask = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
        match self {
            VectorSource::List(v) => Ok(v.clone()),
            VectorSource::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| Vector {
                        a: rng.random::<u64>() & mask,
                        b: rng.random::<u64>() & mask,
                        cin: rng.random::<bool>(),
                    })
                    .collect())
            }
            VectorSource::Exhaustive => {
                if width > MAX_EXHAUSTIVE_WIDTH {
                    return Err(SimError::Netlist(format!(
                        "exhaustive runs are limited to {MAX_EXHAUSTIVE_WIDTH} bits, got {width}"
                    )));
                }
                let mut out = Vec::with_capacity(1 << (2 * width + 1));
                for a in 0..=mask {
                    for b in 0..=mask {
                        for cin in [false, true] {
                            out.push(Vector { a, b, cin });
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Provenance line for report headers.
    pub fn describe(&self) -> String {
        match self {
            VectorSource::List(v) => format!("list count={}", v.len()),
            VectorSource::Random { count, seed } => format!("random rng=ChaCha8Rng seed={seed} count={count}"),
            VectorSource::Exhaustive => "exhaustive".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorResult {
    pub index: usize,
    pub vector: Vector,
    pub report: CycleReport,
}

impl VectorResult {
    pub fn correct(&self) -> bool {
        self.report.correct()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchReport {
    pub source: String,
    pub width: usize,
    pub results: Vec<VectorResult>,
}

impl BatchReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.correct()).count()
    }

    pub fn all_correct(&self) -> bool {
        self.passed() == self.results.len()
    }

    pub fn min_forward(&self) -> Option<Ps> {
        self.results.iter().map(|r| r.report.forward).min()
    }

    pub fn max_forward(&self) -> Option<Ps> {
        self.results.iter().map(|r| r.report.forward).max()
    }

    /// Mean forward latency in ns.
    pub fn mean_forward_ns(&self) -> Option<f64> {
        if self.results.is_empty() {
            return None;
        }
        let total: u64 = self.results.iter().map(|r| r.report.forward.0).sum();
        Some(total as f64 / self.results.len() as f64 / 1000.0)
    }
}

/// Runs one handshake cycle per vector, in parallel. Results are ordered by
/// vector index; the lowest-index failure is reported if any cycle errors.
pub fn run_vectors(
    netlist: &Netlist,
    delays: &DelayConfig,
    source: &VectorSource,
    options: &HandshakeOptions,
) -> Result<BatchReport, SimError> {
    let hs = Handshake::new(netlist, delays, options.clone())?;
    let width = hs.descriptor().width;
    let vectors = source.vectors(width)?;
    let outcomes: Vec<Result<VectorResult, SimError>> = vectors
        .par_iter()
        .enumerate()
        .map(|(index, &vector)| {
            hs.run(vector.a, vector.b, vector.cin)
                .map(|(report, _)| VectorResult { index, vector, report })
                .map_err(|e| SimError::Vector {
                    index,
                    a: vector.a,
                    b: vector.b,
                    cin: vector.cin,
                    source: Box::new(e),
                })
        })
        .collect();
    let results = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(BatchReport {
        source: source.describe(),
        width,
        results,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct VectorParseError {
    pub line: usize,
    pub message: String,
}

/// Parses `a b cin` lines in hexadecimal. Blank lines and `#` comments are
/// skipped.
pub fn parse_vectors(text: &str) -> Result<Vec<Vector>, VectorParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| VectorParseError { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected `a b cin`, found {} fields", fields.len())));
        }
        let hex = |s: &str| {
            let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
            u64::from_str_radix(digits, 16).map_err(|e| err(format!("bad hex value `{s}`: {e}")))
        };
        let a = hex(fields[0])?;
        let b = hex(fields[1])?;
        let cin = match hex(fields[2])? {
            0 => false,
            1 => true,
            _ => return Err(err(format!("carry-in must be 0 or 1, got `{}`", fields[2]))),
        };
        out.push(Vector { a, b, cin });
    }
    Ok(out)
}

/// One CSV report row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub vector: String,
    pub correct: bool,
    pub forward_ns: String,
    pub reverse_ns: String,
    pub cycle_ns: String,
}

pub fn write_batch_csv<W: io::Write>(mut w: W, report: &BatchReport) -> Result<(), csv::Error> {
    writeln!(w, "# source: {}; width={}", report.source, report.width)?;
    let mut out = csv::Writer::from_writer(w);
    for r in &report.results {
        out.serialize(CsvRow {
            vector: r.vector.to_string(),
            correct: r.correct(),
            forward_ns: r.report.forward.to_string(),
            reverse_ns: r.report.reverse.to_string(),
            cycle_ns: r.report.cycle.to_string(),
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_batch_csv<R: io::Read>(r: R) -> Result<Vec<CsvRow>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(r)
        .deserialize()
        .collect()
}
