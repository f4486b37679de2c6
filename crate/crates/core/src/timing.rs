// SPDX-License-Identifier: Apache-2.0

//! Analytic cycle-time model for 32-bit asynchronous ripple-carry adders.
//!
//! A measured full-width forward latency is split evenly over the `n`
//! stages, then scaled by the class's cycle factor for a carry chain of
//! length `m`. All arithmetic is exact on integer picoseconds; results are
//! rounded half-up to 0.1 ns.

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::Ps;

/// Carry-chain lengths tabulated by [`generate_table`].
pub const CHAIN_LENGTHS: [u64; 5] = [4, 8, 16, 24, 28];
/// Width of the tabulated adders.
pub const TABLE_WIDTH: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimingClass {
    Strong,
    WeakBasic,
    WeakDistributed,
    EarlyOutput,
    RelativeTimed,
}

impl TimingClass {
    pub const ALL: [TimingClass; 5] = [
        TimingClass::Strong,
        TimingClass::WeakBasic,
        TimingClass::WeakDistributed,
        TimingClass::EarlyOutput,
        TimingClass::RelativeTimed,
    ];

    /// Forward latency in stage delays.
    pub fn forward_factor(self, n: u64, m: u64) -> u64 {
        match self {
            TimingClass::Strong => n,
            _ => m,
        }
    }

    /// Reverse latency in stage delays.
    pub fn reverse_factor(self, n: u64, m: u64) -> u64 {
        match self {
            TimingClass::Strong => n,
            TimingClass::WeakBasic => m,
            TimingClass::WeakDistributed | TimingClass::EarlyOutput => 2,
            TimingClass::RelativeTimed => 1,
        }
    }

    pub fn cycle_factor(self, n: u64, m: u64) -> u64 {
        self.forward_factor(n, m) + self.reverse_factor(n, m)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TimingClass::Strong => "strong",
            TimingClass::WeakBasic => "weak-basic",
            TimingClass::WeakDistributed => "weak-distributed",
            TimingClass::EarlyOutput => "early-output",
            TimingClass::RelativeTimed => "relative-timed",
        }
    }
}

impl fmt::Display for TimingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimingClass {
    type Err = TimingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimingClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| TimingError::UnknownClass(s.to_string()))
    }
}

/// A tenth of a nanosecond count, shown as `12.3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tenths(pub u64);

impl Tenths {
    pub fn as_ns_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl fmt::Display for Tenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimingError {
    #[error("carry chain length {m} exceeds adder width {n}")]
    ChainTooLong { m: u64, n: u64 },
    #[error("carry chain length and width must be positive")]
    Zero,
    #[error("latency of `{0}` must be positive")]
    ZeroLatency(String),
    #[error("unknown timing class `{0}`")]
    UnknownClass(String),
    #[error("latency dataset: {0}")]
    Dataset(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdderRow {
    pub label: String,
    pub class: TimingClass,
    /// Measured full-width forward latency.
    pub latency: Ps,
}

impl AdderRow {
    fn new(label: &str, class: TimingClass, latency_ps: u64) -> AdderRow {
        AdderRow {
            label: label.to_string(),
            class,
            latency: Ps(latency_ps),
        }
    }
}

/// Measured 32-bit forward latencies of ten adder designs.
pub fn builtin_rows() -> Vec<AdderRow> {
    use TimingClass::*;
    vec![
        AdderRow::new("strong-1", Strong, 14_610),
        AdderRow::new("strong-2", Strong, 9_260),
        AdderRow::new("strong-3", Strong, 9_040),
        AdderRow::new("weak-1", WeakBasic, 8_240),
        AdderRow::new("weak-2", WeakBasic, 9_660),
        AdderRow::new("weak-3", WeakBasic, 7_000),
        AdderRow::new("weak-4", WeakDistributed, 4_430),
        AdderRow::new("weak-5", WeakDistributed, 3_320),
        AdderRow::new("early-output", EarlyOutput, 3_100),
        AdderRow::new("relative-timed", RelativeTimed, 2_990),
    ]
}

/// Published estimates for [`builtin_rows`], in tenths of ns: the five
/// chain lengths, then the mean.
pub const GOLDEN_TABLE: [[u64; 6]; 10] = [
    [292, 292, 292, 292, 292, 292],
    [185, 185, 185, 185, 185, 185],
    [181, 181, 181, 181, 181, 181],
    [21, 41, 82, 124, 144, 82],
    [24, 48, 97, 145, 169, 97],
    [18, 35, 70, 105, 123, 70],
    [8, 14, 25, 36, 42, 25],
    [6, 10, 19, 27, 31, 19],
    [6, 10, 17, 25, 29, 17],
    [5, 8, 16, 23, 27, 16],
];

/// `numerator / denominator` rounded half-up, in tenths of ns, where the
/// fraction is in ps.
fn round_tenths(numerator: u64, denominator: u64) -> Tenths {
    Tenths((2 * numerator + 100 * denominator) / (200 * denominator))
}

/// Cycle time of `row` for a carry chain of `m` stages in an `n`-bit adder.
pub fn cycle_time_estimate(row: &AdderRow, m: u64, n: u64) -> Result<Tenths, TimingError> {
    if m == 0 || n == 0 {
        return Err(TimingError::Zero);
    }
    if m > n {
        return Err(TimingError::ChainTooLong { m, n });
    }
    if row.latency == Ps::ZERO {
        return Err(TimingError::ZeroLatency(row.label.clone()));
    }
    Ok(round_tenths(row.class.cycle_factor(n, m) * row.latency.0, n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub row: AdderRow,
    pub cells: [Tenths; 5],
    /// Mean of the unrounded cells, rounded.
    pub mean: Tenths,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleTable {
    pub rows: Vec<TableRow>,
}

pub fn generate_table(rows: &[AdderRow]) -> Result<CycleTable, TimingError> {
    let n = TABLE_WIDTH;
    let rows = rows
        .iter()
        .map(|row| {
            let mut cells = [Tenths::default(); 5];
            for (cell, &m) in cells.iter_mut().zip(&CHAIN_LENGTHS) {
                *cell = cycle_time_estimate(row, m, n)?;
            }
            let factor_sum: u64 = CHAIN_LENGTHS.iter().map(|&m| row.class.cycle_factor(n, m)).sum();
            let mean = round_tenths(factor_sum * row.latency.0, n * CHAIN_LENGTHS.len() as u64);
            Ok(TableRow {
                row: row.clone(),
                cells,
                mean,
            })
        })
        .collect::<Result<Vec<_>, TimingError>>()?;
    Ok(CycleTable { rows })
}

impl CycleTable {
    pub fn row(&self, label: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.row.label == label)
    }

    /// Largest absolute difference in ns from [`GOLDEN_TABLE`], over all
    /// cells and means. `None` unless the table has the built-in rows.
    pub fn max_golden_deviation(&self) -> Option<f64> {
        let builtin = builtin_rows();
        if self.rows.len() != builtin.len() || self.rows.iter().zip(&builtin).any(|(r, b)| r.row != *b) {
            return None;
        }
        let mut worst = 0u64;
        for (r, golden) in self.rows.iter().zip(&GOLDEN_TABLE) {
            let ours = r.cells.iter().chain(std::iter::once(&r.mean));
            for (t, &g) in ours.zip(golden) {
                worst = worst.max(t.0.abs_diff(g));
            }
        }
        Some(worst as f64 / 10.0)
    }

    /// Percentage by which `target`'s mean undercuts `baseline`'s.
    pub fn mean_reduction(&self, baseline: &str, target: &str) -> Option<f64> {
        let b = self.row(baseline)?.mean.as_ns_f64();
        let t = self.row(target)?.mean.as_ns_f64();
        (b > 0.0).then(|| (b - t) / b * 100.0)
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["label".to_string(), "class".to_string(), "latency_ns".to_string()];
        header.extend(CHAIN_LENGTHS.iter().map(|m| format!("m{m}")));
        header.push("mean".into());
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.row.label.clone(), r.row.class.to_string(), r.row.latency.to_string()];
            rec.extend(r.cells.iter().map(Tenths::to_string));
            rec.push(r.mean.to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct DatasetRecord {
    label: String,
    class: String,
    latency_ns: String,
}

/// Reads `label,class,latency_ns` rows.
pub fn read_dataset<R: io::Read>(r: R) -> Result<Vec<AdderRow>, TimingError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<DatasetRecord>().enumerate() {
        let rec = rec.map_err(|e| TimingError::Dataset(e.to_string()))?;
        let latency: Ps = rec
            .latency_ns
            .parse()
            .map_err(|e| TimingError::Dataset(format!("row {}: {e}", i + 1)))?;
        if latency == Ps::ZERO {
            return Err(TimingError::ZeroLatency(rec.label));
        }
        rows.push(AdderRow {
            label: rec.label,
            class: rec.class.parse()?,
            latency,
        });
    }
    if rows.is_empty() {
        return Err(TimingError::Dataset("no rows".into()));
    }
    Ok(rows)
}
