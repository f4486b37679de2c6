// SPDX-License-Identifier: Apache-2.0

//! Static and dynamic checks on dual-rail adders: reset-path slack, carry
//! versus sum reset ordering, orphan transitions, indication class,
//! disjointness of product covers and critical paths.

mod cover;
mod indication;
mod orphans;
mod paths;
mod report;
mod rt;

use thiserror::Error;

use crate::sim::SimError;

pub use cover::{check_disjoint_cover, cover_products, DisjointReport, DisjointWitness};
pub use indication::{classify_indication, IndicationClass, IndicationVerdict, IndicationWitness};
pub use orphans::{detect_orphans, OrphanClass, OrphanFinding};
pub use paths::{critical_path_report, static_rt_slack, CriticalPathReport, PathStep, SlackReport};
pub use report::{run_suite, CheckRow, CheckStatus, SuiteConfig, VerifyReport};
pub use rt::{
    check_relative_timing, rt_margins, rt_threshold, worst_rt_margin, RtMargin, RtViolation, SkewScenario,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unexpected netlist structure: {0}")]
    Structure(String),
    #[error("trace has no complete handshake phase markers")]
    IncompletePhase,
    #[error("expected {expected} dual-rail inputs, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("unknown literal `{0}` (expected A0, A1, B0, B1, CIN0 or CIN1)")]
    UnknownLiteral(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}
