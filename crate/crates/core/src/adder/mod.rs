// SPDX-License-Identifier: Apache-2.0

//! Generators for dual-rail full adders, ripple-carry cascades and
//! completion detectors.
//!
//! Two full-adder styles are available:
//!
//! * [`AdderKind::EarlyOutput`]: the 11-gate early-reset adder built from the
//!   factorized sum/carry equations. Its sum rails pass through C-elements
//!   that join the operand-only completion signal `net3`, while the carry
//!   rails are plain AO21 gates. Cascading it gives a ripple-carry adder whose
//!   spacer phase takes one full-adder delay regardless of width.
//! * [`AdderKind::DimsStrong`]: a delay-insensitive minterm (DIMS) adder, the
//!   canonical strongly indicating reference. Each 3-literal minterm is a
//!   C-element pair `C(C(A,B),CIN)` where the inner `C(A,B)` is shared by the
//!   two minterms that differ only in the carry rail; each output rail ORs
//!   its four minterms.
//!
//! Single-stage netlists use the rail names `A1/A0, B1/B0, CIN1/CIN0,
//! SUM1/SUM0, COUT1/COUT0`. Wider cascades name bit `k` rails `A{k}1/A{k}0`
//! and so on, carry-in `CIN01/CIN00`, and the carry between stage `k` and
//! `k+1` `COUT{k}1/COUT{k}0`. Internal nets keep their single-stage names
//! behind an `fa{k}_` prefix.

mod completion;
mod covers;
mod descriptor;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gate::GateType;
use crate::netlist::{Netlist, NetlistDesc};

pub use completion::{attach_completion_detector, build_completion_detector, DONE_NET};
pub use covers::{full_adder_covers, Cover, Minterm};
pub use descriptor::{carry_chain_length, RcaDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdderKind {
    EarlyOutput,
    DimsStrong,
}

impl AdderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdderKind::EarlyOutput => "early-output",
            AdderKind::DimsStrong => "dims",
        }
    }
}

impl fmt::Display for AdderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdderKind {
    type Err = AdderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "early-output" | "early" | "eo" => Ok(AdderKind::EarlyOutput),
            "dims" | "dims-strong" | "strong" => Ok(AdderKind::DimsStrong),
            other => Err(AdderError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdderError {
    #[error("adder width must be at least 1")]
    ZeroWidth,
    #[error("a completion detector needs at least one dual-rail pair")]
    ZeroPairs,
    #[error("unknown adder kind `{0}` (expected early-output or dims)")]
    UnknownKind(String),
    #[error("netlist is not a generated ripple-carry adder: {0}")]
    NotAnAdder(String),
}

/// Rail and prefix naming for one full-adder stage.
struct StageNames {
    prefix: String,
    a: (String, String),
    b: (String, String),
    cin: (String, String),
    sum: (String, String),
    cout: (String, String),
}

impl StageNames {
    fn single() -> StageNames {
        let pair = |base: &str| (format!("{base}1"), format!("{base}0"));
        StageNames {
            prefix: String::new(),
            a: pair("A"),
            b: pair("B"),
            cin: pair("CIN"),
            sum: pair("SUM"),
            cout: pair("COUT"),
        }
    }

    fn in_cascade(k: usize) -> StageNames {
        let pair = |base: String| (format!("{base}1"), format!("{base}0"));
        StageNames {
            prefix: format!("fa{k}_"),
            a: pair(format!("A{k}")),
            b: pair(format!("B{k}")),
            cin: if k == 0 {
                pair("CIN0".to_string())
            } else {
                pair(format!("COUT{}", k - 1))
            },
            sum: pair(format!("SUM{k}")),
            cout: pair(format!("COUT{k}")),
        }
    }

    fn local(&self, name: &str) -> String {
        format!("{}{}", self.prefix, name)
    }
}

fn early_output_stage(d: &mut NetlistDesc, s: &StageNames) {
    let l = |n: &str| s.local(n);
    let (a1, a0) = (s.a.0.as_str(), s.a.1.as_str());
    let (b1, b0) = (s.b.0.as_str(), s.b.1.as_str());
    let (c1, c0) = (s.cin.0.as_str(), s.cin.1.as_str());
    let owned = [l("net1"), l("net2"), l("net3"), l("net4"), l("net5"), l("asum1"), l("asum0")];
    let [net1, net2, net3, net4, net5, asum1, asum0] = owned.each_ref().map(String::as_str);

    // net1: A and B agree (kill or generate); net2: they differ (propagate).
    d.gate(l("CG1"), GateType::Ao22, &[a0, b0, a1, b1], net1)
        .gate(l("CG2"), GateType::Ao22, &[a0, b1, a1, b0], net2)
        .gate(l("OR"), GateType::Or2, &[net1, net2], net3)
        .gate(l("CG3"), GateType::Ao22, &[net1, c1, net2, c0], asum1)
        .gate(l("CG4"), GateType::Ao22, &[net1, c0, net2, c1], asum0)
        .gate(l("CE1"), GateType::Celement2, &[asum1, net3], &s.sum.0)
        .gate(l("CE2"), GateType::Celement2, &[asum0, net3], &s.sum.1)
        .gate(l("AND1"), GateType::And2, &[a1, b1], net4)
        .gate(l("AND2"), GateType::And2, &[a0, b0], net5)
        .gate(l("CG5"), GateType::Ao21, &[net2, c1, net4], &s.cout.0)
        .gate(l("CG6"), GateType::Ao21, &[net2, c0, net5], &s.cout.1);
}

fn dims_stage(d: &mut NetlistDesc, s: &StageNames) {
    let rail = |pair: &(String, String), bit: bool| if bit { pair.0.clone() } else { pair.1.clone() };
    let tag = |bit: bool| if bit { '1' } else { '0' };

    for a in [false, true] {
        for b in [false, true] {
            let ab = format!("A{}B{}", tag(a), tag(b));
            d.gate(
                s.local(&format!("C_{ab}")),
                GateType::Celement2,
                &[rail(&s.a, a), rail(&s.b, b)],
                s.local(&ab),
            );
        }
    }
    for m in Minterm::all() {
        let ab = s.local(&format!("A{}B{}", tag(m.a), tag(m.b)));
        d.gate(
            s.local(&format!("C_{}", m.label())),
            GateType::Celement2,
            &[ab, rail(&s.cin, m.cin)],
            s.local(&format!("m_{}", m.label())),
        );
    }
    for cover in full_adder_covers() {
        let out = match cover.name {
            "SUM1" => &s.sum.0,
            "SUM0" => &s.sum.1,
            "COUT1" => &s.cout.0,
            _ => &s.cout.1,
        };
        let terms: Vec<String> = cover
            .minterms
            .iter()
            .map(|m| s.local(&format!("m_{}", m.label())))
            .collect();
        d.gate(s.local(&format!("OR_{}", cover.name)), GateType::Or4, &terms, out.clone());
    }
}

fn single_stage(kind: AdderKind) -> Netlist {
    let s = StageNames::single();
    let mut d = NetlistDesc::default();
    d.input("A", &s.a.0, &s.a.1)
        .input("B", &s.b.0, &s.b.1)
        .input("CIN", &s.cin.0, &s.cin.1);
    match kind {
        AdderKind::EarlyOutput => early_output_stage(&mut d, &s),
        AdderKind::DimsStrong => dims_stage(&mut d, &s),
    }
    d.output("SUM", &s.sum.0, &s.sum.1)
        .output("COUT", &s.cout.0, &s.cout.1);
    Netlist::assemble(&d).expect("generated full adder is well formed")
}

/// The 11-gate early-output full adder.
pub fn build_early_output_fa() -> Netlist {
    single_stage(AdderKind::EarlyOutput)
}

/// DIMS full adder: 4 shared `C(A,B)`, 8 minterm `C(·,CIN)`, 4 OR4.
pub fn build_dims_fa() -> Netlist {
    single_stage(AdderKind::DimsStrong)
}

/// `n`-bit ripple-carry adder. `n = 1` yields the single full adder.
pub fn build_rca(kind: AdderKind, n: usize) -> Result<Netlist, AdderError> {
    if n == 0 {
        return Err(AdderError::ZeroWidth);
    }
    if n == 1 {
        return Ok(single_stage(kind));
    }
    let mut d = NetlistDesc::default();
    for k in 0..n {
        d.input(format!("A{k}"), format!("A{k}1"), format!("A{k}0"));
    }
    for k in 0..n {
        d.input(format!("B{k}"), format!("B{k}1"), format!("B{k}0"));
    }
    d.input("CIN", "CIN01", "CIN00");
    for k in 0..n {
        let s = StageNames::in_cascade(k);
        match kind {
            AdderKind::EarlyOutput => early_output_stage(&mut d, &s),
            AdderKind::DimsStrong => dims_stage(&mut d, &s),
        }
    }
    for k in 0..n {
        d.output(format!("SUM{k}"), format!("SUM{k}1"), format!("SUM{k}0"));
    }
    d.output("COUT", format!("COUT{}1", n - 1), format!("COUT{}0", n - 1));
    Ok(Netlist::assemble(&d).expect("generated adder is well formed"))
}
