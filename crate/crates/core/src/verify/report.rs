// SPDX-License-Identifier: Apache-2.0

//! The full check suite behind `dualrail verify`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;

use rayon::prelude::*;

use crate::adder::{build_dims_fa, build_early_output_fa, build_rca, AdderKind, RcaDescriptor};
use crate::gate::DelayConfig;
use crate::sim::{Handshake, HandshakeOptions, VectorSource};
use crate::time::Ps;

use super::{
    check_disjoint_cover, check_relative_timing, classify_indication, cover_products, critical_path_report,
    detect_orphans, rt_threshold, static_rt_slack, worst_rt_margin, IndicationClass, OrphanClass, SkewScenario,
    VerifyError,
};

/// Random vectors used when the width is too large to enumerate.
const RANDOM_VECTORS: usize = 1024;
const RANDOM_SEED: u64 = 1;
/// Widths up to this are checked exhaustively.
const EXHAUSTIVE_UP_TO: usize = 4;
const THRESHOLD_LIMIT: Ps = Ps(1000);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A finding the design is known to have.
    Expected,
    Info,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Expected => "EXPECTED",
            CheckStatus::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub check: String,
    pub status: CheckStatus,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub kind: AdderKind,
    pub width: usize,
    pub delays: DelayConfig,
    /// Late withdrawal of `skew_stage`'s operands, if any.
    pub skew: Option<Ps>,
    pub skew_stage: usize,
}

impl SuiteConfig {
    pub fn new(kind: AdderKind, width: usize) -> SuiteConfig {
        SuiteConfig {
            kind,
            width,
            delays: DelayConfig::default(),
            skew: None,
            skew_stage: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub kind: AdderKind,
    pub width: usize,
    pub vectors: String,
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.status == CheckStatus::Fail)
    }

    pub fn row(&self, check: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} adder, n={}, vectors: {}\n", self.kind, self.width, self.vectors);
        let w = self.rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
        for r in &self.rows {
            let _ = writeln!(s, "{:<w$}  {:<8}  {}", r.check, r.status.to_string(), r.witness);
        }
        s
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["check", "status", "witness"])?;
        for r in &self.rows {
            out.write_record([r.check.as_str(), &r.status.to_string(), r.witness.as_str()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn row(check: &str, status: CheckStatus, witness: impl Into<String>) -> CheckRow {
    CheckRow {
        check: check.to_string(),
        status,
        witness: witness.into(),
    }
}

fn pass_or_fail(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Per-vector dynamic results from a uniform handshake.
#[derive(Default)]
struct Dynamic {
    incorrect: Vec<String>,
    rt: Vec<String>,
    post_completion: Vec<String>,
    unacknowledged: BTreeMap<String, usize>,
    non_monotonic: Vec<String>,
}

pub fn run_suite(config: &SuiteConfig) -> Result<VerifyReport, VerifyError> {
    let netlist = build_rca(config.kind, config.width).map_err(|e| VerifyError::Structure(e.to_string()))?;
    let desc = RcaDescriptor::from_netlist(&netlist).map_err(|e| VerifyError::Structure(e.to_string()))?;
    let delays = &config.delays;
    let source = if config.width <= EXHAUSTIVE_UP_TO {
        VectorSource::Exhaustive
    } else {
        VectorSource::Random {
            count: RANDOM_VECTORS,
            seed: RANDOM_SEED,
        }
    };
    let mut rows = Vec::new();

    if config.kind == AdderKind::EarlyOutput && config.width >= 2 {
        let s = static_rt_slack(&netlist, delays)?;
        let status = if s.slack_ps() < 0 {
            CheckStatus::Expected
        } else {
            CheckStatus::Info
        };
        rows.push(row(
            "static-slack",
            status,
            format!(
                "direct {} ns, indirect {} ns, slack {} ns",
                s.direct,
                s.indirect,
                s.slack_ns()
            ),
        ));
    }

    let hs = Handshake::new(&netlist, delays, HandshakeOptions::default())?;
    let per_vector = source
        .vectors(config.width)?
        .par_iter()
        .map(|&v| -> Result<Dynamic, VerifyError> {
            let (report, trace) = hs.run(v.a, v.b, v.cin)?;
            let mut d = Dynamic::default();
            if !report.correct() {
                d.incorrect.push(format!("{v}: sum {:x} cout {}", report.sum, u8::from(report.cout)));
            }
            for x in check_relative_timing(&trace, &desc)? {
                d.rt.push(format!("{v}: stage {} margin {} ns", x.stage, x.margin));
            }
            for f in detect_orphans(&netlist, delays, &trace)? {
                if f.classes.contains(&OrphanClass::PostCompletion) {
                    d.post_completion.push(format!("{v}: {} at {} ns", f.net, f.time));
                }
                if f.classes.contains(&OrphanClass::NoOutputDescendant) {
                    *d.unacknowledged.entry(f.net).or_insert(0) += 1;
                }
            }
            for m in trace.phase_monotonicity_violations() {
                d.non_monotonic.push(format!("{v}: {} x{} in {}", netlist.net(m.net).name, m.transitions, m.phase));
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut dynamic = Dynamic::default();
    for d in per_vector {
        dynamic.incorrect.extend(d.incorrect);
        dynamic.rt.extend(d.rt);
        dynamic.post_completion.extend(d.post_completion);
        dynamic.non_monotonic.extend(d.non_monotonic);
        for (net, c) in d.unacknowledged {
            *dynamic.unacknowledged.entry(net).or_insert(0) += c;
        }
    }
    let first = |v: &[String]| v.first().cloned().unwrap_or_default();
    rows.push(row("outputs-correct", pass_or_fail(dynamic.incorrect.is_empty()), first(&dynamic.incorrect)));
    rows.push(row("rt-uniform", pass_or_fail(dynamic.rt.is_empty()), first(&dynamic.rt)));
    rows.push(row(
        "orphans-post-completion",
        pass_or_fail(dynamic.post_completion.is_empty()),
        first(&dynamic.post_completion),
    ));
    let unack = dynamic
        .unacknowledged
        .iter()
        .map(|(n, c)| format!("{n} x{c}"))
        .collect::<Vec<_>>()
        .join(", ");
    let unack_status = match (config.kind, dynamic.unacknowledged.is_empty()) {
        (_, true) => CheckStatus::Pass,
        // Early-reset carries race their sums; the ordering is covered by rt checks.
        (AdderKind::EarlyOutput, false) => CheckStatus::Expected,
        (AdderKind::DimsStrong, false) => CheckStatus::Fail,
    };
    rows.push(row("orphans-unacknowledged", unack_status, unack));
    rows.push(row(
        "monotonic",
        pass_or_fail(dynamic.non_monotonic.is_empty()),
        first(&dynamic.non_monotonic),
    ));

    if let Some(skew) = config.skew {
        let scenario = SkewScenario {
            stage: config.skew_stage,
            skew,
        };
        let worst = worst_rt_margin(&netlist, delays, scenario, &source)?;
        let (status, witness) = match worst {
            Some((v, m)) if m.margin_ps() > 0 => (
                CheckStatus::Fail,
                format!("{v}: stage {} margin {} ns", m.stage, Ps(m.margin_ps() as u64)),
            ),
            Some((v, m)) => (
                CheckStatus::Pass,
                format!("worst {v}: stage {} margin {} ns", m.stage, crate::time::fmt_signed_ns(m.margin_ps())),
            ),
            None => (CheckStatus::Info, "no stage resets both carry and sum".into()),
        };
        rows.push(row(&format!("rt-skew {} ns stage {}", skew, config.skew_stage), status, witness));
        let threshold = rt_threshold(&netlist, delays, config.skew_stage, THRESHOLD_LIMIT, &source)?;
        rows.push(row(
            "rt-skew-threshold",
            CheckStatus::Info,
            match threshold {
                Some(t) => format!("largest safe skew {t} ns"),
                None => format!("no violation up to {THRESHOLD_LIMIT} ns"),
            },
        ));
    }

    let (fa, expected) = match config.kind {
        AdderKind::EarlyOutput => (build_early_output_fa(), IndicationClass::Early),
        AdderKind::DimsStrong => (build_dims_fa(), IndicationClass::Strong),
    };
    let verdict = classify_indication(&fa, delays)?;
    let mut flags = Vec::new();
    if verdict.early_set {
        flags.push("early-set");
    }
    if verdict.early_reset {
        flags.push("early-reset");
    }
    let mut witness = verdict.class.to_string();
    if !flags.is_empty() {
        let _ = write!(witness, " [{}]", flags.join(", "));
    }
    if let Some(w) = verdict.early_witness().or(verdict.witnesses.first()) {
        let _ = write!(witness, "; {w}");
    }
    rows.push(row("indication", pass_or_fail(verdict.class == expected), witness));

    for (name, products) in cover_products() {
        let r = check_disjoint_cover(&products)?;
        let witness = r
            .witness
            .map(|w| {
                format!(
                    "products {} and {} overlap at a={} b={} cin={}",
                    w.first,
                    w.second,
                    u8::from(w.a),
                    u8::from(w.b),
                    u8::from(w.cin)
                )
            })
            .unwrap_or_default();
        rows.push(row(&format!("disjoint-cover {name}"), pass_or_fail(r.disjoint), witness));
    }

    let cp = critical_path_report(&netlist, delays)?;
    let recurring = cp
        .recurring
        .iter()
        .map(|(k, c)| format!("{k} x{c}"))
        .collect::<Vec<_>>()
        .join(", ");
    rows.push(row(
        "critical-path",
        CheckStatus::Info,
        format!(
            "{} -> {}: {} ns over {} gates; recurring {}",
            cp.start,
            cp.end,
            cp.delay,
            cp.steps.len(),
            if recurring.is_empty() { "none".into() } else { recurring }
        ),
    ));

    Ok(VerifyReport {
        kind: config.kind,
        width: config.width,
        vectors: source.describe(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn early_output_default() {
        let r = run_suite(&SuiteConfig::new(AdderKind::EarlyOutput, 2)).unwrap();
        assert!(!r.failed(), "{}", r.to_text());
        let slack = r.row("static-slack").unwrap();
        assert_eq!(slack.status, CheckStatus::Expected);
        assert!(slack.witness.ends_with("slack -0.063 ns"), "{}", slack.witness);
        assert_eq!(r.row("rt-uniform").unwrap().status, CheckStatus::Pass);
        assert_eq!(r.row("orphans-unacknowledged").unwrap().status, CheckStatus::Expected);
        assert!(r.row("indication").unwrap().witness.starts_with("early [early-reset]"));
    }

    #[test]
    fn skew_fails() {
        let mut c = SuiteConfig::new(AdderKind::EarlyOutput, 2);
        c.skew = Some(Ps(200));
        let r = run_suite(&c).unwrap();
        assert!(r.failed());
        let skew = r.row("rt-skew 0.200 ns stage 0").unwrap();
        assert_eq!(skew.status, CheckStatus::Fail);
        assert!(skew.witness.ends_with("stage 1 margin 0.088 ns"), "{}", skew.witness);
        assert_eq!(r.row("rt-skew-threshold").unwrap().witness, "largest safe skew 0.112 ns");
    }

    #[test]
    fn dims_is_clean() {
        let r = run_suite(&SuiteConfig::new(AdderKind::DimsStrong, 2)).unwrap();
        assert!(!r.failed(), "{}", r.to_text());
        assert!(r.row("static-slack").is_none());
        assert_eq!(r.row("orphans-unacknowledged").unwrap().status, CheckStatus::Pass);
        assert_eq!(r.row("indication").unwrap().witness, "strong");
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let r = run_suite(&SuiteConfig::new(AdderKind::EarlyOutput, 1)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), r.rows.len() + 1);
        assert!(text.starts_with("check,status,witness\n"));
    }
}
