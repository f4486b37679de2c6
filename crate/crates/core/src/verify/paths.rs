// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use crate::adder::{AdderKind, RcaDescriptor};
use crate::gate::{DelayConfig, GateType};
use crate::netlist::{NetId, Netlist, TimedPath};
use crate::time::{fmt_signed_ns, Ps};

use super::VerifyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlackReport {
    /// Operand withdrawal to a sum reset within one stage.
    pub direct: Ps,
    /// Operand withdrawal through the carry into the next stage's sum.
    pub indirect: Ps,
    pub direct_path: Vec<String>,
    pub indirect_path: Vec<String>,
}

impl SlackReport {
    /// `direct - indirect` in picoseconds.
    pub fn slack_ps(&self) -> i64 {
        self.direct.0 as i64 - self.indirect.0 as i64
    }

    pub fn slack_ns(&self) -> String {
        fmt_signed_ns(self.slack_ps())
    }
}

fn names(netlist: &Netlist, path: &TimedPath) -> Vec<String> {
    path.gates.iter().map(|(g, _)| netlist.gate(*g).name.clone()).collect()
}

fn early_output_descriptor(netlist: &Netlist) -> Result<RcaDescriptor, VerifyError> {
    let desc = RcaDescriptor::from_netlist(netlist).map_err(|e| VerifyError::Structure(e.to_string()))?;
    if desc.kind != AdderKind::EarlyOutput || desc.width < 2 {
        return Err(VerifyError::Structure(format!(
            "reset-path slack needs an early-output cascade of width >= 2, got {} width {}",
            desc.kind, desc.width
        )));
    }
    Ok(desc)
}

/// Longest direct and indirect reset paths into any sum output.
///
/// Both paths run through the complex gates and the sum C-element only:
/// the direct one is operand, input AO22, sum AO22, C-element; the indirect
/// one inserts the stage's AO21 carry gate and crosses into the next stage.
/// The OR2 completion branch and the AND2 generate terms are left out.
pub fn static_rt_slack(netlist: &Netlist, delays: &DelayConfig) -> Result<SlackReport, VerifyError> {
    let desc = early_output_descriptor(netlist)?;
    let side: Vec<NetId> = netlist
        .gates()
        .iter()
        .filter(|g| matches!(g.kind, GateType::Or2 | GateType::And2))
        .map(|g| g.output)
        .collect();
    let operands = |k: usize| vec![desc.a[k].rail1, desc.a[k].rail0, desc.b[k].rail1, desc.b[k].rail0];
    let sum = |k: usize| vec![desc.sum[k].rail1, desc.sum[k].rail0];
    let longest = |paths: Vec<Option<TimedPath>>| {
        paths
            .into_iter()
            .flatten()
            .fold(None::<TimedPath>, |best, p| match best {
                Some(b) if b.delay >= p.delay => Some(b),
                _ => Some(p),
            })
            .ok_or_else(|| VerifyError::Structure("no operand-to-sum path".into()))
    };
    let direct = longest(
        (0..desc.width)
            .map(|k| {
                let cin = desc.carry_in(k);
                let mut avoid = side.clone();
                avoid.extend([cin.rail1, cin.rail0]);
                netlist.longest_path(delays, &operands(k), &sum(k), &avoid)
            })
            .collect(),
    )?;
    let indirect = longest(
        (0..desc.width - 1)
            .map(|k| netlist.longest_path(delays, &operands(k), &sum(k + 1), &side))
            .collect(),
    )?;
    Ok(SlackReport {
        direct: direct.delay,
        indirect: indirect.delay,
        direct_path: names(netlist, &direct),
        indirect_path: names(netlist, &indirect),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub gate: String,
    pub kind: GateType,
    pub delay: Ps,
    /// Adder stage the gate belongs to, for adder netlists.
    pub stage: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPathReport {
    pub start: String,
    pub end: String,
    pub delay: Ps,
    pub steps: Vec<PathStep>,
    /// Gate types that every interior stage on the path contributes.
    pub recurring: BTreeMap<GateType, usize>,
}

/// Longest input-to-output path. For adders, the gates each interior stage
/// adds along the path form the recurring element.
pub fn critical_path_report(netlist: &Netlist, delays: &DelayConfig) -> Result<CriticalPathReport, VerifyError> {
    let rails = |ports: &[crate::netlist::DualRailPort]| -> Vec<NetId> {
        ports.iter().flat_map(|p| [p.rail1, p.rail0]).collect()
    };
    let path = netlist
        .longest_path(delays, &rails(netlist.input_ports()), &rails(netlist.output_ports()), &[])
        .ok_or_else(|| VerifyError::Structure("no input-to-output path, or the netlist is cyclic".into()))?;
    let stages = RcaDescriptor::from_netlist(netlist)
        .ok()
        .map(|d| d.gate_stages(netlist));
    let steps: Vec<PathStep> = path
        .gates
        .iter()
        .map(|&(g, delay)| {
            let gate = netlist.gate(g);
            PathStep {
                gate: gate.name.clone(),
                kind: gate.kind,
                delay,
                stage: stages.as_ref().map(|s| s[g.index()]),
            }
        })
        .collect();

    let mut per_stage: BTreeMap<usize, BTreeMap<GateType, usize>> = BTreeMap::new();
    for s in &steps {
        if let Some(k) = s.stage {
            *per_stage.entry(k).or_default().entry(s.kind).or_insert(0) += 1;
        }
    }
    let interior: Vec<&BTreeMap<GateType, usize>> = match (per_stage.keys().next(), per_stage.keys().last()) {
        (Some(&first), Some(&last)) => per_stage
            .iter()
            .filter(|(&k, _)| k > first && k < last)
            .map(|(_, c)| c)
            .collect(),
        _ => Vec::new(),
    };
    let mut recurring = BTreeMap::new();
    if let Some((head, rest)) = interior.split_first() {
        for (&kind, &count) in head.iter() {
            let common = rest.iter().map(|c| c.get(&kind).copied().unwrap_or(0)).fold(count, usize::min);
            if common > 0 {
                recurring.insert(kind, common);
            }
        }
    }

    Ok(CriticalPathReport {
        start: netlist.net(path.start).name.clone(),
        end: netlist.net(path.end).name.clone(),
        delay: path.delay,
        steps,
        recurring,
    })
}
