// SPDX-License-Identifier: Apache-2.0

//! Unacknowledged internal transitions.
//!
//! A gate output event acknowledges an input's latest transition when
//! flipping that input at the gate's evaluation instant would have changed
//! the evaluated output. An internal transition is orphaned if no chain of
//! acknowledgments within its phase reaches a primary output or observed
//! net, or if it happens after every output it can influence has already
//! completed the phase.

use crate::gate::{eval_gate, DelayConfig, GateState};
use crate::netlist::{NetKind, Netlist};
use crate::sim::{EventId, Phase, Trace};
use crate::time::Ps;

use super::VerifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrphanClass {
    /// Occurs after all reachable outputs finished the phase.
    PostCompletion,
    /// Never acknowledged on the way to an output.
    NoOutputDescendant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrphanFinding {
    pub event: EventId,
    pub net: String,
    pub time: Ps,
    pub value: bool,
    pub phase: Phase,
    pub classes: Vec<OrphanClass>,
}

pub fn detect_orphans(netlist: &Netlist, delays: &DelayConfig, trace: &Trace) -> Result<Vec<OrphanFinding>, VerifyError> {
    let markers = trace.markers.ok_or(VerifyError::IncompletePhase)?;
    let nets = netlist.nets();
    let events = &trace.events;

    // Event indices per net, in time order.
    let mut by_net: Vec<Vec<usize>> = vec![Vec::new(); nets.len()];
    for (i, e) in events.iter().enumerate() {
        by_net[e.net.index()].push(i);
    }
    let latest_before = |net: usize, t: Ps, before: usize| -> Option<usize> {
        let list = &by_net[net];
        let n = list.partition_point(|&i| i < before && events[i].time <= t);
        n.checked_sub(1).map(|k| list[k])
    };

    // Acknowledgment, walked backwards from output events.
    let mut reaches_output = vec![false; events.len()];
    for i in (0..events.len()).rev() {
        let e = &events[i];
        let net = &nets[e.net.index()];
        if net.kind == NetKind::PrimaryOutput || net.observe {
            reaches_output[i] = true;
        }
        if !reaches_output[i] || e.cause.is_none() {
            continue;
        }
        let Some(g) = net.driver else { continue };
        let gate = netlist.gate(g);
        let t_eval = e.time.saturating_sub(netlist.gate_delay(g, delays));
        let phase = trace.phase_of(i);
        let latest: Vec<Option<usize>> = gate
            .inputs
            .iter()
            .map(|n| latest_before(n.index(), t_eval, i))
            .collect();
        let inputs: Vec<bool> = latest.iter().map(|l| l.is_some_and(|j| events[j].value)).collect();
        let held = GateState { held: !e.value };
        for (pin, src) in latest.iter().enumerate() {
            let Some(j) = *src else { continue };
            if trace.phase_of(j) != phase {
                continue;
            }
            let mut flipped = inputs.clone();
            flipped[pin] = !flipped[pin];
            if eval_gate(gate.kind, &flipped, held).is_ok_and(|(v, _)| v != e.value) {
                reaches_output[j] = true;
            }
        }
    }

    // Per phase, when each output port last switched.
    let ports = netlist.output_ports();
    let mut port_done = [vec![None::<Ps>; ports.len()], vec![None::<Ps>; ports.len()]];
    let phase_slot = |p: Phase| if p == Phase::Valid { 0 } else { 1 };
    for (i, e) in events.iter().enumerate() {
        for (k, p) in ports.iter().enumerate() {
            if e.net == p.rail1 || e.net == p.rail0 {
                port_done[phase_slot(trace.phase_of(i))][k] = Some(e.time);
            }
        }
    }
    let phase_start = |p: Phase| if p == Phase::Valid { markers.valid_start } else { markers.rtz_start };

    // Output ports each net can influence.
    let cones: Vec<Vec<usize>> = (0..nets.len())
        .map(|n| {
            let mut seen = vec![false; nets.len()];
            let mut stack = vec![n];
            while let Some(x) = stack.pop() {
                if std::mem::replace(&mut seen[x], true) {
                    continue;
                }
                for pin in &nets[x].fanout {
                    stack.push(netlist.gate(pin.gate).output.index());
                }
            }
            ports
                .iter()
                .enumerate()
                .filter(|(_, p)| seen[p.rail1.index()] || seen[p.rail0.index()])
                .map(|(k, _)| k)
                .collect()
        })
        .collect();

    let mut findings = Vec::new();
    for (i, e) in events.iter().enumerate() {
        let net = &nets[e.net.index()];
        if net.kind != NetKind::Internal || net.observe {
            continue;
        }
        let phase = trace.phase_of(i);
        let mut classes = Vec::new();
        let cone = &cones[e.net.index()];
        if !cone.is_empty() {
            let done = cone
                .iter()
                .map(|&k| port_done[phase_slot(phase)][k].unwrap_or(phase_start(phase)))
                .max()
                .unwrap_or(phase_start(phase));
            if e.time > done {
                classes.push(OrphanClass::PostCompletion);
            }
        }
        if !reaches_output[i] {
            classes.push(OrphanClass::NoOutputDescendant);
        }
        if !classes.is_empty() {
            findings.push(OrphanFinding {
                event: e.id,
                net: net.name.clone(),
                time: e.time,
                value: e.value,
                phase,
                classes,
            });
        }
    }
    Ok(findings)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::adder::{build_rca, AdderKind, RcaDescriptor};
    use crate::sim::{run_handshake_cycle, Handshake, VectorSource};
    use crate::verify::SkewScenario;

    #[test]
    fn dims_runs_have_no_orphans() {
        let d = DelayConfig::default();
        let rca = build_rca(AdderKind::DimsStrong, 2).unwrap();
        for v in VectorSource::Exhaustive.vectors(2).unwrap() {
            let (_, t) = run_handshake_cycle(&rca, &d, v.a, v.b, v.cin).unwrap();
            assert_eq!(detect_orphans(&rca, &d, &t).unwrap(), vec![], "{v}");
        }
    }

    #[test]
    fn uniform_early_output_orphans_are_carry_resets() {
        let d = DelayConfig::default();
        let rca = build_rca(AdderKind::EarlyOutput, 3).unwrap();
        let mut nets = BTreeSet::new();
        for v in VectorSource::Exhaustive.vectors(3).unwrap() {
            let (_, t) = run_handshake_cycle(&rca, &d, v.a, v.b, v.cin).unwrap();
            for f in detect_orphans(&rca, &d, &t).unwrap() {
                assert_eq!(f.classes, [OrphanClass::NoOutputDescendant]);
                assert_eq!(f.phase, Phase::Rtz);
                assert!(!f.value);
                nets.insert(f.net);
            }
        }
        let expected: BTreeSet<String> = ["COUT01", "COUT00", "COUT11", "COUT10", "fa0_net4", "fa0_net5", "fa1_net4", "fa1_net5"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(nets, expected);
    }

    #[test]
    fn skewed_carry_reset_is_flagged_both_ways() {
        let d = DelayConfig::default();
        let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
        let desc = RcaDescriptor::from_netlist(&rca).unwrap();
        let scenario = SkewScenario { stage: 0, skew: Ps(200) };
        let hs = Handshake::new(&rca, &d, scenario.options(&desc)).unwrap();
        let (_, t) = hs.run(1, 0, false).unwrap();
        let findings = detect_orphans(&rca, &d, &t).unwrap();
        let carry = findings.iter().find(|f| f.net == "COUT00").unwrap();
        assert_eq!(carry.classes, [OrphanClass::PostCompletion, OrphanClass::NoOutputDescendant]);
        assert_eq!(carry.time - t.markers.unwrap().rtz_start, Ps(338));
    }
}
