// SPDX-License-Identifier: Apache-2.0

//! Longest structural path search over the acyclic gate graph.

use crate::gate::DelayConfig;
use crate::time::Ps;

use super::{GateId, NetId, Netlist};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedPath {
    pub start: NetId,
    pub end: NetId,
    /// Gates from `start` to `end`, with each gate's delay.
    pub gates: Vec<(GateId, Ps)>,
    pub delay: Ps,
}

impl Netlist {
    /// Longest-delay path from any net in `from` to any net in `to`, never
    /// passing through a net in `avoid`. Ties resolve to the lowest pin, then
    /// the first sink listed. Returns `None` for cyclic netlists or when no
    /// path exists.
    pub fn longest_path(
        &self,
        delays: &DelayConfig,
        from: &[NetId],
        to: &[NetId],
        avoid: &[NetId],
    ) -> Option<TimedPath> {
        let order = self.topo_order()?;
        // Per net: arrival time, plus the (gate, predecessor net) it came through.
        let mut arrival: Vec<Option<Ps>> = vec![None; self.nets.len()];
        let mut via: Vec<Option<(GateId, NetId)>> = vec![None; self.nets.len()];
        for &n in from {
            if !avoid.contains(&n) {
                arrival[n.index()] = Some(Ps::ZERO);
            }
        }
        for g in order {
            let gate = self.gate(g);
            if avoid.contains(&gate.output) {
                continue;
            }
            let mut best: Option<(Ps, NetId)> = None;
            for &input in &gate.inputs {
                if let Some(t) = arrival[input.index()] {
                    if best.is_none_or(|(bt, _)| t > bt) {
                        best = Some((t, input));
                    }
                }
            }
            if let Some((t, pred)) = best {
                let out = gate.output.index();
                let t = t + self.gate_delay(g, delays);
                if arrival[out].is_none_or(|cur| t > cur) {
                    arrival[out] = Some(t);
                    via[out] = Some((g, pred));
                }
            }
        }

        let mut end: Option<(Ps, NetId)> = None;
        for &n in to {
            if let Some(t) = arrival[n.index()] {
                if end.is_none_or(|(bt, _)| t > bt) {
                    end = Some((t, n));
                }
            }
        }
        let (delay, end) = end?;
        let mut gates = Vec::new();
        let mut cur = end;
        while let Some((g, pred)) = via[cur.index()] {
            gates.push((g, self.gate_delay(g, delays)));
            cur = pred;
        }
        gates.reverse();
        Some(TimedPath {
            start: cur,
            end,
            gates,
            delay,
        })
    }
}
