// SPDX-License-Identifier: Apache-2.0

//! Four-phase return-to-zero environment around a ripple-carry adder.

use std::collections::HashMap;

use crate::adder::{RcaDescriptor, DONE_NET};
use crate::gate::DelayConfig;
use crate::netlist::{DualRailPort, NetId, Netlist};
use crate::time::Ps;

use super::{Event, Limits, Phase, PhaseMarkers, SimError, Simulator, Stimulus, Trace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CompletionMode {
    /// An ideal decoder watches the output ports.
    #[default]
    Decoder,
    /// The attached completion detector's `done` net is watched.
    Detector,
}

#[derive(Clone, Debug, Default)]
pub struct HandshakeOptions {
    pub completion: CompletionMode,
    /// Extra withdrawal delay per input port name, e.g. `("A0", 200 ps)`.
    pub withdraw_skew: Vec<(String, Ps)>,
    pub limits: Limits,
}

/// Last transition on a stage's sum and carry rails in each phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageTiming {
    pub sum_valid: Option<Ps>,
    pub carry_valid: Option<Ps>,
    pub sum_reset: Option<Ps>,
    pub carry_reset: Option<Ps>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleReport {
    pub a: u64,
    pub b: u64,
    pub cin: bool,
    pub width: usize,
    pub sum: u64,
    pub cout: bool,
    pub forward: Ps,
    pub reverse: Ps,
    pub cycle: Ps,
    pub markers: PhaseMarkers,
    pub stages: Vec<StageTiming>,
}

impl CycleReport {
    /// Checks the decoded result against integer addition.
    pub fn correct(&self) -> bool {
        let total = self.a as u128 + self.b as u128 + self.cin as u128;
        let mask = if self.width >= 64 { u64::MAX } else { (1u64 << self.width) - 1 };
        self.sum == (total as u64) & mask && self.cout == ((total >> self.width) & 1 == 1)
    }
}

/// A reusable handshake environment for one adder netlist.
pub struct Handshake<'a> {
    netlist: &'a Netlist,
    delays: &'a DelayConfig,
    desc: RcaDescriptor,
    options: HandshakeOptions,
    skew: HashMap<String, Ps>,
    done: Option<NetId>,
}

impl<'a> Handshake<'a> {
    pub fn new(netlist: &'a Netlist, delays: &'a DelayConfig, options: HandshakeOptions) -> Result<Self, SimError> {
        let desc = RcaDescriptor::from_netlist(netlist).map_err(|e| SimError::Netlist(e.to_string()))?;
        let done = match options.completion {
            CompletionMode::Decoder => None,
            CompletionMode::Detector => Some(
                netlist
                    .net_id(DONE_NET)
                    .ok_or_else(|| SimError::NoDetector(DONE_NET.into()))?,
            ),
        };
        let skew = options.withdraw_skew.iter().cloned().collect();
        Ok(Handshake {
            netlist,
            delays,
            desc,
            options,
            skew,
            done,
        })
    }

    pub fn descriptor(&self) -> &RcaDescriptor {
        &self.desc
    }

    fn operand_rails(&self, a: u64, b: u64, cin: bool) -> Vec<(&DualRailPort, bool)> {
        let bit = |v: u64, k: usize| (v >> k) & 1 == 1;
        let mut out = Vec::with_capacity(2 * self.desc.width + 1);
        for k in 0..self.desc.width {
            out.push((&self.desc.a[k], bit(a, k)));
        }
        for k in 0..self.desc.width {
            out.push((&self.desc.b[k], bit(b, k)));
        }
        out.push((&self.desc.cin, cin));
        out
    }

    /// One valid/spacer cycle starting from the all-spacer state at t = 0.
    /// Spacer is applied once the valid phase has settled.
    pub fn run(&self, a: u64, b: u64, cin: bool) -> Result<(CycleReport, Trace), SimError> {
        let width = self.desc.width;
        for v in [a, b] {
            if width < 64 && v >> width != 0 {
                return Err(SimError::OperandRange { value: v, width });
            }
        }
        let rails = self.operand_rails(a, b, cin);
        let high = |(p, bit): &(&DualRailPort, bool)| if *bit { p.rail1 } else { p.rail0 };

        let mut sim = Simulator::new(self.netlist, self.delays).with_limits(self.options.limits);
        let valid: Vec<Stimulus> = rails
            .iter()
            .map(|r| Stimulus {
                time: Ps::ZERO,
                net: high(r),
                value: true,
            })
            .collect();
        sim.schedule(&valid)?;
        sim.run_until_quiescent()?;
        let settle = sim.now();
        let outputs: Vec<(NetId, NetId)> = self
            .netlist
            .output_ports()
            .iter()
            .map(|p| (p.rail1, p.rail0))
            .collect();
        let all_valid = outputs.iter().all(|&(r1, r0)| sim.value(r1) != sim.value(r0));
        if !all_valid || self.done.is_some_and(|d| !sim.value(d)) {
            return Err(SimError::Deadlock {
                phase: Phase::Valid,
                time: settle,
            });
        }
        let valid_state: Vec<bool> = outputs
            .iter()
            .flat_map(|&(r1, r0)| [sim.value(r1), sim.value(r0)])
            .collect();
        let read = |port: &DualRailPort| sim.value(port.rail1);
        let sum = (0..width).fold(0u64, |acc, k| acc | (read(&self.desc.sum[k]) as u64) << k);
        let cout = read(&self.desc.carries[width - 1]);

        let rtz_first_event = sim.events().len();
        let withdraw: Vec<Stimulus> = rails
            .iter()
            .map(|r| Stimulus {
                time: settle + self.skew.get(&r.0.name).copied().unwrap_or(Ps::ZERO),
                net: high(r),
                value: false,
            })
            .collect();
        let rtz_start = withdraw.iter().map(|s| s.time).min().unwrap_or(settle);
        sim.schedule(&withdraw)?;
        sim.run_until_quiescent()?;
        let all_spacer = outputs.iter().all(|&(r1, r0)| !sim.value(r1) && !sim.value(r0));
        if !all_spacer || self.done.is_some_and(|d| sim.value(d)) {
            return Err(SimError::Deadlock {
                phase: Phase::Rtz,
                time: sim.now(),
            });
        }
        let events = sim.into_events();

        let (valid_complete, rtz_complete) = match self.done {
            Some(d) => {
                let edge = |range: &[Event], v: bool| range.iter().find(|e| e.net == d && e.value == v).map(|e| e.time);
                (
                    edge(&events[..rtz_first_event], true),
                    edge(&events[rtz_first_event..], false),
                )
            }
            None => (
                completion_instant(&events[..rtz_first_event], &outputs, &vec![false; 2 * outputs.len()], true),
                completion_instant(&events[rtz_first_event..], &outputs, &valid_state, false),
            ),
        };
        let valid_complete = valid_complete.ok_or(SimError::Deadlock {
            phase: Phase::Valid,
            time: settle,
        })?;
        let rtz_complete = rtz_complete.ok_or(SimError::Deadlock {
            phase: Phase::Rtz,
            time: settle,
        })?;
        let markers = PhaseMarkers {
            valid_start: Ps::ZERO,
            valid_complete,
            rtz_start,
            rtz_complete,
            rtz_first_event,
        };

        let last_on = |range: &[Event], port: &DualRailPort| {
            range
                .iter()
                .filter(|e| e.net == port.rail1 || e.net == port.rail0)
                .map(|e| e.time)
                .max()
        };
        let (vphase, rphase) = events.split_at(rtz_first_event);
        let stages = (0..width)
            .map(|k| StageTiming {
                sum_valid: last_on(vphase, &self.desc.sum[k]),
                carry_valid: last_on(vphase, &self.desc.carries[k]),
                sum_reset: last_on(rphase, &self.desc.sum[k]),
                carry_reset: last_on(rphase, &self.desc.carries[k]),
            })
            .collect();

        let forward = valid_complete - Ps::ZERO;
        let reverse = rtz_complete.saturating_sub(rtz_start);
        let report = CycleReport {
            a,
            b,
            cin,
            width,
            sum,
            cout,
            forward,
            reverse,
            cycle: forward + reverse,
            markers,
            stages,
        };
        Ok((
            report,
            Trace {
                events,
                markers: Some(markers),
            },
        ))
    }
}

/// First instant, within `events`, after which every output pair holds a
/// codeword (`valid`) or spacer (`!valid`). `start` gives each rail's value
/// before the first event.
fn completion_instant(events: &[Event], outputs: &[(NetId, NetId)], start: &[bool], valid: bool) -> Option<Ps> {
    let mut value: HashMap<NetId, bool> = outputs
        .iter()
        .zip(start.chunks(2))
        .flat_map(|(&(r1, r0), v)| [(r1, v[0]), (r0, v[1])])
        .collect();
    let mut i = 0;
    while i < events.len() {
        let t = events[i].time;
        while i < events.len() && events[i].time == t {
            if let Some(v) = value.get_mut(&events[i].net) {
                *v = events[i].value;
            }
            i += 1;
        }
        let complete = outputs.iter().all(|(r1, r0)| {
            let (v1, v0) = (value[r1], value[r0]);
            if valid {
                v1 != v0
            } else {
                !v1 && !v0
            }
        });
        if complete {
            return Some(t);
        }
    }
    None
}

/// Convenience wrapper: one uniform handshake cycle with ideal completion.
pub fn run_handshake_cycle(
    netlist: &Netlist,
    delays: &DelayConfig,
    a: u64,
    b: u64,
    cin: bool,
) -> Result<(CycleReport, Trace), SimError> {
    Handshake::new(netlist, delays, HandshakeOptions::default())?.run(a, b, cin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{attach_completion_detector, build_rca, carry_chain_length, AdderKind};

    fn eo(n: usize) -> Netlist {
        build_rca(AdderKind::EarlyOutput, n).unwrap()
    }

    #[test]
    fn thirty_two_bit_latencies() {
        let rca = eo(32);
        let d = DelayConfig::default();
        let (kill, _) = run_handshake_cycle(&rca, &d, 0, 0, false).unwrap();
        assert_eq!((kill.sum, kill.forward, kill.reverse), (0, Ps(288), Ps(250)));
        let (gen, _) = run_handshake_cycle(&rca, &d, 0xFFFF_FFFF, 1, false).unwrap();
        assert!(gen.correct() && gen.cout);
        assert_eq!(gen.forward, Ps(2178));
        let (prop, _) = run_handshake_cycle(&rca, &d, 0xFFFF_FFFF, 0, true).unwrap();
        assert_eq!((prop.sum, prop.cout), (0, true));
        assert_eq!(prop.forward, Ps(2203));
        assert_eq!(prop.cycle, prop.forward + prop.reverse);
    }

    #[test]
    fn reverse_latency_is_width_independent() {
        let d = DelayConfig::default();
        // From the third stage on, a carry-in never falls before the stage's
        // own operand nets, so some sum always resets through AO22+AO22+C.
        for n in [3, 4, 8, 16, 32] {
            let rca = eo(n);
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            for (a, b, cin) in [(0, 0, false), (mask, 0, true), (mask, 1, false), (0x5555_5555 & mask, 0x3333_3333 & mask, true)] {
                let (r, _) = run_handshake_cycle(&rca, &d, a, b, cin).unwrap();
                assert_eq!(r.reverse, Ps(250), "n={n} a={a:x} b={b:x}");
            }
        }
    }

    #[test]
    fn short_cascades_can_reset_faster() {
        let d = DelayConfig::default();
        // Carry-in withdrawn with the operands lets the asum gate fall early.
        let (r, _) = run_handshake_cycle(&eo(1), &d, 0, 0, false).unwrap();
        assert_eq!(r.reverse, Ps(225));
        let (r, _) = run_handshake_cycle(&eo(1), &d, 1, 1, false).unwrap();
        assert_eq!(r.reverse, Ps(225));
        let (r, _) = run_handshake_cycle(&eo(2), &d, 3, 0, true).unwrap();
        assert_eq!(r.reverse, Ps(238));
        let (r, _) = run_handshake_cycle(&eo(2), &d, 0, 0, false).unwrap();
        assert_eq!(r.reverse, Ps(250));
    }

    #[test]
    fn forward_latency_tracks_chain_length() {
        let rca = eo(4);
        let d = DelayConfig::default();
        let hs = Handshake::new(&rca, &d, HandshakeOptions::default()).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                for cin in [false, true] {
                    let (r, _) = hs.run(a, b, cin).unwrap();
                    let m = carry_chain_length(a, b, 4) as u64;
                    assert!(r.correct());
                    assert!(r.forward.0 >= 225 + 63 * m && r.forward.0 <= 250 + 63 * m, "{a} {b} {cin}: {}", r.forward);
                }
            }
        }
    }

    #[test]
    fn dims_latency_grows_with_width() {
        let d = DelayConfig::default();
        let mut last = Ps::ZERO;
        for n in [1, 2, 4, 8] {
            let (r, _) = run_handshake_cycle(&build_rca(AdderKind::DimsStrong, n).unwrap(), &d, 0, 0, false).unwrap();
            assert_eq!(r.forward.0, 270 + 170 * (n as u64 - 1));
            assert!(r.forward > last && r.reverse.0 >= 270 + 170 * (n as u64 - 1));
            last = r.forward;
        }
    }

    #[test]
    fn detector_completion_adds_tree_delay() {
        let rca = attach_completion_detector(&eo(2));
        let d = DelayConfig::default();
        let opts = HandshakeOptions {
            completion: CompletionMode::Detector,
            ..Default::default()
        };
        let (ideal, _) = run_handshake_cycle(&rca, &d, 3, 1, false).unwrap();
        let (real, _) = Handshake::new(&rca, &d, opts.clone()).unwrap().run(3, 1, false).unwrap();
        assert_eq!(real.sum, ideal.sum);
        assert!(real.forward > ideal.forward);
        assert!(Handshake::new(&eo(2), &d, opts).is_err());
    }

    #[test]
    fn skewed_withdrawal_delays_stage_reset() {
        let rca = eo(2);
        let d = DelayConfig::default();
        let opts = HandshakeOptions {
            withdraw_skew: vec![("A0".into(), Ps(200)), ("B0".into(), Ps(200)), ("CIN".into(), Ps(1200))],
            ..Default::default()
        };
        let hs = Handshake::new(&rca, &d, opts).unwrap();
        // Stage 0 propagates, so its carry falls through net2 once the
        // late operands leave: 0.200 + AO22 + AO21.
        let (r, _) = hs.run(1, 0, false).unwrap();
        let rtz = r.markers.rtz_start;
        assert_eq!(r.stages[0].carry_reset, Some(rtz + Ps(338)));
        assert_eq!(r.stages[1].sum_reset, Some(rtz + Ps(250)));
        assert_eq!(r.reverse, Ps(450));
    }

    #[test]
    fn operand_range_and_monotonic_phases() {
        let rca = eo(3);
        let d = DelayConfig::default();
        assert!(matches!(
            run_handshake_cycle(&rca, &d, 8, 0, false),
            Err(SimError::OperandRange { .. })
        ));
        let (_, t) = run_handshake_cycle(&rca, &d, 5, 3, true).unwrap();
        assert!(t.phase_monotonicity_violations().is_empty());
    }
}
