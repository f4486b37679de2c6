// SPDX-License-Identifier: Apache-2.0

//! Deterministic event-driven gate simulation.
//!
//! Every net starts at 0 and every C-element holds 0, which for the gate
//! library in use is a consistent quiescent state. A gate is re-evaluated
//! whenever one of its inputs changes; a differing result is scheduled one
//! gate delay later, and a pending transition is cancelled when a newer
//! evaluation returns to the current value (inertial delay). Stateful gates
//! read their own output net as the held value, so a C-element behaves the
//! same as its AO222-with-feedback expansion.
//!
//! All events at one timestamp are applied before any gate is evaluated, and
//! zero-delay transitions land in a later delta round of the same timestamp.

mod batch;
mod handshake;
mod waveform;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::gate::{eval_gate, DelayConfig, GateState};
use crate::netlist::{GateId, NetId, NetKind, Netlist};
use crate::time::Ps;

pub use batch::{
    parse_vectors, read_batch_csv, run_vectors, write_batch_csv, BatchReport, CsvRow, Vector, VectorParseError,
    VectorResult, VectorSource,
};
pub use handshake::{
    run_handshake_cycle, CompletionMode, CycleReport, Handshake, HandshakeOptions, StageTiming,
};
pub use waveform::{read_vcd, write_vcd, VcdChange};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: EventId,
    pub time: Ps,
    pub net: NetId,
    pub value: bool,
    /// Triggering event; `None` for stimulus.
    pub cause: Option<EventId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stimulus {
    pub time: Ps,
    pub net: NetId,
    pub value: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Valid,
    Rtz,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Valid => "valid",
            Phase::Rtz => "rtz",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseMarkers {
    pub valid_start: Ps,
    pub valid_complete: Ps,
    pub rtz_start: Ps,
    pub rtz_complete: Ps,
    /// Index of the first event belonging to the RTZ phase.
    pub rtz_first_event: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<Event>,
    pub markers: Option<PhaseMarkers>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub net: NetId,
    pub phase: Phase,
    pub transitions: usize,
}

impl Trace {
    pub fn end_time(&self) -> Ps {
        self.events.last().map_or(Ps::ZERO, |e| e.time)
    }

    /// Phase of the event at `index`. Traces without markers are one
    /// valid phase.
    pub fn phase_of(&self, index: usize) -> Phase {
        match self.markers {
            Some(m) if index >= m.rtz_first_event => Phase::Rtz,
            _ => Phase::Valid,
        }
    }

    pub fn events_on(&self, net: NetId) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.net == net)
    }

    /// Nets that switch more than once within a phase.
    pub fn phase_monotonicity_violations(&self) -> Vec<MonotonicityViolation> {
        let mut counts: BTreeMap<(NetId, Phase), usize> = BTreeMap::new();
        for (i, e) in self.events.iter().enumerate() {
            *counts.entry((e.net, self.phase_of(i))).or_insert(0) += 1;
        }
        counts
            .into_iter()
            .filter(|&(_, c)| c > 1)
            .map(|((net, phase), transitions)| MonotonicityViolation { net, phase, transitions })
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("conflicting stimulus for net `{net}` at {time} ns")]
    StimulusConflict { net: String, time: Ps },
    #[error("stimulus targets `{net}`, which is not a primary input rail")]
    NotAnInput { net: String },
    #[error("stimulus for `{net}` at {time} ns lies in the past (now {now} ns)")]
    PastStimulus { net: String, time: Ps, now: Ps },
    #[error("simulation did not settle: {events} events, reached {time} ns")]
    Timeout { events: usize, time: Ps },
    #[error("{phase} phase settled at {time} ns without all outputs completing")]
    Deadlock { phase: Phase, time: Ps },
    #[error("operand {value:#x} does not fit in {width} bits")]
    OperandRange { value: u64, width: usize },
    #[error("netlist has no `{0}` net for detector-based completion")]
    NoDetector(String),
    #[error("{0}")]
    Netlist(String),
    #[error("vector {index} (a={a:#x} b={b:#x} cin={cin}): {source}")]
    Vector {
        index: usize,
        a: u64,
        b: u64,
        cin: bool,
        source: Box<SimError>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_events: usize,
    pub max_time: Ps,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_events: 5_000_000,
            max_time: Ps(1_000_000_000),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Entry {
    Stimulus { net: NetId, value: bool },
    Transition { gate: GateId, token: u64 },
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    value: bool,
    cause: Option<EventId>,
    token: u64,
}

/// Incremental simulation state over one netlist.
pub struct Simulator<'a> {
    netlist: &'a Netlist,
    delays: Vec<Ps>,
    values: Vec<bool>,
    last_event: Vec<Option<EventId>>,
    pending: Vec<Option<Pending>>,
    queue: BTreeMap<Ps, Vec<Entry>>,
    events: Vec<Event>,
    now: Ps,
    next_token: u64,
    limits: Limits,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a Netlist, delays: &DelayConfig) -> Simulator<'a> {
        Simulator {
            netlist,
            delays: netlist.gate_ids().map(|g| netlist.gate_delay(g, delays)).collect(),
            values: vec![false; netlist.nets().len()],
            last_event: vec![None; netlist.nets().len()],
            pending: vec![None; netlist.gates().len()],
            queue: BTreeMap::new(),
            events: Vec::new(),
            now: Ps::ZERO,
            next_token: 0,
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.netlist
    }

    pub fn now(&self) -> Ps {
        self.now
    }

    pub fn value(&self, net: NetId) -> bool {
        self.values[net.index()]
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    /// Queues input-rail changes. Two different values for one net at one
    /// instant are rejected.
    pub fn schedule(&mut self, stimulus: &[Stimulus]) -> Result<(), SimError> {
        for s in stimulus {
            let net = self.netlist.net(s.net);
            if net.kind != NetKind::PrimaryInput {
                return Err(SimError::NotAnInput { net: net.name.clone() });
            }
            if s.time < self.now {
                return Err(SimError::PastStimulus {
                    net: net.name.clone(),
                    time: s.time,
                    now: self.now,
                });
            }
            let slot = self.queue.entry(s.time).or_default();
            let clash = slot.iter().any(|e| {
                matches!(*e, Entry::Stimulus { net, value } if net == s.net && value != s.value)
            });
            if clash {
                return Err(SimError::StimulusConflict {
                    net: net.name.clone(),
                    time: s.time,
                });
            }
            slot.push(Entry::Stimulus {
                net: s.net,
                value: s.value,
            });
        }
        Ok(())
    }

    /// Processes queued work until nothing is pending.
    pub fn run_until_quiescent(&mut self) -> Result<(), SimError> {
        while let Some((time, entries)) = self.queue.pop_first() {
            if time > self.limits.max_time || self.events.len() > self.limits.max_events {
                return Err(SimError::Timeout {
                    events: self.events.len(),
                    time,
                });
            }
            self.now = time;
            self.step(time, entries);
        }
        Ok(())
    }

    fn record(&mut self, net: NetId, value: bool, cause: Option<EventId>, dirty: &mut Vec<GateId>) {
        if self.values[net.index()] == value {
            return;
        }
        let id = EventId(self.events.len() as u32);
        self.events.push(Event {
            id,
            time: self.now,
            net,
            value,
            cause,
        });
        self.values[net.index()] = value;
        self.last_event[net.index()] = Some(id);
        dirty.extend(self.netlist.net(net).fanout.iter().map(|p| p.gate));
    }

    fn step(&mut self, time: Ps, entries: Vec<Entry>) {
        let mut dirty = Vec::new();
        for entry in entries {
            match entry {
                Entry::Stimulus { net, value } => self.record(net, value, None, &mut dirty),
                Entry::Transition { gate, token } => {
                    let Some(p) = self.pending[gate.index()] else { continue };
                    if p.token != token {
                        continue;
                    }
                    self.pending[gate.index()] = None;
                    let out = self.netlist.gate(gate).output;
                    self.record(out, p.value, p.cause, &mut dirty);
                }
            }
        }
        dirty.sort_unstable();
        dirty.dedup();
        for g in dirty {
            self.evaluate(g, time);
        }
    }

    fn evaluate(&mut self, g: GateId, time: Ps) {
        let gate = self.netlist.gate(g);
        let inputs: Vec<bool> = gate.inputs.iter().map(|n| self.values[n.index()]).collect();
        let held = GateState {
            held: self.values[gate.output.index()],
        };
        // Arity was fixed when the netlist was validated; a malformed gate
        // simply never switches.
        let Ok((new, _)) = eval_gate(gate.kind, &inputs, held) else { return };
        let current = self.values[gate.output.index()];
        match self.pending[g.index()] {
            Some(p) if p.value == new => {}
            Some(_) => self.pending[g.index()] = None,
            None if new == current => {}
            None => {
                let cause = gate
                    .inputs
                    .iter()
                    .filter_map(|n| self.last_event[n.index()])
                    .filter(|&id| self.events[id.index()].time == time)
                    .max();
                let token = self.next_token;
                self.next_token += 1;
                self.pending[g.index()] = Some(Pending { value: new, cause, token });
                self.queue
                    .entry(time + self.delays[g.index()])
                    .or_default()
                    .push(Entry::Transition { gate: g, token });
            }
        }
    }
}

/// Runs `stimulus` from the all-zero state to quiescence.
pub fn simulate(netlist: &Netlist, delays: &DelayConfig, stimulus: &[Stimulus]) -> Result<Trace, SimError> {
    let mut sim = Simulator::new(netlist, delays);
    sim.schedule(stimulus)?;
    sim.run_until_quiescent()?;
    Ok(Trace {
        events: sim.into_events(),
        markers: None,
    })
}
