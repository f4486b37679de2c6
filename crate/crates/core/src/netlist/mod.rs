// SPDX-License-Identifier: Apache-2.0

//! Immutable gate-level circuit graph with dual-rail port grouping.
//!
//! A [`Netlist`] is assembled from a [`NetlistDesc`] (the JSON file format)
//! and never mutated afterwards. Nets carry zero wire delay and every fork is
//! isochronic: a transition reaches all fanout pins at the same instant.

mod dual_rail;
mod paths;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::{DelayConfig, GateType};
use crate::time::{Ps, TimeParseError};

pub use dual_rail::{decode_outputs, encode_word, Decoded, EncodeError, RailPair};
pub use paths::TimedPath;
pub use validate::{ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(pub u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl GateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetKind {
    PrimaryInput,
    PrimaryOutput,
    Internal,
}

/// A gate input pin: `gate`'s input number `pin`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pin {
    pub gate: GateId,
    pub pin: usize,
}

#[derive(Clone, Debug)]
pub struct Net {
    pub name: String,
    pub kind: NetKind,
    pub driver: Option<GateId>,
    pub fanout: Vec<Pin>,
    /// Single-rail signal watched by the environment (e.g. a `done` line).
    pub observe: bool,
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub name: String,
    pub kind: GateType,
    pub inputs: Vec<NetId>,
    pub output: NetId,
    pub delay: Option<Ps>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualRailPort {
    pub name: String,
    pub rail1: NetId,
    pub rail0: NetId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDesc {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: GateType,
    pub inputs: Vec<String>,
    pub output: String,
    /// Per-instance delay override in ns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortDesc {
    pub name: String,
    pub rail1: String,
    pub rail0: String,
}

/// Serialized netlist: `gates[]`, `input_ports[]`, `output_ports[]` and an
/// optional list of observe-only nets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetlistDesc {
    pub gates: Vec<GateDesc>,
    pub input_ports: Vec<PortDesc>,
    pub output_ports: Vec<PortDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observe: Vec<String>,
}

impl NetlistDesc {
    pub fn gate(
        &mut self,
        name: impl Into<String>,
        kind: GateType,
        inputs: &[impl AsRef<str>],
        output: impl Into<String>,
    ) -> &mut Self {
        self.gates.push(GateDesc {
            name: name.into(),
            kind,
            inputs: inputs.iter().map(|s| s.as_ref().to_string()).collect(),
            output: output.into(),
            delay: None,
        });
        self
    }

    pub fn input(&mut self, name: impl Into<String>, rail1: impl Into<String>, rail0: impl Into<String>) -> &mut Self {
        self.input_ports.push(PortDesc {
            name: name.into(),
            rail1: rail1.into(),
            rail0: rail0.into(),
        });
        self
    }

    pub fn output(&mut self, name: impl Into<String>, rail1: impl Into<String>, rail0: impl Into<String>) -> &mut Self {
        self.output_ports.push(PortDesc {
            name: name.into(),
            rail1: rail1.into(),
            rail0: rail0.into(),
        });
        self
    }
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("{context} references undeclared net `{net}`")]
    DanglingNet { context: String, net: String },
    #[error("net `{net}` has more than one driver (`{first}` and `{second}`)")]
    DuplicateDriver {
        net: String,
        first: String,
        second: String,
    },
    #[error("duplicate gate name `{0}`")]
    DuplicateGate(String),
    #[error("gate `{gate}`: {source}")]
    Delay { gate: String, source: TimeParseError },
    #[error("malformed netlist file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug)]
pub struct Netlist {
    gates: Vec<Gate>,
    nets: Vec<Net>,
    inputs: Vec<DualRailPort>,
    outputs: Vec<DualRailPort>,
    net_names: HashMap<String, NetId>,
}

impl Netlist {
    /// Builds a netlist from its description. Nets are declared by input
    /// port rails and gate outputs; everything else must reference them.
    pub fn assemble(desc: &NetlistDesc) -> Result<Netlist, NetlistError> {
        let mut nets: Vec<Net> = Vec::new();
        let mut net_names: HashMap<String, NetId> = HashMap::new();
        let mut drivers: HashMap<String, String> = HashMap::new();

        let mut declare = |name: &str, kind: NetKind, nets: &mut Vec<Net>| -> NetId {
            *net_names.entry(name.to_string()).or_insert_with(|| {
                nets.push(Net {
                    name: name.to_string(),
                    kind,
                    driver: None,
                    fanout: Vec::new(),
                    observe: false,
                });
                NetId(nets.len() as u32 - 1)
            })
        };

        for port in &desc.input_ports {
            for rail in [&port.rail1, &port.rail0] {
                declare(rail, NetKind::PrimaryInput, &mut nets);
                drivers.entry(rail.clone()).or_insert_with(|| format!("input port {}", port.name));
            }
        }

        let mut gate_names = HashMap::new();
        for (idx, g) in desc.gates.iter().enumerate() {
            if gate_names.insert(g.name.clone(), idx).is_some() {
                return Err(NetlistError::DuplicateGate(g.name.clone()));
            }
            if let Some(first) = drivers.get(&g.output) {
                return Err(NetlistError::DuplicateDriver {
                    net: g.output.clone(),
                    first: first.clone(),
                    second: g.name.clone(),
                });
            }
            drivers.insert(g.output.clone(), g.name.clone());
            let id = declare(&g.output, NetKind::Internal, &mut nets);
            nets[id.index()].driver = Some(GateId(idx as u32));
        }

        let lookup = |name: &str, context: &dyn Fn() -> String| -> Result<NetId, NetlistError> {
            net_names.get(name).copied().ok_or_else(|| NetlistError::DanglingNet {
                context: context(),
                net: name.to_string(),
            })
        };

        let mut gates = Vec::with_capacity(desc.gates.len());
        for (idx, g) in desc.gates.iter().enumerate() {
            let inputs = g
                .inputs
                .iter()
                .map(|n| lookup(n, &|| format!("gate `{}`", g.name)))
                .collect::<Result<Vec<_>, _>>()?;
            let delay = g
                .delay
                .map(Ps::from_ns_f64)
                .transpose()
                .map_err(|source| NetlistError::Delay {
                    gate: g.name.clone(),
                    source,
                })?;
            let output = net_names[&g.output];
            for (pin, net) in inputs.iter().enumerate() {
                nets[net.index()].fanout.push(Pin {
                    gate: GateId(idx as u32),
                    pin,
                });
            }
            gates.push(Gate {
                name: g.name.clone(),
                kind: g.kind,
                inputs,
                output,
                delay,
            });
        }

        let port = |p: &PortDesc| -> Result<DualRailPort, NetlistError> {
            let ctx = || format!("port `{}`", p.name);
            Ok(DualRailPort {
                name: p.name.clone(),
                rail1: lookup(&p.rail1, &ctx)?,
                rail0: lookup(&p.rail0, &ctx)?,
            })
        };
        let inputs = desc.input_ports.iter().map(port).collect::<Result<Vec<_>, _>>()?;
        let outputs = desc.output_ports.iter().map(port).collect::<Result<Vec<_>, _>>()?;
        for p in &outputs {
            for rail in [p.rail1, p.rail0] {
                if nets[rail.index()].kind == NetKind::Internal {
                    nets[rail.index()].kind = NetKind::PrimaryOutput;
                }
            }
        }
        for name in &desc.observe {
            let id = lookup(name, &|| "observe list".to_string())?;
            nets[id.index()].observe = true;
        }

        Ok(Netlist {
            gates,
            nets,
            inputs,
            outputs,
            net_names,
        })
    }

    pub fn from_json(text: &str) -> Result<Netlist, NetlistError> {
        let desc: NetlistDesc = serde_json::from_str(text)?;
        Netlist::assemble(&desc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_desc()).expect("netlist description serializes")
    }

    pub fn to_desc(&self) -> NetlistDesc {
        let name = |id: NetId| self.nets[id.index()].name.clone();
        let port = |p: &DualRailPort| PortDesc {
            name: p.name.clone(),
            rail1: name(p.rail1),
            rail0: name(p.rail0),
        };
        NetlistDesc {
            gates: self
                .gates
                .iter()
                .map(|g| GateDesc {
                    name: g.name.clone(),
                    kind: g.kind,
                    inputs: g.inputs.iter().map(|&n| name(n)).collect(),
                    output: name(g.output),
                    delay: g.delay.map(Ps::as_ns_f64),
                })
                .collect(),
            input_ports: self.inputs.iter().map(port).collect(),
            output_ports: self.outputs.iter().map(port).collect(),
            observe: self
                .nets
                .iter()
                .filter(|n| n.observe)
                .map(|n| n.name.clone())
                .collect(),
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.index()]
    }

    pub fn input_ports(&self) -> &[DualRailPort] {
        &self.inputs
    }

    pub fn output_ports(&self) -> &[DualRailPort] {
        &self.outputs
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.net_names.get(name).copied()
    }

    pub fn gate_id(&self, name: &str) -> Option<GateId> {
        self.gates
            .iter()
            .position(|g| g.name == name)
            .map(|i| GateId(i as u32))
    }

    pub fn input_port(&self, name: &str) -> Option<&DualRailPort> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output_port(&self, name: &str) -> Option<&DualRailPort> {
        self.outputs.iter().find(|p| p.name == name)
    }

    pub fn gate_delay(&self, id: GateId, delays: &DelayConfig) -> Ps {
        let g = self.gate(id);
        g.delay.unwrap_or_else(|| delays.get(g.kind))
    }

    pub fn gate_ids(&self) -> impl Iterator<Item = GateId> {
        (0..self.gates.len() as u32).map(GateId)
    }

    /// Gate count per type.
    pub fn census(&self) -> Census {
        let mut counts = std::collections::BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.kind).or_insert(0) += 1;
        }
        Census(counts)
    }

    /// Replaces every CELEMENT2 `C(a, b) -> y` by `AO222(a, b, a, y, b, y) -> y`,
    /// the majority-with-feedback form of a 2-input C-element. `delay`
    /// overrides each replacement's delay; otherwise a C-element's own
    /// override carries over and the AO222 library delay applies.
    pub fn expand_c_elements(&self, delay: Option<Ps>) -> Netlist {
        let mut desc = self.to_desc();
        for g in &mut desc.gates {
            if g.kind != GateType::Celement2 {
                continue;
            }
            let (a, b, y) = (g.inputs[0].clone(), g.inputs[1].clone(), g.output.clone());
            g.kind = GateType::Ao222;
            g.inputs = vec![a.clone(), b.clone(), a, y.clone(), b, y];
            if let Some(d) = delay {
                g.delay = Some(d.as_ns_f64());
            }
        }
        Netlist::assemble(&desc).expect("expansion keeps every net declared")
    }

    /// Gates in dependency order, or `None` when the gate graph has a cycle.
    pub fn topo_order(&self) -> Option<Vec<GateId>> {
        let mut indegree: Vec<usize> = self
            .gates
            .iter()
            .map(|g| {
                g.inputs
                    .iter()
                    .filter(|n| self.nets[n.index()].driver.is_some())
                    .count()
            })
            .collect();
        let mut ready: Vec<GateId> = self
            .gate_ids()
            .filter(|g| indegree[g.index()] == 0)
            .collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.gates.len());
        while let Some(g) = ready.pop() {
            order.push(g);
            for pin in &self.nets[self.gate(g).output.index()].fanout {
                let d = &mut indegree[pin.gate.index()];
                *d -= 1;
                if *d == 0 {
                    ready.push(pin.gate);
                }
            }
        }
        (order.len() == self.gates.len()).then_some(order)
    }
}

/// Gate-type histogram of a netlist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census(pub std::collections::BTreeMap<GateType, usize>);

impl Census {
    pub fn count(&self, kind: GateType) -> usize {
        self.0.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(g, n)| format!("{g}:{n}")).collect();
        write!(f, "{} gates ({})", self.total(), parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_gate() -> NetlistDesc {
        let mut d = NetlistDesc::default();
        d.input("X", "x1", "x0")
            .input("Y", "y1", "y0")
            .gate("g0", GateType::And2, &["x1", "y1"], "z1")
            .gate("g1", GateType::Or2, &["x0", "y0"], "z0")
            .output("Z", "z1", "z0");
        d
    }

    #[test]
    fn assemble_single_gate() {
        let mut d = NetlistDesc::default();
        d.input("X", "x1", "x0")
            .gate("g", GateType::And2, &["x1", "x0"], "y")
            .output("Y", "y", "y");
        let n = Netlist::assemble(&d).unwrap();
        assert_eq!(n.gates().len(), 1);
        let y = n.net_id("y").unwrap();
        assert_eq!(n.net(y).kind, NetKind::PrimaryOutput);
        assert_eq!(n.net(n.net_id("x1").unwrap()).fanout, vec![Pin { gate: GateId(0), pin: 0 }]);
    }

    #[test]
    fn rejects_two_drivers() {
        let mut d = and_gate();
        d.gate("g2", GateType::And2, &["x1", "y0"], "z1");
        assert!(matches!(
            Netlist::assemble(&d),
            Err(NetlistError::DuplicateDriver { net, .. }) if net == "z1"
        ));
        let mut d = and_gate();
        d.gate("g2", GateType::And2, &["x1", "y0"], "x0");
        assert!(matches!(Netlist::assemble(&d), Err(NetlistError::DuplicateDriver { .. })));
    }

    #[test]
    fn rejects_dangling_reference() {
        let mut d = and_gate();
        d.gate("g2", GateType::And2, &["x1", "nowhere"], "w");
        assert!(matches!(
            Netlist::assemble(&d),
            Err(NetlistError::DanglingNet { net, .. }) if net == "nowhere"
        ));
        let mut d = and_gate();
        d.output("W", "w1", "w0");
        assert!(matches!(Netlist::assemble(&d), Err(NetlistError::DanglingNet { .. })));
    }

    #[test]
    fn json_round_trip_keeps_delay_override() {
        let mut d = and_gate();
        d.gates[1].delay = Some(0.063);
        let n = Netlist::assemble(&d).unwrap();
        assert_eq!(n.gate(GateId(1)).delay, Some(Ps(63)));
        let text = n.to_json();
        let back = Netlist::from_json(&text).unwrap();
        assert_eq!(back.to_desc(), d);
        assert!(text.contains("\"type\": \"OR2\""));
    }

    #[test]
    fn topo_order_respects_dependencies() {
        let mut d = NetlistDesc::default();
        d.input("X", "x1", "x0")
            .gate("late", GateType::Or2, &["mid", "x0"], "out")
            .gate("early", GateType::And2, &["x1", "x0"], "mid")
            .output("O", "out", "mid");
        let n = Netlist::assemble(&d).unwrap();
        assert_eq!(n.topo_order(), Some(vec![GateId(1), GateId(0)]));
    }
}
