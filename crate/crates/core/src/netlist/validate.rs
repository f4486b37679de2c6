// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;
use std::fmt;

use super::{NetId, NetKind, Netlist};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Gates that lie on (or between) feedback loops.
    Cycle { gates: Vec<String> },
    Undriven { net: String },
    Arity {
        gate: String,
        expected: usize,
        got: usize,
    },
    PortPairing { port: String, reason: String },
    UnreachableFromInputs { net: String },
    ReachesNoOutput { net: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { gates } => write!(f, "combinational cycle through {}", gates.join(", ")),
            Violation::Undriven { net } => write!(f, "net `{net}` has no driver"),
            Violation::Arity { gate, expected, got } => {
                write!(f, "gate `{gate}` expects {expected} inputs, has {got}")
            }
            Violation::PortPairing { port, reason } => write!(f, "port `{port}`: {reason}"),
            Violation::UnreachableFromInputs { net } => {
                write!(f, "net `{net}` is not reachable from any primary input")
            }
            Violation::ReachesNoOutput { net } => {
                write!(f, "net `{net}` reaches no primary output or observed net")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Netlist {
    /// Checks acyclicity, drivers, arity, port pairing and reachability.
    /// Violations are collected, never raised.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        if self.topo_order().is_none() {
            violations.push(Violation::Cycle {
                gates: self.cyclic_gates(),
            });
        }

        for net in &self.nets {
            if net.kind != NetKind::PrimaryInput && net.driver.is_none() {
                violations.push(Violation::Undriven {
                    net: net.name.clone(),
                });
            }
        }

        for g in &self.gates {
            if g.inputs.len() != g.kind.arity() {
                violations.push(Violation::Arity {
                    gate: g.name.clone(),
                    expected: g.kind.arity(),
                    got: g.inputs.len(),
                });
            }
        }

        let mut seen_rails: HashSet<NetId> = HashSet::new();
        for port in self.inputs.iter().chain(&self.outputs) {
            if port.rail1 == port.rail0 {
                violations.push(Violation::PortPairing {
                    port: port.name.clone(),
                    reason: "rail1 and rail0 are the same net".into(),
                });
                continue;
            }
            for rail in [port.rail1, port.rail0] {
                if !seen_rails.insert(rail) {
                    violations.push(Violation::PortPairing {
                        port: port.name.clone(),
                        reason: format!("rail `{}` already belongs to another port", self.net(rail).name),
                    });
                }
            }
        }

        let forward = self.reach_forward();
        let backward = self.reach_backward();
        for (i, net) in self.nets.iter().enumerate() {
            if !forward[i] {
                violations.push(Violation::UnreachableFromInputs {
                    net: net.name.clone(),
                });
            }
            if !backward[i] {
                violations.push(Violation::ReachesNoOutput {
                    net: net.name.clone(),
                });
            }
        }

        ValidationReport { violations }
    }

    fn reach_forward(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nets.len()];
        let mut stack: Vec<NetId> = self
            .inputs
            .iter()
            .flat_map(|p| [p.rail1, p.rail0])
            .collect();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            for pin in &self.nets[n.index()].fanout {
                stack.push(self.gates[pin.gate.index()].output);
            }
        }
        seen
    }

    fn reach_backward(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nets.len()];
        let mut stack: Vec<NetId> = self
            .outputs
            .iter()
            .flat_map(|p| [p.rail1, p.rail0])
            .chain(
                self.nets
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| n.observe)
                    .map(|(i, _)| NetId(i as u32)),
            )
            .collect();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            if let Some(g) = self.nets[n.index()].driver {
                stack.extend(self.gates[g.index()].inputs.iter().copied());
            }
        }
        seen
    }

    /// Peels acyclic gates from both ends; what remains sits on or between
    /// loops.
    fn cyclic_gates(&self) -> Vec<String> {
        let n = self.gates.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for (i, g) in self.gates.iter().enumerate() {
                if !alive[i] {
                    continue;
                }
                let has_pred = g.inputs.iter().any(|net| {
                    self.nets[net.index()]
                        .driver
                        .is_some_and(|d| alive[d.index()])
                });
                let has_succ = self.nets[g.output.index()]
                    .fanout
                    .iter()
                    .any(|p| alive[p.gate.index()]);
                if !has_pred || !has_succ {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.gates
            .iter()
            .zip(alive)
            .filter(|(_, a)| *a)
            .map(|(g, _)| g.name.clone())
            .collect()
    }
}
