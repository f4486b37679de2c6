// SPDX-License-Identifier: Apache-2.0

//! Indication class of a three-input dual-rail block.
//!
//! Every valid codeword is tried with each proper nonempty subset of the
//! inputs: in the valid phase only the subset is applied, in the spacer
//! phase only the subset is withdrawn. Outputs that settle to a codeword
//! (resp. spacer) without the remaining inputs did not wait for them.

use std::fmt;

use crate::gate::DelayConfig;
use crate::netlist::Netlist;
use crate::sim::{Phase, Simulator, Stimulus};

use super::VerifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndicationClass {
    Strong,
    Weak,
    Early,
}

impl fmt::Display for IndicationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndicationClass::Strong => "strong",
            IndicationClass::Weak => "weak",
            IndicationClass::Early => "early",
        })
    }
}

/// Outputs that completed on a subset of the inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicationWitness {
    pub phase: Phase,
    /// Input values, one per input port in declaration order.
    pub vector: [bool; 3],
    /// Ports applied (valid phase) or withdrawn (spacer phase).
    pub inputs: Vec<String>,
    pub completed: Vec<String>,
    pub all_outputs: bool,
}

impl fmt::Display for IndicationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self.vector.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let verb = match self.phase {
            Phase::Valid => "apply",
            Phase::Rtz => "withdraw",
        };
        write!(
            f,
            "{} {} only ({bits}): {} {}",
            verb,
            self.inputs.join("+"),
            self.completed.join("+"),
            match self.phase {
                Phase::Valid => "valid",
                Phase::Rtz => "spacer",
            }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicationVerdict {
    pub class: IndicationClass,
    pub early_set: bool,
    pub early_reset: bool,
    pub witnesses: Vec<IndicationWitness>,
}

impl IndicationVerdict {
    /// First witness in which every output completed, if any.
    pub fn early_witness(&self) -> Option<&IndicationWitness> {
        self.witnesses.iter().find(|w| w.all_outputs)
    }
}

pub fn classify_indication(netlist: &Netlist, delays: &DelayConfig) -> Result<IndicationVerdict, VerifyError> {
    let inputs = netlist.input_ports();
    if inputs.len() != 3 {
        return Err(VerifyError::Arity {
            expected: 3,
            found: inputs.len(),
        });
    }
    let outputs = netlist.output_ports();
    let drive = |ports: &[usize], vector: [bool; 3], on: bool| -> Vec<Stimulus> {
        ports
            .iter()
            .map(|&p| Stimulus {
                time: crate::time::Ps::ZERO,
                net: if vector[p] { inputs[p].rail1 } else { inputs[p].rail0 },
                value: on,
            })
            .collect()
    };
    let all = [0, 1, 2];
    let subsets: [&[usize]; 6] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]];

    let mut witnesses = Vec::new();
    for code in 0..8u8 {
        let vector = [code >> 2 & 1 == 1, code >> 1 & 1 == 1, code & 1 == 1];
        for subset in subsets {
            for phase in [Phase::Valid, Phase::Rtz] {
                let mut sim = Simulator::new(netlist, delays);
                match phase {
                    Phase::Valid => sim.schedule(&drive(subset, vector, true))?,
                    Phase::Rtz => {
                        sim.schedule(&drive(&all, vector, true))?;
                        sim.run_until_quiescent()?;
                        let mut off = drive(subset, vector, false);
                        for s in &mut off {
                            s.time = sim.now();
                        }
                        sim.schedule(&off)?;
                    }
                }
                sim.run_until_quiescent()?;
                let completed: Vec<String> = outputs
                    .iter()
                    .filter(|o| {
                        let (r1, r0) = (sim.value(o.rail1), sim.value(o.rail0));
                        match phase {
                            Phase::Valid => r1 != r0,
                            Phase::Rtz => !r1 && !r0,
                        }
                    })
                    .map(|o| o.name.clone())
                    .collect();
                if !completed.is_empty() {
                    witnesses.push(IndicationWitness {
                        phase,
                        vector,
                        inputs: subset.iter().map(|&p| inputs[p].name.clone()).collect(),
                        all_outputs: completed.len() == outputs.len(),
                        completed,
                    });
                }
            }
        }
    }
    let early = |p: Phase| witnesses.iter().any(|w| w.phase == p && w.all_outputs);
    let (early_set, early_reset) = (early(Phase::Valid), early(Phase::Rtz));
    let class = if early_set || early_reset {
        IndicationClass::Early
    } else if !witnesses.is_empty() {
        IndicationClass::Weak
    } else {
        IndicationClass::Strong
    };
    Ok(IndicationVerdict {
        class,
        early_set,
        early_reset,
        witnesses,
    })
}
