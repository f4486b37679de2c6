// SPDX-License-Identifier: Apache-2.0

use crate::gate::GateType;
use crate::netlist::{DualRailPort, GateId, NetId, Netlist};

use super::{AdderError, AdderKind};

/// Port and carry layout of a ripple-carry adder netlist, recovered from its
/// rail names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcaDescriptor {
    pub kind: AdderKind,
    pub width: usize,
    pub a: Vec<DualRailPort>,
    pub b: Vec<DualRailPort>,
    pub cin: DualRailPort,
    pub sum: Vec<DualRailPort>,
    /// Carry out of each stage; the last one is the primary `COUT`.
    pub carries: Vec<DualRailPort>,
}

impl RcaDescriptor {
    pub fn from_netlist(netlist: &Netlist) -> Result<RcaDescriptor, AdderError> {
        let census = netlist.census();
        let kind = if census.count(GateType::Ao22) > 0 {
            AdderKind::EarlyOutput
        } else if census.count(GateType::Or4) > 0 {
            AdderKind::DimsStrong
        } else {
            return Err(AdderError::NotAnAdder("no AO22 or OR4 gates".into()));
        };
        let missing = |what: &str| AdderError::NotAnAdder(format!("missing {what}"));
        let input = |name: &str| netlist.input_port(name).cloned().ok_or_else(|| missing(name));
        let output = |name: &str| netlist.output_port(name).cloned().ok_or_else(|| missing(name));

        if netlist.input_port("A").is_some() {
            let cout = output("COUT")?;
            return Ok(RcaDescriptor {
                kind,
                width: 1,
                a: vec![input("A")?],
                b: vec![input("B")?],
                cin: input("CIN")?,
                sum: vec![output("SUM")?],
                carries: vec![cout],
            });
        }

        let width = (0..).take_while(|k| netlist.input_port(&format!("A{k}")).is_some()).count();
        if width < 2 {
            return Err(missing("operand ports A/A0"));
        }
        let mut d = RcaDescriptor {
            kind,
            width,
            a: Vec::with_capacity(width),
            b: Vec::with_capacity(width),
            cin: input("CIN")?,
            sum: Vec::with_capacity(width),
            carries: Vec::with_capacity(width),
        };
        for k in 0..width {
            d.a.push(input(&format!("A{k}"))?);
            d.b.push(input(&format!("B{k}"))?);
            d.sum.push(output(&format!("SUM{k}"))?);
            let rail = |r: &str| netlist.net_id(&format!("COUT{k}{r}")).ok_or_else(|| missing(&format!("COUT{k}{r}")));
            d.carries.push(DualRailPort {
                name: format!("COUT{k}"),
                rail1: rail("1")?,
                rail0: rail("0")?,
            });
        }
        let cout = output("COUT")?;
        let last = &d.carries[width - 1];
        if (cout.rail1, cout.rail0) != (last.rail1, last.rail0) {
            return Err(AdderError::NotAnAdder("COUT is not the last stage's carry".into()));
        }
        d.carries[width - 1].name = "COUT".into();
        Ok(d)
    }

    /// Carry into stage `k`.
    pub fn carry_in(&self, k: usize) -> &DualRailPort {
        if k == 0 {
            &self.cin
        } else {
            &self.carries[k - 1]
        }
    }

    /// Operand rails of stage `k`, plus the primary carry-in when `k = 0`.
    pub fn stage_operand_rails(&self, k: usize) -> Vec<NetId> {
        let mut rails = vec![self.a[k].rail1, self.a[k].rail0, self.b[k].rail1, self.b[k].rail0];
        if k == 0 {
            rails.extend([self.cin.rail1, self.cin.rail0]);
        }
        rails
    }

    /// Which stage each gate belongs to: the highest stage whose operand
    /// rails reach it without crossing another stage's carry.
    pub fn gate_stages(&self, netlist: &Netlist) -> Vec<usize> {
        let order = netlist.topo_order().expect("adder netlists are acyclic");
        let mut net_stage: Vec<Option<usize>> = vec![None; netlist.nets().len()];
        for k in 0..self.width {
            for rail in [self.a[k].rail1, self.a[k].rail0, self.b[k].rail1, self.b[k].rail0] {
                net_stage[rail.index()] = Some(k);
            }
        }
        net_stage[self.cin.rail1.index()] = Some(0);
        net_stage[self.cin.rail0.index()] = Some(0);
        let mut stages = vec![0; netlist.gates().len()];
        for g in order {
            let gate = netlist.gate(g);
            let s = gate
                .inputs
                .iter()
                .filter_map(|n| net_stage[n.index()])
                .max()
                .unwrap_or(0);
            stages[g.index()] = s;
            net_stage[gate.output.index()] = Some(s);
        }
        stages
    }

    /// Gates assigned to stage `k` by [`RcaDescriptor::gate_stages`].
    pub fn stage_gates(&self, netlist: &Netlist, k: usize) -> Vec<GateId> {
        self.gate_stages(netlist)
            .into_iter()
            .enumerate()
            .filter(|&(_, s)| s == k)
            .map(|(i, _)| GateId(i as u32))
            .collect()
    }
}

/// Carry-chain length of an operand pair: the largest number of AO21 carry
/// gates that the carry entering any stage `k >= 1` has passed through,
/// counted from the stage that generated or killed it (or from the primary
/// carry-in). The carry out of the last stage is not counted since the last
/// sum, not `COUT`, bounds completion. A 1-bit adder has length 0.
pub fn carry_chain_length(a: u64, b: u64, width: usize) -> usize {
    let mut best = 0;
    let mut run = 0;
    for i in 0..width.saturating_sub(1) {
        let propagate = (a >> i) & 1 != (b >> i) & 1;
        run = if propagate { run + 1 } else { 1 };
        best = best.max(run);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{attach_completion_detector, build_rca};

    #[test]
    fn descriptor_recovers_layout() {
        for kind in [AdderKind::EarlyOutput, AdderKind::DimsStrong] {
            for n in [1, 2, 5] {
                let rca = build_rca(kind, n).unwrap();
                let d = RcaDescriptor::from_netlist(&rca).unwrap();
                assert_eq!((d.kind, d.width), (kind, n));
                assert_eq!(d.carries.len(), n);
                assert_eq!(d.carries[n - 1].name, "COUT");
                let with_cd = attach_completion_detector(&rca);
                assert_eq!(RcaDescriptor::from_netlist(&with_cd).unwrap().width, n);
            }
        }
    }

    #[test]
    fn every_stage_owns_one_full_adder() {
        for (kind, per_stage) in [(AdderKind::EarlyOutput, 11), (AdderKind::DimsStrong, 16)] {
            let rca = build_rca(kind, 4).unwrap();
            let d = RcaDescriptor::from_netlist(&rca).unwrap();
            for k in 0..4 {
                let gates = d.stage_gates(&rca, k);
                assert_eq!(gates.len(), per_stage);
                let prefix = format!("fa{k}_");
                assert!(gates.iter().all(|&g| rca.gate(g).name.starts_with(&prefix)));
            }
        }
    }

    #[test]
    fn chain_length_examples() {
        assert_eq!(carry_chain_length(5, 2, 1), 0);
        assert_eq!(carry_chain_length(0, 0, 8), 1);
        assert_eq!(carry_chain_length(0xFF, 0, 8), 7);
        assert_eq!(carry_chain_length(0b1011, 0b0000, 4), 2);
        assert_eq!(carry_chain_length(0b0110, 0b1001, 4), 3);
    }
}
