// SPDX-License-Identifier: Apache-2.0

//! OR-per-pair plus C-element tree completion detection.

use crate::gate::GateType;
use crate::netlist::{Netlist, NetlistDesc};

use super::AdderError;

/// Name of the single-rail completion signal.
pub const DONE_NET: &str = "done";

/// Appends the detector for `pairs` to `d`; returns the `done` net name.
/// `done` rises once every pair holds a codeword and falls once every pair is
/// spacer.
fn add_detector(d: &mut NetlistDesc, pairs: &[(String, String)], prefix: &str) -> String {
    let last = pairs.len() == 1;
    let mut level: Vec<String> = pairs
        .iter()
        .enumerate()
        .map(|(i, (r1, r0))| {
            let out = if last { DONE_NET.to_string() } else { format!("{prefix}v{i}") };
            d.gate(format!("{prefix}or{i}"), GateType::Or2, &[r1, r0], &out);
            out
        })
        .collect();
    let mut node = 0;
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let top = level.len() == 2;
        for chunk in level.chunks(2) {
            match chunk {
                [x, y] => {
                    let out = if top { DONE_NET.to_string() } else { format!("{prefix}t{node}") };
                    d.gate(format!("{prefix}c{node}"), GateType::Celement2, &[x, y], &out);
                    node += 1;
                    next.push(out);
                }
                [x] => next.push(x.clone()),
                _ => unreachable!(),
            }
        }
        level = next;
    }
    d.observe.push(DONE_NET.to_string());
    DONE_NET.to_string()
}

/// Standalone detector over `pair_count` input pairs `D{i}` (`d{i}1/d{i}0`).
pub fn build_completion_detector(pair_count: usize) -> Result<Netlist, AdderError> {
    if pair_count == 0 {
        return Err(AdderError::ZeroPairs);
    }
    let mut d = NetlistDesc::default();
    let pairs: Vec<(String, String)> = (0..pair_count)
        .map(|i| (format!("d{i}1"), format!("d{i}0")))
        .collect();
    for (i, (r1, r0)) in pairs.iter().enumerate() {
        d.input(format!("D{i}"), r1, r0);
    }
    add_detector(&mut d, &pairs, "cd_");
    Ok(Netlist::assemble(&d).expect("generated detector is well formed"))
}

/// Copy of `netlist` with a detector watching all of its output ports.
pub fn attach_completion_detector(netlist: &Netlist) -> Netlist {
    let mut d = netlist.to_desc();
    let pairs: Vec<(String, String)> = d
        .output_ports
        .iter()
        .map(|p| (p.rail1.clone(), p.rail0.clone()))
        .collect();
    add_detector(&mut d, &pairs, "cd_");
    Netlist::assemble(&d).expect("detector attaches to a well-formed netlist")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{build_early_output_fa, AdderKind};
    use crate::gate::GateType;

    #[test]
    fn tree_sizes() {
        for (pairs, cs) in [(1, 0), (2, 1), (3, 2), (4, 3), (7, 6)] {
            let n = build_completion_detector(pairs).unwrap();
            let c = n.census();
            assert_eq!(c.count(GateType::Or2), pairs);
            assert_eq!(c.count(GateType::Celement2), cs);
            assert!(n.validate().is_clean());
            assert!(n.net(n.net_id(DONE_NET).unwrap()).observe);
        }
        assert_eq!(build_completion_detector(0).unwrap_err(), AdderError::ZeroPairs);
    }

    #[test]
    fn attached_detector_is_valid() {
        let fa = attach_completion_detector(&build_early_output_fa());
        assert_eq!(fa.gates().len(), 11 + 2 + 1);
        assert!(fa.validate().is_clean());
        let rca = crate::adder::build_rca(AdderKind::DimsStrong, 3).unwrap();
        assert!(attach_completion_detector(&rca).validate().is_clean());
    }
}
