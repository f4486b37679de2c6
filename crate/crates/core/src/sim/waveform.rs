// SPDX-License-Identifier: Apache-2.0

//! Value Change Dump export at 1 ps resolution.

use std::collections::HashMap;
use std::io;

use vcd::{Command, IdCode, TimescaleUnit, Value};

use crate::netlist::Netlist;
use crate::time::Ps;

use super::Trace;

/// Idle time inserted between concatenated cycles.
const GAP: Ps = Ps(1000);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcdChange {
    pub time: u64,
    pub net: String,
    pub value: bool,
}

/// Writes `traces` back to back, one scalar wire per net in a `top` scope.
/// Each trace starts from all-zero, so cycle `i + 1` begins 1 ns after the
/// last event of cycle `i`.
pub fn write_vcd<W: io::Write>(w: W, netlist: &Netlist, traces: &[Trace]) -> io::Result<()> {
    let mut out = vcd::Writer::new(w);
    out.timescale(1, TimescaleUnit::PS)?;
    out.add_module("top")?;
    let ids: Vec<IdCode> = netlist
        .nets()
        .iter()
        .map(|n| out.add_wire(1, &n.name))
        .collect::<io::Result<_>>()?;
    out.upscope()?;
    out.enddefinitions()?;
    out.timestamp(0)?;
    for &id in &ids {
        out.change_scalar(id, Value::V0)?;
    }
    let mut offset = Ps::ZERO;
    for trace in traces {
        let mut last: Option<Ps> = None;
        for e in &trace.events {
            let t = offset + e.time;
            if last != Some(t) {
                out.timestamp(t.0)?;
                last = Some(t);
            }
            out.change_scalar(ids[e.net.index()], if e.value { Value::V1 } else { Value::V0 })?;
        }
        offset = offset + trace.end_time() + GAP;
    }
    out.flush()
}

/// Reads scalar changes back, named by their wire reference. The initial
/// dump at time 0 is included.
pub fn read_vcd<R: io::BufRead>(r: R) -> io::Result<Vec<VcdChange>> {
    let mut names: HashMap<IdCode, String> = HashMap::new();
    let mut now = 0u64;
    let mut out = Vec::new();
    for cmd in vcd::Parser::new(r) {
        match cmd? {
            Command::VarDef(_, _, code, name, _) => {
                names.insert(code, name);
            }
            Command::Timestamp(t) => now = t,
            Command::ChangeScalar(code, v) => {
                let net = names
                    .get(&code)
                    .cloned()
                    .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, format!("undeclared id {code}")))?;
                let value = match v {
                    Value::V0 => false,
                    Value::V1 => true,
                    other => {
                        return Err(io::Error::new(
                            io::ErrorKind::InvalidData,
                            format!("non-binary value {other} for {net}"),
                        ))
                    }
                };
                out.push(VcdChange { time: now, net, value });
            }
            _ => {}
        }
    }
    Ok(out)
}
