// SPDX-License-Identifier: Apache-2.0

//! Primitive gate vocabulary, evaluation semantics and propagation delays.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::{Ps, TimeParseError};

/// Standard cells available to netlists. `Celement2` is a state-holding
/// primitive; everything else is combinational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateType {
    #[serde(rename = "AND2")]
    And2,
    #[serde(rename = "OR2")]
    Or2,
    #[serde(rename = "OR3")]
    Or3,
    #[serde(rename = "OR4")]
    Or4,
    /// `Z = P·Q + R`
    #[serde(rename = "AO21")]
    Ao21,
    /// `Y = A·B + C·D`
    #[serde(rename = "AO22")]
    Ao22,
    /// `Y = A·B + C·D + E·F`
    #[serde(rename = "AO222")]
    Ao222,
    /// Two-input Muller C-element.
    #[serde(rename = "CELEMENT2")]
    Celement2,
}

impl GateType {
    pub const ALL: [GateType; 8] = [
        GateType::And2,
        GateType::Or2,
        GateType::Or3,
        GateType::Or4,
        GateType::Ao21,
        GateType::Ao22,
        GateType::Ao222,
        GateType::Celement2,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateType::And2 | GateType::Or2 | GateType::Celement2 => 2,
            GateType::Or3 | GateType::Ao21 => 3,
            GateType::Or4 | GateType::Ao22 => 4,
            GateType::Ao222 => 6,
        }
    }

    pub fn is_stateful(self) -> bool {
        self == GateType::Celement2
    }

    pub fn name(self) -> &'static str {
        match self {
            GateType::And2 => "AND2",
            GateType::Or2 => "OR2",
            GateType::Or3 => "OR3",
            GateType::Or4 => "OR4",
            GateType::Ao21 => "AO21",
            GateType::Ao22 => "AO22",
            GateType::Ao222 => "AO222",
            GateType::Celement2 => "CELEMENT2",
        }
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateType {
    type Err = GateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateType::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| GateError::UnknownGate(s.to_string()))
    }
}

/// Held output of a gate. Only a C-element reads it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateState {
    pub held: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GateError {
    #[error("{gate} takes {expected} inputs, got {got}")]
    Arity {
        gate: GateType,
        expected: usize,
        got: usize,
    },
    #[error("unknown gate type `{0}`")]
    UnknownGate(String),
}

/// Evaluates one gate. Combinational gates ignore and return `state`
/// unchanged; a C-element switches only when both inputs agree.
pub fn eval_gate(
    gate: GateType,
    inputs: &[bool],
    state: GateState,
) -> Result<(bool, GateState), GateError> {
    if inputs.len() != gate.arity() {
        return Err(GateError::Arity {
            gate,
            expected: gate.arity(),
            got: inputs.len(),
        });
    }
    let i = inputs;
    let out = match gate {
        GateType::And2 => i[0] && i[1],
        GateType::Or2 | GateType::Or3 | GateType::Or4 => i.iter().any(|&b| b),
        GateType::Ao21 => (i[0] && i[1]) || i[2],
        GateType::Ao22 => (i[0] && i[1]) || (i[2] && i[3]),
        GateType::Ao222 => (i[0] && i[1]) || (i[2] && i[3]) || (i[4] && i[5]),
        GateType::Celement2 => {
            let out = match (i[0], i[1]) {
                (true, true) => true,
                (false, false) => false,
                _ => state.held,
            };
            return Ok((out, GateState { held: out }));
        }
    };
    Ok((out, state))
}

#[derive(Debug, Error)]
pub enum DelayConfigError {
    #[error("line {line}: expected `GATE=ns`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: {source}")]
    UnknownGate { line: usize, source: GateError },
    #[error("line {line}: {source}")]
    Value { line: usize, source: TimeParseError },
    #[error("line {line}: delay for {gate} must be positive")]
    NonPositive { line: usize, gate: GateType },
}

/// Per-gate-type propagation delay, identical for rising and falling edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayConfig {
    delays: BTreeMap<GateType, Ps>,
}

impl Default for DelayConfig {
    /// AO22 and CELEMENT2 are split so that 2·AO22 + CELEMENT2 = 0.250 ns and
    /// AO21 = 0.063 ns.
    fn default() -> Self {
        let delays = [
            (GateType::And2, 50),
            (GateType::Or2, 50),
            (GateType::Or3, 60),
            (GateType::Or4, 70),
            (GateType::Ao21, 63),
            (GateType::Ao22, 75),
            (GateType::Ao222, 90),
            (GateType::Celement2, 100),
        ]
        .into_iter()
        .map(|(g, ps)| (g, Ps(ps)))
        .collect();
        DelayConfig { delays }
    }
}

impl DelayConfig {
    pub fn get(&self, gate: GateType) -> Ps {
        self.delays[&gate]
    }

    /// Returns a copy with one entry replaced. Zero is accepted here for
    /// what-if static analysis; files are stricter.
    pub fn with(mut self, gate: GateType, delay: Ps) -> Self {
        self.delays.insert(gate, delay);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (GateType, Ps)> + '_ {
        self.delays.iter().map(|(g, d)| (*g, *d))
    }

    /// Renders the config in the `GATE=ns` file format.
    pub fn to_text(&self) -> String {
        self.iter().map(|(g, d)| format!("{g}={d}\n")).collect()
    }
}

/// Parses `GATE=ns` lines over the default config. Blank lines and `#`
/// comments are ignored.
pub fn load_delay_config(source: &str) -> Result<DelayConfig, DelayConfigError> {
    let mut config = DelayConfig::default();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (key, value) = text.split_once('=').ok_or_else(|| DelayConfigError::Syntax {
            line,
            text: raw.to_string(),
        })?;
        let gate: GateType = key
            .trim()
            .parse()
            .map_err(|source| DelayConfigError::UnknownGate { line, source })?;
        let delay: Ps = value.trim().parse().map_err(|source| match source {
            TimeParseError::Negative(_) => DelayConfigError::NonPositive { line, gate },
            source => DelayConfigError::Value { line, source },
        })?;
        if delay == Ps::ZERO {
            return Err(DelayConfigError::NonPositive { line, gate });
        }
        config.delays.insert(gate, delay);
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(inputs: [bool; 2], held: bool) -> (bool, bool) {
        let (out, st) = eval_gate(GateType::Celement2, &inputs, GateState { held }).unwrap();
        (out, st.held)
    }

    #[test]
    fn celement_examples() {
        assert_eq!(c([true, true], false), (true, true));
        assert_eq!(c([true, false], true), (true, true));
        assert_eq!(c([false, true], false), (false, false));
        assert_eq!(c([false, false], true), (false, false));
    }

    #[test]
    fn complex_gate_examples() {
        let st = GateState::default();
        assert!(eval_gate(GateType::Ao22, &[true, true, false, false], st).unwrap().0);
        assert!(!eval_gate(GateType::Ao21, &[false, false, false], st).unwrap().0);
        assert!(eval_gate(GateType::Ao21, &[false, false, true], st).unwrap().0);
        assert!(!eval_gate(GateType::Ao222, &[true, false, false, true, true, false], st).unwrap().0);
    }

    #[test]
    fn arity_table_and_mismatch() {
        let expect = [2, 2, 3, 4, 3, 4, 6, 2];
        for (g, n) in GateType::ALL.into_iter().zip(expect) {
            assert_eq!(g.arity(), n, "{g}");
        }
        assert_eq!(
            eval_gate(GateType::Ao22, &[true; 3], GateState::default()),
            Err(GateError::Arity { gate: GateType::Ao22, expected: 4, got: 3 })
        );
    }

    #[test]
    fn celement_hysteresis_exhaustive() {
        // Every input sequence of length ≤ 8 over the four 2-input patterns.
        let patterns = [[false, false], [false, true], [true, false], [true, true]];
        for len in 1..=8u32 {
            for code in 0..4usize.pow(len) {
                let mut held = false;
                let mut k = code;
                for _ in 0..len {
                    let p = patterns[k % 4];
                    k /= 4;
                    let (out, st) = eval_gate(GateType::Celement2, &p, GateState { held }).unwrap();
                    if out != held {
                        assert_eq!(p[0], p[1], "changed on mixed inputs");
                        assert_eq!(out, p[0]);
                    }
                    held = st.held;
                }
            }
        }
    }

    #[test]
    fn combinational_gates_are_stateless() {
        for g in GateType::ALL.into_iter().filter(|g| !g.is_stateful()) {
            for bits in 0..(1u32 << g.arity()) {
                let ins: Vec<bool> = (0..g.arity()).map(|i| bits >> i & 1 == 1).collect();
                let a = eval_gate(g, &ins, GateState { held: false }).unwrap();
                let b = eval_gate(g, &ins, GateState { held: true }).unwrap();
                assert_eq!(a.0, b.0);
                assert_eq!(a.1, GateState { held: false });
            }
        }
    }

    #[test]
    fn default_delays_meet_path_sums() {
        let d = DelayConfig::default();
        let direct = d.get(GateType::Ao22) + d.get(GateType::Ao22) + d.get(GateType::Celement2);
        assert_eq!(direct, Ps(250));
        assert_eq!(direct + d.get(GateType::Ao21), Ps(313));
    }

    #[test]
    fn load_overlays_defaults() {
        assert_eq!(load_delay_config("").unwrap(), DelayConfig::default());
        let cfg = load_delay_config("# tweak\nAO21 = 0.080\n").unwrap();
        assert_eq!(cfg.get(GateType::Ao21), Ps(80));
        assert_eq!(cfg.with(GateType::Ao21, Ps(63)), DelayConfig::default());
    }

    #[test]
    fn load_rejects_bad_entries() {
        assert!(matches!(
            load_delay_config("AO22=-1"),
            Err(DelayConfigError::NonPositive { line: 1, gate: GateType::Ao22 })
        ));
        assert!(matches!(load_delay_config("AO22=0"), Err(DelayConfigError::NonPositive { .. })));
        assert!(matches!(load_delay_config("\nXOR2=0.1"), Err(DelayConfigError::UnknownGate { line: 2, .. })));
        assert!(matches!(load_delay_config("AO22"), Err(DelayConfigError::Syntax { .. })));
    }

    #[test]
    fn text_round_trip() {
        let cfg = DelayConfig::default().with(GateType::Or4, Ps(71));
        assert_eq!(load_delay_config(&cfg.to_text()).unwrap(), cfg);
    }
}
