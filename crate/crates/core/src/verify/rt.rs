// SPDX-License-Identifier: Apache-2.0

//! Carry-in versus sum reset ordering in the spacer phase.

use rayon::prelude::*;

use crate::adder::RcaDescriptor;
use crate::gate::DelayConfig;
use crate::netlist::{DualRailPort, Netlist};
use crate::sim::{Handshake, HandshakeOptions, Trace, Vector, VectorSource};
use crate::time::Ps;

use super::VerifyError;

/// How long the primary carry-in is held after the late operands leave.
const CIN_HOLD: Ps = Ps(1000);

/// Reset ordering of one stage `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RtMargin {
    pub stage: usize,
    /// Last fall on the stage's carry-in rails.
    pub carry_fall: Ps,
    /// Last fall on the stage's sum rails.
    pub sum_fall: Ps,
}

impl RtMargin {
    /// `carry_fall - sum_fall` in ps; positive means the carry reset late.
    pub fn margin_ps(&self) -> i64 {
        self.carry_fall.0 as i64 - self.sum_fall.0 as i64
    }
}

/// A stage whose carry-in reset strictly after its sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RtViolation {
    pub stage: usize,
    pub carry_fall: Ps,
    pub sum_fall: Ps,
    pub margin: Ps,
}

fn last_fall(trace: &Trace, from: usize, port: &DualRailPort) -> Option<Ps> {
    trace.events[from..]
        .iter()
        .filter(|e| !e.value && (e.net == port.rail1 || e.net == port.rail0))
        .map(|e| e.time)
        .max()
}

/// Reset ordering for every stage whose carry-in and sum both fall in the
/// trace's spacer phase.
pub fn rt_margins(trace: &Trace, desc: &RcaDescriptor) -> Result<Vec<RtMargin>, VerifyError> {
    let m = trace.markers.ok_or(VerifyError::IncompletePhase)?;
    Ok((1..desc.width)
        .filter_map(|k| {
            let carry_fall = last_fall(trace, m.rtz_first_event, desc.carry_in(k))?;
            let sum_fall = last_fall(trace, m.rtz_first_event, &desc.sum[k])?;
            Some(RtMargin {
                stage: k,
                carry_fall,
                sum_fall,
            })
        })
        .collect())
}

pub fn check_relative_timing(trace: &Trace, desc: &RcaDescriptor) -> Result<Vec<RtViolation>, VerifyError> {
    Ok(rt_margins(trace, desc)?
        .into_iter()
        .filter(|m| m.margin_ps() > 0)
        .map(|m| RtViolation {
            stage: m.stage,
            carry_fall: m.carry_fall,
            sum_fall: m.sum_fall,
            margin: m.carry_fall - m.sum_fall,
        })
        .collect())
}

/// Late withdrawal of one stage's operand rails.
///
/// The operand rails of `stage` leave `skew` after every other operand
/// rail. The primary carry-in is held until well after that, the way an
/// early-reset adder can drop all outputs while some inputs are still
/// valid; withdrawing it together with the late operands would reset stage
/// 0's carry through the carry-in term alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkewScenario {
    pub stage: usize,
    pub skew: Ps,
}

impl SkewScenario {
    pub fn options(&self, desc: &RcaDescriptor) -> HandshakeOptions {
        let mut withdraw_skew = vec![
            (desc.a[self.stage].name.clone(), self.skew),
            (desc.b[self.stage].name.clone(), self.skew),
        ];
        withdraw_skew.push((desc.cin.name.clone(), self.skew + CIN_HOLD));
        HandshakeOptions {
            withdraw_skew,
            ..Default::default()
        }
    }
}

/// Largest reset-order margin over `vectors`, with the vector producing it.
/// `None` when no stage has both a carry and a sum reset.
pub fn worst_rt_margin(
    netlist: &Netlist,
    delays: &DelayConfig,
    scenario: SkewScenario,
    vectors: &VectorSource,
) -> Result<Option<(Vector, RtMargin)>, VerifyError> {
    let desc = RcaDescriptor::from_netlist(netlist).map_err(|e| VerifyError::Structure(e.to_string()))?;
    if scenario.stage >= desc.width {
        return Err(VerifyError::Structure(format!(
            "skew stage {} is outside a {}-bit adder",
            scenario.stage, desc.width
        )));
    }
    let hs = Handshake::new(netlist, delays, scenario.options(&desc))?;
    let per_vector = vectors
        .vectors(desc.width)?
        .par_iter()
        .map(|&v| -> Result<Vec<(Vector, RtMargin)>, VerifyError> {
            let (_, trace) = hs.run(v.a, v.b, v.cin)?;
            Ok(rt_margins(&trace, &desc)?.into_iter().map(|m| (v, m)).collect())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst: Option<(Vector, RtMargin)> = None;
    for (v, m) in per_vector.into_iter().flatten() {
        if worst.is_none_or(|(_, w)| m.margin_ps() > w.margin_ps()) {
            worst = Some((v, m));
        }
    }
    Ok(worst)
}

/// Bisects for the largest skew of `stage` (in whole ps, up to `limit`)
/// that causes no violation for any of `vectors`. Returns `None` when even
/// `limit` is safe.
pub fn rt_threshold(
    netlist: &Netlist,
    delays: &DelayConfig,
    stage: usize,
    limit: Ps,
    vectors: &VectorSource,
) -> Result<Option<Ps>, VerifyError> {
    let violates = |skew: Ps| -> Result<bool, VerifyError> {
        Ok(worst_rt_margin(netlist, delays, SkewScenario { stage, skew }, vectors)?
            .is_some_and(|(_, m)| m.margin_ps() > 0))
    };
    if !violates(limit)? {
        return Ok(None);
    }
    if violates(Ps::ZERO)? {
        return Ok(Some(Ps::ZERO));
    }
    let (mut lo, mut hi) = (0u64, limit.0);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if violates(Ps(mid))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(Ps(lo)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{build_rca, AdderKind};
    use crate::sim::run_handshake_cycle;

    #[test]
    fn uniform_reset_keeps_order() {
        let d = DelayConfig::default();
        for kind in [AdderKind::EarlyOutput, AdderKind::DimsStrong] {
            let rca = build_rca(kind, 2).unwrap();
            let desc = RcaDescriptor::from_netlist(&rca).unwrap();
            for v in VectorSource::Exhaustive.vectors(2).unwrap() {
                let (_, t) = run_handshake_cycle(&rca, &d, v.a, v.b, v.cin).unwrap();
                assert!(check_relative_timing(&t, &desc).unwrap().is_empty(), "{kind} {v}");
            }
        }
        // Both stages generate.
        let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
        let desc = RcaDescriptor::from_netlist(&rca).unwrap();
        let (_, t) = run_handshake_cycle(&rca, &d, 3, 3, false).unwrap();
        let m = rt_margins(&t, &desc).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m[0].margin_ps() < 0);
    }

    #[test]
    fn skewed_stage_zero_violates_by_88ps() {
        let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
        let d = DelayConfig::default();
        let scenario = SkewScenario { stage: 0, skew: Ps(200) };
        let (v, m) = worst_rt_margin(&rca, &d, scenario, &VectorSource::Exhaustive).unwrap().unwrap();
        assert_eq!(m.margin_ps(), 88);
        assert_eq!(m.stage, 1);
        assert_ne!(v.a & 1, v.b & 1, "stage 0 propagates");
        let desc = RcaDescriptor::from_netlist(&rca).unwrap();
        let hs = Handshake::new(&rca, &d, scenario.options(&desc)).unwrap();
        let (_, t) = hs.run(v.a, v.b, v.cin).unwrap();
        let viol = check_relative_timing(&t, &desc).unwrap();
        assert_eq!(viol.len(), 1);
        assert_eq!(viol[0].margin, Ps(88));
        assert_eq!(viol[0].carry_fall - t.markers.unwrap().rtz_start, Ps(338));
    }

    #[test]
    fn threshold_is_112ps() {
        let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
        let d = DelayConfig::default();
        let t = rt_threshold(&rca, &d, 0, Ps(1000), &VectorSource::Exhaustive).unwrap();
        assert_eq!(t, Some(Ps(112)));
    }

    #[test]
    fn incomplete_trace_is_rejected() {
        let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
        let desc = RcaDescriptor::from_netlist(&rca).unwrap();
        assert_eq!(
            check_relative_timing(&Trace::default(), &desc),
            Err(VerifyError::IncompletePhase)
        );
    }
}
