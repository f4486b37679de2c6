// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use dualrail::adder::{
    build_dims_fa, build_early_output_fa, build_rca, carry_chain_length, AdderKind, RcaDescriptor,
};
use dualrail::gate::{DelayConfig, GateType};
use dualrail::netlist::Netlist;
use dualrail::sim::{run_handshake_cycle, CycleReport, Trace, VectorSource};
use dualrail::time::Ps;
use dualrail::timing::{builtin_rows, generate_table, GOLDEN_TABLE};
use dualrail::verify::{
    check_disjoint_cover, check_relative_timing, classify_indication, cover_products, critical_path_report,
    detect_orphans, rt_threshold, static_rt_slack, worst_rt_margin, IndicationClass, OrphanClass, SkewScenario,
};

const RANDOM_SEED: u64 = 2024;
const RANDOM_COUNT: usize = 1000;
const FUNCTIONAL_BUDGET: Duration = Duration::from_secs(10);
const TABLE_BUDGET: Duration = Duration::from_secs(1);
const TABLE_TOLERANCE_NS: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// One handshake per vector, keeping the traces.
fn run_all(netlist: &Netlist, source: &VectorSource) -> Runs {
    let d = DelayConfig::default();
    let width = RcaDescriptor::from_netlist(netlist).unwrap().width;
    source
        .vectors(width)
        .unwrap()
        .par_iter()
        .map(|v| run_handshake_cycle(netlist, &d, v.a, v.b, v.cin).unwrap())
        .collect()
}

type Runs = Vec<(CycleReport, Trace)>;

struct FunctionalRuns {
    /// (kind, width, runs)
    runs: Vec<(AdderKind, usize, Runs)>,
    elapsed: Duration,
}

fn functional_runs() -> FunctionalRuns {
    let start = Instant::now();
    let mut runs = Vec::new();
    for kind in [AdderKind::EarlyOutput, AdderKind::DimsStrong] {
        for n in 1..=4 {
            runs.push((kind, n, run_all(&build_rca(kind, n).unwrap(), &VectorSource::Exhaustive)));
        }
        let random = VectorSource::Random {
            count: RANDOM_COUNT,
            seed: RANDOM_SEED,
        };
        runs.push((kind, 32, run_all(&build_rca(kind, 32).unwrap(), &random)));
    }
    FunctionalRuns {
        runs,
        elapsed: start.elapsed(),
    }
}

fn criterion_1(f: &FunctionalRuns) -> Outcome {
    let total: usize = f.runs.iter().map(|(_, _, r)| r.len()).sum();
    let wrong: Vec<String> = f
        .runs
        .iter()
        .flat_map(|(k, n, r)| {
            r.iter()
                .filter(|(c, _)| !c.correct())
                .map(move |(c, _)| format!("{k} n={n} {:x}+{:x}+{}", c.a, c.b, u8::from(c.cin)))
        })
        .collect();
    outcome(
        wrong.is_empty() && f.elapsed <= FUNCTIONAL_BUDGET,
        format!(
            "{}/{} cycles correct in {:.2} s (budget {} s){}",
            total - wrong.len(),
            total,
            f.elapsed.as_secs_f64(),
            FUNCTIONAL_BUDGET.as_secs(),
            wrong.first().map(|w| format!("; first wrong {w}")).unwrap_or_default()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let table = generate_table(&builtin_rows()).unwrap();
    let elapsed = start.elapsed();
    let mut worst = 0.0f64;
    let mut cells = 0;
    for (r, golden) in table.rows.iter().zip(&GOLDEN_TABLE) {
        for (ours, &g) in r.cells.iter().chain(std::iter::once(&r.mean)).zip(golden) {
            worst = worst.max((ours.as_ns_f64() - g as f64 / 10.0).abs());
            cells += 1;
        }
    }
    let rt = table.row("relative-timed").unwrap();
    outcome(
        cells == 60 && worst <= TABLE_TOLERANCE_NS && elapsed <= TABLE_BUDGET,
        format!(
            "{cells} values, max deviation {worst:.3} ns (tolerance {TABLE_TOLERANCE_NS}); relative-timed {:?} mean {}",
            rt.cells.map(|c| c.to_string()),
            rt.mean
        ),
    )
}

fn criterion_3() -> Outcome {
    let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
    let s = static_rt_slack(&rca, &DelayConfig::default()).unwrap();
    outcome(
        s.direct == Ps(250) && s.indirect == Ps(313) && s.slack_ps() == -63,
        format!("direct {} indirect {} slack {}", s.direct, s.indirect, s.slack_ns()),
    )
}

fn criterion_4() -> Outcome {
    let mut seen = BTreeMap::new();
    for n in [4usize, 8, 16, 32] {
        let rca = build_rca(AdderKind::EarlyOutput, n).unwrap();
        let runs = run_all(&rca, &VectorSource::Random { count: 200, seed: RANDOM_SEED });
        let mask = (1u64 << n) - 1;
        let extra = [(0, 0, false), (mask, 1, false), (mask, 0, true), (mask, mask, true)];
        let d = DelayConfig::default();
        let mut reverse: Vec<Ps> = runs.iter().map(|(c, _)| c.reverse).collect();
        reverse.extend(extra.iter().map(|&(a, b, c)| run_handshake_cycle(&rca, &d, a, b, c).unwrap().0.reverse));
        reverse.sort();
        reverse.dedup();
        seen.insert(n, reverse);
    }
    let pass = seen.values().all(|r| r == &[Ps(250)]);
    let detail = seen
        .iter()
        .map(|(n, r)| format!("n={n}: {}", r.iter().map(Ps::to_string).collect::<Vec<_>>().join("/")))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

fn criterion_5() -> Outcome {
    let d = DelayConfig::default();
    let rca = build_rca(AdderKind::EarlyOutput, 32).unwrap();
    let kill = run_handshake_cycle(&rca, &d, 0, 0, false).unwrap().0.forward;
    let ripple = run_handshake_cycle(&rca, &d, 0xFFFF_FFFF, 1, false).unwrap().0.forward;

    let rca4 = build_rca(AdderKind::EarlyOutput, 4).unwrap();
    let mut by_chain: BTreeMap<usize, (Ps, Ps)> = BTreeMap::new();
    for (c, _) in run_all(&rca4, &VectorSource::Exhaustive) {
        let m = carry_chain_length(c.a, c.b, 4);
        let e = by_chain.entry(m).or_insert((c.forward, c.forward));
        e.0 = e.0.min(c.forward);
        e.1 = e.1.max(c.forward);
    }
    let ranges: Vec<&(Ps, Ps)> = by_chain.values().collect();
    let monotone = ranges.windows(2).all(|w| w[0].1 <= w[1].0);

    let kill_ok = kill == Ps(250);
    let ripple_ok = ripple == Ps(2203);
    outcome(
        kill_ok && ripple_ok && monotone,
        format!(
            "kill-all {kill} (want 0.250: {}), a=ffffffff b=1 {ripple} (want 2.203: {}), non-decreasing in chain length over n=4: {} [{}]",
            ok(kill_ok),
            ok(ripple_ok),
            ok(monotone),
            by_chain
                .iter()
                .map(|(m, (lo, hi))| format!("m={m} {lo}..{hi}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn criterion_6() -> Outcome {
    let d = DelayConfig::default();
    let dims = classify_indication(&build_dims_fa(), &d).unwrap();
    let eo = classify_indication(&build_early_output_fa(), &d).unwrap();
    let witness = eo
        .witnesses
        .iter()
        .find(|w| w.inputs == ["A"] && w.all_outputs && w.phase == dualrail::sim::Phase::Rtz);
    outcome(
        dims.class == IndicationClass::Strong
            && dims.witnesses.is_empty()
            && eo.class == IndicationClass::Early
            && eo.early_reset
            && witness.is_some(),
        format!(
            "dims {}, early-output {} (early-reset {}), witness: {}",
            dims.class,
            eo.class,
            eo.early_reset,
            witness.map(|w| w.to_string()).unwrap_or_else(|| "none".into())
        ),
    )
}

fn criterion_7(f: &FunctionalRuns) -> Outcome {
    let d = DelayConfig::default();
    let mut violations = 0;
    let mut post = 0;
    let mut checked = 0;
    for (kind, n, runs) in &f.runs {
        let rca = build_rca(*kind, *n).unwrap();
        let desc = RcaDescriptor::from_netlist(&rca).unwrap();
        for (_, trace) in runs {
            violations += check_relative_timing(trace, &desc).unwrap().len();
            post += detect_orphans(&rca, &d, trace)
                .unwrap()
                .iter()
                .filter(|o| o.classes.contains(&OrphanClass::PostCompletion))
                .count();
            checked += 1;
        }
    }
    let rca = build_rca(AdderKind::EarlyOutput, 2).unwrap();
    let scenario = SkewScenario { stage: 0, skew: Ps(200) };
    let (_, worst) = worst_rt_margin(&rca, &d, scenario, &VectorSource::Exhaustive).unwrap().unwrap();
    let threshold = rt_threshold(&rca, &d, 0, Ps(1000), &VectorSource::Exhaustive).unwrap();
    outcome(
        violations == 0 && post == 0 && worst.margin_ps() == 88 && threshold == Some(Ps(112)),
        format!(
            "{checked} uniform runs: {violations} rt violations, {post} post-completion transitions; skew 0.200 margin {} ns at stage {}; threshold {}",
            dualrail::time::fmt_signed_ns(worst.margin_ps()),
            worst.stage,
            threshold.map(|t| format!("{t} ns")).unwrap_or_else(|| "none".into())
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut all = true;
    for (_, products) in cover_products() {
        all &= check_disjoint_cover(&products).unwrap().disjoint;
    }
    let mutated = check_disjoint_cover(&[vec!["A1", "B1", "CIN1"], vec!["A1", "CIN1"]]).unwrap();
    let w = mutated.witness.clone();
    let witness_ok = w.as_ref().is_some_and(|w| w.a && w.b && w.cin);
    outcome(
        all && !mutated.disjoint && witness_ok,
        format!(
            "four covers disjoint: {}; mutated cover witness: {}",
            all,
            w.map(|w| format!("a={} b={} cin={}", u8::from(w.a), u8::from(w.b), u8::from(w.cin)))
                .unwrap_or_else(|| "none".into())
        ),
    )
}

fn criterion_9(f: &FunctionalRuns) -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for (kind, n, runs) in &f.runs {
        for (c, trace) in runs {
            count += 1;
            if !trace.phase_monotonicity_violations().is_empty() {
                bad.push(format!("{kind} n={n} {:x}+{:x}", c.a, c.b));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} of {count} cycles with a net switching twice in one phase", bad.len()),
    )
}

fn criterion_10(f: &FunctionalRuns) -> Outcome {
    let d = DelayConfig::default();
    let mut rows = Vec::new();
    let mut pass = true;
    for (kind, n, runs) in f.runs.iter().filter(|(_, n, _)| *n <= 4) {
        let cp = critical_path_report(&build_rca(*kind, *n).unwrap(), &d).unwrap();
        let max = runs.iter().map(|(c, _)| c.forward).max().unwrap();
        pass &= cp.delay == max;
        rows.push(format!("{kind} n={n} {}/{}", cp.delay, max));
    }
    let eo = critical_path_report(&build_rca(AdderKind::EarlyOutput, 32).unwrap(), &d).unwrap();
    let recurring_ok = eo.recurring == BTreeMap::from([(GateType::Ao21, 1)]);
    pass &= recurring_ok;
    outcome(
        pass,
        format!(
            "static/dynamic {}; early-output recurring {:?}",
            rows.join(", "),
            eo.recurring.keys().map(|k| k.to_string()).collect::<Vec<_>>()
        ),
    )
}

#[test]
fn acceptance() {
    let functional = functional_runs();
    let results = [
        ("1 functional correctness", criterion_1(&functional)),
        ("2 cycle-time table", criterion_2()),
        ("3 static slack", criterion_3()),
        ("4 constant reverse latency", criterion_4()),
        ("5 data-dependent forward latency", criterion_5()),
        ("6 indication classes", criterion_6()),
        ("7 relative timing and orphans", criterion_7(&functional)),
        ("8 disjoint covers", criterion_8()),
        ("9 hazard freedom", criterion_9(&functional)),
        ("10 static/dynamic agreement", criterion_10(&functional)),
    ];
    let mut failed = Vec::new();
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
