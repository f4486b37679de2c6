// SPDX-License-Identifier: Apache-2.0

//! `dualrail`: build, simulate and check dual-rail ripple-carry adders.
//!
//! Exit status is 0 on success, 1 when a check or oracle fails and 2 for
//! usage and input-parsing errors.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dualrail::adder::{attach_completion_detector, build_rca, AdderKind};
use dualrail::gate::{load_delay_config, DelayConfig};
use dualrail::netlist::Netlist;
use dualrail::sim::{
    parse_vectors, run_vectors, write_batch_csv, write_vcd, CompletionMode, Handshake, HandshakeOptions,
    VectorSource,
};
use dualrail::time::Ps;
use dualrail::timing::{builtin_rows, generate_table, read_dataset};
use dualrail::verify::{run_suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "dualrail", version, about = "Dual-rail asynchronous adder simulator and timing checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an adder netlist as JSON
    Build(BuildArgs),
    /// Run handshake cycles against the addition oracle
    Sim(SimArgs),
    /// Run the static and dynamic check suite
    Verify(VerifyArgs),
    /// Tabulate analytic cycle-time estimates
    Table4(Table4Args),
}

#[derive(Args)]
struct AdderArgs {
    /// Adder style: early-output or dims
    #[arg(long, default_value = "early-output")]
    kind: AdderKind,
    /// Width in bits
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=64))]
    n: Option<u16>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    adder: AdderArgs,
    /// Attach a completion detector driving a `done` net
    #[arg(long)]
    detector: bool,
    /// Output file; stdout if omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Completion {
    Decoder,
    Detector,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false, args = ["vectors", "random", "exhaustive"])]
struct SimArgs {
    #[command(flatten)]
    adder: AdderArgs,
    /// Simulate this netlist file instead of generating one
    #[arg(long, conflicts_with = "n")]
    netlist: Option<PathBuf>,
    /// Vector file: one `a b cin` per line, hex operands
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Number of random vectors
    #[arg(long, requires = "seed")]
    random: Option<usize>,
    #[arg(long, requires = "random")]
    seed: Option<u64>,
    /// Every operand pair and carry-in
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, env = "DUALRAIL_DELAYS")]
    delays: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "decoder")]
    completion: Completion,
    /// Write all cycles as one VCD
    #[arg(long)]
    vcd: Option<PathBuf>,
    /// Write per-vector latencies as CSV
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "early-output")]
    kind: AdderKind,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(1..=64))]
    n: u16,
    /// Withdraw one stage's operands this many ns late
    #[arg(long)]
    skew: Option<Ps>,
    #[arg(long, default_value_t = 0)]
    skew_stage: usize,
    #[arg(long, env = "DUALRAIL_DELAYS")]
    delays: Option<PathBuf>,
    /// Write the check table as CSV
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct Table4Args {
    /// CSV output; stdout if omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Replacement `label,class,latency_ns` dataset
    #[arg(long)]
    latencies: Option<PathBuf>,
}

/// Error with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Sim(a) => sim(a),
        Command::Verify(a) => verify(a),
        Command::Table4(a) => table4(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_delays(path: Option<&Path>) -> Result<DelayConfig, Failure> {
    let Some(path) = path else {
        return Ok(DelayConfig::default());
    };
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading delays {}", path.display()))
        .map_err(usage)?;
    load_delay_config(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(usage)
}

/// Opens `path` for writing, or stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn build(args: BuildArgs) -> Outcome {
    let n = args.adder.n.ok_or_else(|| usage(anyhow!("--n is required")))?;
    let mut netlist = build_rca(args.adder.kind, n.into()).map_err(usage)?;
    if args.detector {
        netlist = attach_completion_detector(&netlist);
    }
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "{}", netlist.to_json())?;
    w.flush()?;
    eprintln!("{} n={}: {}", args.adder.kind, n, netlist.census());
    Ok(ExitCode::SUCCESS)
}

fn sim(args: SimArgs) -> Outcome {
    let delays = load_delays(args.delays.as_deref())?;
    let mut netlist = match (&args.netlist, args.adder.n) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Netlist::from_json(&text)
                .with_context(|| format!("in {}", path.display()))
                .map_err(usage)?
        }
        (None, Some(n)) => build_rca(args.adder.kind, n.into()).map_err(usage)?,
        (None, None) => return Err(usage(anyhow!("either --n or --netlist is required"))),
    };
    let completion = match args.completion {
        Completion::Decoder => CompletionMode::Decoder,
        Completion::Detector => {
            if netlist.net_id(dualrail::adder::DONE_NET).is_none() {
                netlist = attach_completion_detector(&netlist);
            }
            CompletionMode::Detector
        }
    };
    let source = if let Some(path) = &args.vectors {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let list = parse_vectors(&text)
            .with_context(|| format!("in {}", path.display()))
            .map_err(usage)?;
        VectorSource::List(list)
    } else if let (Some(count), Some(seed)) = (args.random, args.seed) {
        VectorSource::Random { count, seed }
    } else {
        VectorSource::Exhaustive
    };
    let options = HandshakeOptions {
        completion,
        ..Default::default()
    };
    let report = run_vectors(&netlist, &delays, &source, &options)?;

    println!("source: {}", report.source);
    println!("width: {}", report.width);
    println!("passed: {}/{}", report.passed(), report.results.len());
    if let (Some(min), Some(max), Some(mean)) = (report.min_forward(), report.max_forward(), report.mean_forward_ns()) {
        println!("forward latency ns: min {min} mean {mean:.3} max {max}");
    }
    if let (Some(min), Some(max)) = (
        report.results.iter().map(|r| r.report.reverse).min(),
        report.results.iter().map(|r| r.report.reverse).max(),
    ) {
        println!("reverse latency ns: min {min} max {max}");
    }
    for r in report.results.iter().filter(|r| !r.correct()) {
        println!(
            "FAIL {}: got sum {:x} cout {}",
            r.vector,
            r.report.sum,
            u8::from(r.report.cout)
        );
    }

    if let Some(path) = &args.report {
        write_batch_csv(output(Some(path))?, &report)?;
    }
    if let Some(path) = &args.vcd {
        let hs = Handshake::new(&netlist, &delays, options)?;
        let traces = report
            .results
            .iter()
            .map(|r| hs.run(r.vector.a, r.vector.b, r.vector.cin).map(|(_, t)| t))
            .collect::<Result<Vec<_>, _>>()?;
        let mut w = output(Some(path))?;
        write_vcd(&mut w, &netlist, &traces)?;
        w.flush()?;
    }
    Ok(if report.all_correct() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify(args: VerifyArgs) -> Outcome {
    let config = SuiteConfig {
        kind: args.kind,
        width: args.n.into(),
        delays: load_delays(args.delays.as_deref())?,
        skew: args.skew,
        skew_stage: args.skew_stage,
    };
    if args.skew.is_some() && config.skew_stage >= config.width {
        return Err(usage(anyhow!(
            "--skew-stage {} is outside a {}-bit adder",
            config.skew_stage,
            config.width
        )));
    }
    let report = run_suite(&config)?;
    print!("{}", report.to_text());
    if let Some(path) = &args.report {
        report.write_csv(output(Some(path))?)?;
    }
    Ok(if report.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn table4(args: Table4Args) -> Outcome {
    let rows = match &args.latencies {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
            read_dataset(file)
                .with_context(|| format!("in {}", path.display()))
                .map_err(usage)?
        }
        None => builtin_rows(),
    };
    let table = generate_table(&rows)?;
    let mut w = output(args.out.as_deref())?;
    table.write_csv(&mut w)?;
    w.flush()?;
    drop(w);

    // Summary goes to stderr when the table itself is on stdout.
    let mut log: Box<dyn Write> = if args.out.is_some() {
        Box::new(io::stdout().lock())
    } else {
        Box::new(io::stderr().lock())
    };
    for r in &table.rows {
        writeln!(log, "{:<16} mean {} ns", r.row.label, r.mean)?;
    }
    if let Some(dev) = table.max_golden_deviation() {
        writeln!(log, "max deviation from published table: {dev:.2} ns")?;
        for base in ["strong-3", "weak-5", "early-output"] {
            if let Some(pct) = table.mean_reduction(base, "relative-timed") {
                writeln!(log, "relative-timed mean reduction vs {base}: {pct:.1}%")?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
