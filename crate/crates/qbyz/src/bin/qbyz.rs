//! Command-line front end: list distribution, broadcast runs, the classical
//! baseline, clock synchronization, detector-efficiency studies and
//! transcript replay.
//!
//! Reports go to stdout as JSON (or to `--out`); a human-readable summary
//! goes to stderr. A `--config` JSON file can mirror any flag; explicit flags
//! win. Exit codes: 0 success, 2 invalid config, 3 protocol failure (global
//! abort or replay divergence), 4 round budget exhausted.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use qbyz::clock::{run_sync, ClockState, ListBackend, SyncConfig};
use qbyz::cost::{list_type_count, monte_carlo_efficiency, CostModel, Scheme};
use qbyz::dba::{run_qb, Decision, QbConfig};
use qbyz::harness::{FaultPlan, Strategy, Transcript, TranscriptError};
use qbyz::lists::{dealer_generate, validate_list_set, CorrelatedListSet};
use qbyz::om::{om, om_message_count, OmConfig};
use qbyz::qudit::{default_round_budget, generate_list_set, DistributionError};
use qbyz::rng::rng_from_seed;
use qbyz::stats::binomial_sigma;

const EXIT_CONFIG: u8 = 2;
const EXIT_PROTOCOL: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qbyz",
    version,
    about = "Detectable-broadcast and clock-sync simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one correlated list set (quantum channel or trusted dealer).
    Distribute(DistributeArgs),
    /// Run a single detectable-broadcast round.
    Dba(DbaArgs),
    /// Run the classical recursive oral-messages baseline.
    Om(OmArgs),
    /// Run one clock-synchronization round (m rotated broadcasts).
    Clocksync(ClockArgs),
    /// Closed-form vs Monte Carlo detector-efficiency comparison.
    Efficiency(EfficiencyArgs),
    /// Re-execute a persisted transcript and verify byte-identical replay.
    Replay(ReplayArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Number of processes.
    #[arg(long)]
    m: Option<usize>,
    /// Root seed; every random draw derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Detector efficiency for the quantum backend.
    #[arg(long)]
    eta: Option<f64>,
    /// List backend: quantum | dealer.
    #[arg(long)]
    backend: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// JSON file whose keys mirror the flags; flags override it.
    #[arg(long)]
    config: Option<String>,
    /// Write the run transcript (JSON Lines) here.
    #[arg(long)]
    transcript_out: Option<String>,
}

#[derive(Args, Clone, Default)]
struct DistributeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// List length L.
    #[arg(long)]
    l: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct DbaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// List length L.
    #[arg(long)]
    l: Option<usize>,
    /// Bit the source broadcasts.
    #[arg(long)]
    value: Option<u8>,
    /// Source process id.
    #[arg(long)]
    source: Option<usize>,
    /// Claim-length tolerance (defaults to 3 sigma for the list law).
    #[arg(long)]
    theta: Option<f64>,
    /// Fault assignment `<pid>=<strategy>`; repeatable. Strategies: honest,
    /// crash[:round], bot, flip-forged, flip-random,
    /// split:<to>=<bit>[,...], lie:<entry>=<delta>[,...]
    #[arg(long = "fault")]
    faults: Vec<String>,
}

#[derive(Args, Clone, Default)]
struct OmArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Recursion depth / fault bound.
    #[arg(long)]
    n: Option<usize>,
    /// Commander value (any integer; bits for agreement experiments).
    #[arg(long)]
    value: Option<i64>,
    #[arg(long = "fault")]
    faults: Vec<String>,
}

#[derive(Args, Clone, Default)]
struct ClockArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated initial offsets in ticks, one per process.
    #[arg(long)]
    offsets: Option<String>,
    /// Two's-complement bit width for encoded differences.
    #[arg(long)]
    bits: Option<usize>,
    /// List length per broadcast bit.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long = "fault")]
    faults: Vec<String>,
}

#[derive(Args, Clone, Default)]
struct EfficiencyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated process counts.
    #[arg(long)]
    m_list: Option<String>,
    /// Comma-separated efficiencies.
    #[arg(long)]
    eta_list: Option<String>,
    /// Monte Carlo trials per cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated schemes: single-qudit, qkd-lists, entangled-state.
    #[arg(long)]
    schemes: Option<String>,
}

#[derive(Args, Clone)]
struct ReplayArgs {
    /// Transcript file produced by dba, clocksync, om or distribute.
    #[arg(long)]
    transcript: String,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Protocol(String),
    Budget(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Protocol(_) => EXIT_PROTOCOL,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(msg) | CliError::Protocol(msg) | CliError::Budget(msg) => msg,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Distribute(args) => cmd_distribute(args),
        Command::Dba(args) => cmd_dba(args),
        Command::Om(args) => cmd_om(args),
        Command::Clocksync(args) => cmd_clocksync(args),
        Command::Efficiency(args) => cmd_efficiency(args),
        Command::Replay(args) => cmd_replay(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

/// Values loaded from `--config`; every key mirrors a flag name.
#[derive(Default, Deserialize)]
struct FileConfig {
    m: Option<usize>,
    seed: Option<u64>,
    eta: Option<f64>,
    backend: Option<String>,
    out: Option<String>,
    transcript_out: Option<String>,
    l: Option<usize>,
    value: Option<serde_json::Value>,
    source: Option<usize>,
    theta: Option<f64>,
    n: Option<usize>,
    offsets: Option<String>,
    bits: Option<usize>,
    m_list: Option<String>,
    eta_list: Option<String>,
    trials: Option<usize>,
    schemes: Option<String>,
    faults: Option<Vec<String>>,
}

fn load_config(path: &Option<String>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {p}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("cannot parse config {p}: {e}")))
        }
    }
}

fn parse_backend(name: &str) -> Result<&'static str, CliError> {
    match name {
        "quantum" => Ok("quantum"),
        "dealer" => Ok("dealer"),
        other => Err(CliError::Config(format!(
            "unknown backend {other:?} (expected quantum or dealer)"
        ))),
    }
}

fn parse_fault_specs(specs: &[String], m: usize) -> Result<FaultPlan, CliError> {
    let mut plan = FaultPlan::all_honest(m);
    for spec in specs {
        let (pid, strat) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("bad fault spec {spec:?}")))?;
        let pid: usize = pid
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad process id in {spec:?}")))?;
        if pid >= m {
            return Err(CliError::Config(format!(
                "fault process {pid} out of range for m={m}"
            )));
        }
        plan = plan.with(pid, parse_strategy(strat)?);
    }
    Ok(plan)
}

fn parse_strategy(text: &str) -> Result<Strategy, CliError> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    match name {
        "honest" => Ok(Strategy::Honest),
        "bot" => Ok(Strategy::BotAlways),
        "flip-forged" => Ok(Strategy::FlipRelayForgedList),
        "flip-random" => Ok(Strategy::FlipRelayRandomList),
        "crash" => {
            let round = match arg {
                None => 0,
                Some(a) => a
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad crash round in {text:?}")))?,
            };
            Ok(Strategy::Crash { round })
        }
        "split" => {
            let mut map = BTreeMap::new();
            for pair in arg.unwrap_or("").split(',').filter(|s| !s.is_empty()) {
                let (to, bit) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("bad split entry {pair:?}")))?;
                let to: usize = to
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad split target {pair:?}")))?;
                let bit: u8 = bit
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad split bit {pair:?}")))?;
                map.insert(to, bit);
            }
            Ok(Strategy::SplitBroadcast(map))
        }
        "lie" => {
            let mut map = BTreeMap::new();
            for pair in arg.unwrap_or("").split(',').filter(|s| !s.is_empty()) {
                let (entry, delta) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("bad lie entry {pair:?}")))?;
                let entry: usize = entry
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad lie target {pair:?}")))?;
                let delta: i64 = delta
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad lie delta {pair:?}")))?;
                map.insert(entry, delta);
            }
            Ok(Strategy::LieClockDifferences(map))
        }
        other => Err(CliError::Config(format!("unknown strategy {other:?}"))),
    }
}

fn emit(report: &serde_json::Value, out: &Option<String>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("report serialization failed: {e}")))?;
    match out {
        None => println!("{text}"),
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))?,
    }
    Ok(())
}

fn write_transcript(transcript: &Transcript, path: &Option<String>) -> Result<(), CliError> {
    if let Some(p) = path {
        fs::write(p, transcript.to_jsonl())
            .map_err(|e| CliError::Config(format!("cannot write transcript {p}: {e}")))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// distribute

#[derive(Serialize, Deserialize, Clone)]
struct DistributeParams {
    command: String,
    m: usize,
    l: usize,
    backend: String,
    eta: f64,
    seed: u64,
}

fn cmd_distribute(args: DistributeArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let params = DistributeParams {
        command: "distribute".into(),
        m: args.common.m.or(file.m).unwrap_or(3),
        l: args.l.or(file.l).unwrap_or(100),
        backend: parse_backend(
            &args
                .common
                .backend
                .or(file.backend)
                .unwrap_or_else(|| "quantum".into()),
        )?
        .to_string(),
        eta: args.common.eta.or(file.eta).unwrap_or(1.0),
        seed: args.common.seed.or(file.seed).unwrap_or(0),
    };
    if params.m < 2 {
        return Err(CliError::Config("m must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&params.eta) {
        return Err(CliError::Config(format!(
            "eta {} outside [0, 1]",
            params.eta
        )));
    }
    let (transcript, report) = run_distribute(&params)?;
    write_transcript(
        &transcript,
        &args
            .common
            .transcript_out
            .clone()
            .or(file.transcript_out.clone()),
    )?;
    let out = args.common.out.or(file.out);
    eprintln!(
        "distribute: m={} L={} backend={} eta={} seed={} -> {} rounds consumed",
        params.m, params.l, params.backend, params.eta, params.seed, report["rounds_consumed"]
    );
    emit(&report, &out)
}

fn run_distribute(params: &DistributeParams) -> Result<(Transcript, serde_json::Value), CliError> {
    let config = serde_json::to_value(params).expect("params serialize");
    let mut transcript = Transcript::new(params.seed, config);
    let mut rng = rng_from_seed(params.seed);
    let (set, rounds): (CorrelatedListSet, usize) = match params.backend.as_str() {
        "dealer" => (dealer_generate(params.m, params.l, &mut rng), params.l),
        _ => {
            let budget = default_round_budget(params.m, params.l);
            let generated = generate_list_set(params.m, params.l, params.eta, budget, &mut rng)
                .map_err(|e| match e {
                    DistributionError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
                    other => CliError::Config(other.to_string()),
                })?;
            // The reveal phase of each kept round is auditable in the
            // transcript: one event per kept position carrying the basis
            // choices in reveal order (last process first).
            for (j, record) in generated.kept_rounds.iter().enumerate() {
                transcript.push(
                    0,
                    j,
                    params.m - 1,
                    0,
                    "reveal",
                    json!({
                        "position": j,
                        "basis_reveal_order": record.basis_choices_reveal_order,
                    }),
                    None,
                );
            }
            (generated.set, generated.rounds_consumed)
        }
    };
    let validation = validate_list_set(&set);
    let report = json!({
        "set": set,
        "rounds_consumed": rounds,
        "valid": validation.is_ok(),
        "seed": params.seed,
    });
    Ok((transcript, report))
}

// ---------------------------------------------------------------------------
// dba

#[derive(Serialize, Deserialize, Clone)]
struct DbaParams {
    command: String,
    m: usize,
    l: usize,
    value: u8,
    source: usize,
    backend: String,
    eta: f64,
    seed: u64,
    theta: Option<f64>,
    faults: Vec<String>,
}

fn cmd_dba(args: DbaArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let value = match args.value {
        Some(v) => v,
        None => match &file.value {
            Some(v) => v
                .as_u64()
                .and_then(|v| u8::try_from(v).ok())
                .ok_or_else(|| CliError::Config("value must be 0 or 1".into()))?,
            None => 1,
        },
    };
    let params = DbaParams {
        command: "dba".into(),
        m: args.common.m.or(file.m).unwrap_or(4),
        l: args.l.or(file.l).unwrap_or(200),
        value,
        source: args.source.or(file.source).unwrap_or(0),
        backend: parse_backend(
            &args
                .common
                .backend
                .or(file.backend)
                .unwrap_or_else(|| "dealer".into()),
        )?
        .to_string(),
        eta: args.common.eta.or(file.eta).unwrap_or(1.0),
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        theta: args.theta.or(file.theta),
        faults: if args.faults.is_empty() {
            file.faults.unwrap_or_default()
        } else {
            args.faults.clone()
        },
    };
    let (transcript, report, global_abort) = run_dba(&params)?;
    write_transcript(
        &transcript,
        &args
            .common
            .transcript_out
            .clone()
            .or(file.transcript_out.clone()),
    )?;
    let out = args.common.out.or(file.out);
    eprintln!(
        "dba: m={} source=p{} value={} backend={} seed={}",
        params.m, params.source, params.value, params.backend, params.seed
    );
    for (p, v) in report["verdicts"].as_object().into_iter().flatten() {
        eprintln!("  {p} -> {}", summarize_verdict(v));
    }
    eprintln!(
        "  messages={} agreement={} validity={}",
        report["message_count"], report["agreement"], report["validity"]
    );
    emit(&report, &out)?;
    if global_abort {
        return Err(CliError::Protocol("all honest processes aborted".into()));
    }
    Ok(())
}

fn summarize_verdict(v: &serde_json::Value) -> String {
    let decision = &v["decision"];
    let case = v["case"].as_str().unwrap_or("?");
    if decision.is_string() {
        format!("abort [{case}]")
    } else {
        format!("value({}) [{case}]", decision["value"])
    }
}

fn build_lists(
    backend: &str,
    m: usize,
    l: usize,
    eta: f64,
    seed: u64,
) -> Result<CorrelatedListSet, CliError> {
    let mut rng = rng_from_seed(seed);
    match backend {
        "dealer" => Ok(dealer_generate(m, l, &mut rng)),
        _ => {
            let budget = default_round_budget(m, l);
            generate_list_set(m, l, eta, budget, &mut rng)
                .map(|g| g.set)
                .map_err(|e| match e {
                    DistributionError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
                    other => CliError::Config(other.to_string()),
                })
        }
    }
}

fn run_dba(params: &DbaParams) -> Result<(Transcript, serde_json::Value, bool), CliError> {
    if params.value > 1 {
        return Err(CliError::Config("value must be 0 or 1".into()));
    }
    if params.m < 2 {
        return Err(CliError::Config("m must be at least 2".into()));
    }
    if params.source >= params.m {
        return Err(CliError::Config("source out of range".into()));
    }
    let plan = parse_fault_specs(&params.faults, params.m)?;
    let config = serde_json::to_value(params).expect("params serialize");
    let mut transcript = Transcript::new(params.seed, config);
    let set = build_lists(&params.backend, params.m, params.l, params.eta, params.seed)?;
    let cfg = QbConfig {
        theta: params.theta,
    };
    let outcome = run_qb(
        params.source,
        params.value,
        &plan,
        &set,
        &cfg,
        params.seed,
        0,
        &mut transcript,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let honest = outcome.honest_decisions(&plan);
    let global_abort = !honest.is_empty() && honest.iter().all(|d| *d == Decision::Abort);
    let report = json!({
        "source": outcome.source,
        "source_value": outcome.source_value,
        "message_count": outcome.message_count,
        "verdicts": outcome
            .verdicts
            .iter()
            .map(|(p, v)| (format!("p{p}"), serde_json::to_value(v).expect("verdict serializes")))
            .collect::<BTreeMap<String, serde_json::Value>>(),
        "agreement": outcome.agreement_holds(&plan),
        "validity": outcome.validity_holds(&plan),
        "seed": params.seed,
    });
    Ok((transcript, report, global_abort))
}

// ---------------------------------------------------------------------------
// om

#[derive(Serialize, Deserialize, Clone)]
struct OmParams {
    command: String,
    m: usize,
    n: usize,
    value: i64,
    seed: u64,
    faults: Vec<String>,
}

fn cmd_om(args: OmArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let value = match args.value {
        Some(v) => v,
        None => file.value.as_ref().and_then(|v| v.as_i64()).unwrap_or(1),
    };
    let params = OmParams {
        command: "om".into(),
        m: args.common.m.or(file.m).unwrap_or(4),
        n: args.n.or(file.n).unwrap_or(1),
        value,
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        faults: if args.faults.is_empty() {
            file.faults.unwrap_or_default()
        } else {
            args.faults.clone()
        },
    };
    let (transcript, report) = run_om(&params)?;
    write_transcript(
        &transcript,
        &args
            .common
            .transcript_out
            .clone()
            .or(file.transcript_out.clone()),
    )?;
    let out = args.common.out.or(file.out);
    eprintln!(
        "om: m={} n={} commander value={} -> decisions {}, {} messages",
        params.m, params.n, params.value, report["decisions"], report["messages_sent"]
    );
    emit(&report, &out)
}

fn run_om(params: &OmParams) -> Result<(Transcript, serde_json::Value), CliError> {
    let cfg = OmConfig::new(params.m, params.n).map_err(|e| CliError::Config(e.to_string()))?;
    let plan = parse_fault_specs(&params.faults, params.m)?;
    let config = serde_json::to_value(params).expect("params serialize");
    let mut transcript = Transcript::new(params.seed, config);
    let outcome = om(&cfg, params.value, &plan).map_err(|e| CliError::Config(e.to_string()))?;
    for (&p, &d) in &outcome.decisions {
        transcript.push(0, 0, p, p, "om_decision", json!({"value": d}), None);
    }
    transcript.push(
        0,
        0,
        0,
        0,
        "om_messages",
        json!({
            "sent": outcome.messages_sent,
            "closed_form": om_message_count(params.n, params.m).ok(),
        }),
        None,
    );
    let report = json!({
        "decisions": outcome
            .decisions
            .iter()
            .map(|(p, d)| (format!("p{p}"), *d))
            .collect::<BTreeMap<String, i64>>(),
        "messages_sent": outcome.messages_sent,
        "message_count_closed_form": om_message_count(params.n, params.m).ok(),
        "seed": params.seed,
    });
    Ok((transcript, report))
}

// ---------------------------------------------------------------------------
// clocksync

#[derive(Serialize, Deserialize, Clone)]
struct ClockParams {
    command: String,
    offsets: Vec<i64>,
    bits: usize,
    l: usize,
    backend: String,
    eta: f64,
    seed: u64,
    theta: Option<f64>,
    faults: Vec<String>,
}

fn cmd_clocksync(args: ClockArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let offsets_text = args
        .offsets
        .or(file.offsets)
        .unwrap_or_else(|| "5,1,0".into());
    let offsets: Vec<i64> = offsets_text
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad offsets {offsets_text:?}")))?;
    let params = ClockParams {
        command: "clocksync".into(),
        offsets,
        bits: args.bits.or(file.bits).unwrap_or(8),
        l: args.l.or(file.l).unwrap_or(64),
        backend: parse_backend(
            &args
                .common
                .backend
                .or(file.backend)
                .unwrap_or_else(|| "dealer".into()),
        )?
        .to_string(),
        eta: args.common.eta.or(file.eta).unwrap_or(1.0),
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        theta: args.theta.or(file.theta),
        faults: if args.faults.is_empty() {
            file.faults.unwrap_or_default()
        } else {
            args.faults.clone()
        },
    };
    let (transcript, report, aborted) = run_clocksync(&params)?;
    write_transcript(
        &transcript,
        &args
            .common
            .transcript_out
            .clone()
            .or(file.transcript_out.clone()),
    )?;
    let out = args.common.out.or(file.out);
    eprintln!(
        "clocksync: m={} bits={} backend={} seed={} -> before={:?} after={} c1={} c2={}",
        params.offsets.len(),
        params.bits,
        params.backend,
        params.seed,
        params.offsets,
        report["after"],
        report["report"]["c1"],
        report["report"]["c2"],
    );
    emit(&report, &out)?;
    if aborted {
        return Err(CliError::Protocol(
            "sync round aborted; clocks unchanged".into(),
        ));
    }
    Ok(())
}

fn run_clocksync(params: &ClockParams) -> Result<(Transcript, serde_json::Value, bool), CliError> {
    let m = params.offsets.len();
    if m < 2 {
        return Err(CliError::Config("need at least 2 clocks".into()));
    }
    let clocks: Vec<ClockState> = params.offsets.iter().map(|&o| ClockState::new(o)).collect();
    let plan = parse_fault_specs(&params.faults, m)?;
    let backend = match params.backend.as_str() {
        "dealer" => ListBackend::Dealer,
        _ => ListBackend::Quantum { eta: params.eta },
    };
    let cfg = SyncConfig {
        bit_width: params.bits,
        list_length: params.l,
        theta: params.theta,
        backend,
        ..SyncConfig::for_processes(m)
    };
    let config = serde_json::to_value(params).expect("params serialize");
    let mut transcript = Transcript::new(params.seed, config);
    let (after, report) =
        run_sync(&clocks, &plan, &cfg, params.seed, &mut transcript).map_err(|e| match e {
            qbyz::clock::ClockError::ListGeneration(inner) => CliError::Budget(inner.to_string()),
            other => CliError::Config(other.to_string()),
        })?;
    let aborted = report.aborted;
    let value = json!({
        "before": params.offsets,
        "after": after.iter().map(|c| c.offset_ticks).collect::<Vec<i64>>(),
        "report": serde_json::to_value(&report).expect("report serializes"),
        "seed": params.seed,
    });
    Ok((transcript, value, aborted))
}

// ---------------------------------------------------------------------------
// efficiency

fn cmd_efficiency(args: EfficiencyArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let m_list: Vec<usize> = args
        .m_list
        .or(file.m_list)
        .unwrap_or_else(|| "3,4,8".into())
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config("bad m list".into()))?;
    let eta_list: Vec<f64> = args
        .eta_list
        .or(file.eta_list)
        .unwrap_or_else(|| "0.6,0.8,0.95".into())
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config("bad eta list".into()))?;
    let trials = args.trials.or(file.trials).unwrap_or(10_000);
    let seed = args.common.seed.or(file.seed).unwrap_or(0);
    let schemes = parse_schemes(&args.schemes.or(file.schemes))?;
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }

    let mut cells = Vec::new();
    let mut rng = rng_from_seed(seed);
    for &scheme in &schemes {
        for &m in &m_list {
            for &eta in &eta_list {
                let model =
                    CostModel::new(scheme, m, eta).map_err(|e| CliError::Config(e.to_string()))?;
                let closed = model.p_success();
                let mc = monte_carlo_efficiency(&model, trials, &mut rng);
                cells.push(json!({
                    "scheme": scheme.as_str(),
                    "m": m,
                    "eta": eta,
                    "p_closed_form": closed,
                    "p_monte_carlo": mc,
                    "trials": trials,
                    "sigma": binomial_sigma(closed, trials),
                }));
                eprintln!(
                    "efficiency: {:<15} m={:<2} eta={:<5} closed={:.4} mc={:.4}",
                    scheme.as_str(),
                    m,
                    eta,
                    closed,
                    mc
                );
            }
        }
    }
    let types: Vec<serde_json::Value> = m_list
        .iter()
        .filter_map(|&m| {
            list_type_count(m).ok().map(|c| {
                json!({"m": m, "relay_patterns": c.relay_patterns.to_string(),
                       "permutation_lists": c.permutation_lists.to_string()})
            })
        })
        .collect();
    let report = json!({
        "cells": cells,
        "list_types": types,
        "trials": trials,
        "seed": seed,
    });
    let out = args.common.out.or(file.out);
    emit(&report, &out)
}

fn parse_schemes(text: &Option<String>) -> Result<Vec<Scheme>, CliError> {
    match text {
        None => Ok(vec![
            Scheme::SingleQudit,
            Scheme::QkdLists,
            Scheme::EntangledState,
        ]),
        Some(t) => t
            .split(',')
            .map(|s| match s.trim() {
                "single-qudit" | "single_qudit" => Ok(Scheme::SingleQudit),
                "qkd-lists" | "qkd_lists" => Ok(Scheme::QkdLists),
                "entangled-state" | "entangled_state" => Ok(Scheme::EntangledState),
                other => Err(CliError::Config(format!("unknown scheme {other:?}"))),
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// replay

fn cmd_replay(args: ReplayArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.transcript)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.transcript)))?;
    let original = Transcript::from_jsonl(&text).map_err(|e| match e {
        TranscriptError::VersionMismatch { .. } => CliError::Config(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    let command = original.header.config["command"]
        .as_str()
        .unwrap_or("")
        .to_string();
    let regenerated: Transcript = match command.as_str() {
        "dba" => {
            let params: DbaParams = serde_json::from_value(original.header.config.clone())
                .map_err(|e| CliError::Config(format!("bad dba params in header: {e}")))?;
            run_dba(&params)?.0
        }
        "clocksync" => {
            let params: ClockParams = serde_json::from_value(original.header.config.clone())
                .map_err(|e| CliError::Config(format!("bad clocksync params in header: {e}")))?;
            run_clocksync(&params)?.0
        }
        "om" => {
            let params: OmParams = serde_json::from_value(original.header.config.clone())
                .map_err(|e| CliError::Config(format!("bad om params in header: {e}")))?;
            run_om(&params)?.0
        }
        "distribute" => {
            let params: DistributeParams = serde_json::from_value(original.header.config.clone())
                .map_err(|e| {
                CliError::Config(format!("bad distribute params in header: {e}"))
            })?;
            run_distribute(&params)?.0
        }
        other => {
            return Err(CliError::Config(format!(
                "transcript command {other:?} is not replayable"
            )))
        }
    };
    let original_text = original.to_jsonl();
    let regenerated_text = regenerated.to_jsonl();
    if original_text == regenerated_text {
        eprintln!(
            "replay: {} events reproduced byte-identically (seed {})",
            original.events.len(),
            original.header.seed
        );
        emit(
            &json!({"replay": "ok", "events": original.events.len(), "seed": original.header.seed}),
            &None,
        )
    } else {
        let first_diff = original_text
            .lines()
            .zip(regenerated_text.lines())
            .position(|(a, b)| a != b);
        Err(CliError::Protocol(format!(
            "replay diverged (first differing line: {:?})",
            first_diff
        )))
    }
}
