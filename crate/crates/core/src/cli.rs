//! Command-line surface: argument definitions, report assembly and the CSV
//! writers. `main.rs` only parses, dispatches and maps errors to exit codes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{validation, Error, Result};
use crate::quantum_sim::{predict, run_session_sharded, z_score, Attack, SessionConfig};
use crate::qubit_attack::{params_from_beta, string_information};
use crate::qudit_attack::{qudit_information, qudit_params_from_beta};
use crate::security_solver::{
    border, figure1_table, sifting_rates, CrossingParams, Protocol, DEFAULT_TOL,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CURVES_HEADER: &str = "disturbance,info_bob,info_eve";
pub const FIGURE1_HEADER: &str = "n,d,border_qubit_string,border_qudit_mub";

/// Rounds above this need `--allow-huge-rounds`.
pub const MAX_ROUNDS: u64 = 1_000_000_000;

pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const SOLVER: i32 = 2;
    pub const IO: i32 = 3;
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Validation(_) => exit_code::USAGE,
        Error::Domain(_) | Error::Solver(_) => exit_code::SOLVER,
        Error::Io(_) | Error::Json(_) => exit_code::IO,
    }
}

/// Result envelope printed by the JSON-emitting commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunReport {
    fn new(command: &str, parameters: BTreeMap<String, Value>, results: Value) -> Self {
        Self {
            command: command.to_owned(),
            parameters,
            results,
            tool_version: TOOL_VERSION.to_owned(),
            seed: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    QubitString,
    QuditMub,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::QubitString => Protocol::QubitString,
            ProtocolArg::QuditMub => Protocol::QuditMub,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    None,
    Cloner,
    InterceptResend,
}

/// Cloner parameter: an explicit `β` (or `β̃`) or the border crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaArg {
    Value(f64),
    Border,
}

fn parse_beta(s: &str) -> std::result::Result<BetaArg, String> {
    if s.eq_ignore_ascii_case("border") {
        return Ok(BetaArg::Border);
    }
    s.parse::<f64>()
        .map(BetaArg::Value)
        .map_err(|e| format!("expected a number or `border`: {e}"))
}

/// Integer flag that also accepts scientific notation such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|e| format!("expected an integer: {e}"))?;
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

fn parse_small(s: &str) -> std::result::Result<u32, String> {
    let v = parse_count(s)?;
    u32::try_from(v).map_err(|_| format!("`{s}` is too large"))
}

#[derive(Debug, Parser)]
#[command(
    name = "qkd-dim",
    version,
    about = "Border disturbances for qubit-string and qudit QKD keys"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve I_B = I_E for one protocol and symbol width (JSON to stdout).
    Border(BorderArgs),
    /// Write Bob's and Eve's information curves as CSV.
    Curves(CurvesArgs),
    /// Write border disturbances of both protocols for n = 1..=max_n as CSV.
    Figure1(Figure1Args),
    /// Run a Monte Carlo session and compare it with the closed forms.
    Simulate(SimulateArgs),
    /// Compare sifting rates of the two protocols.
    Rates(RatesArgs),
}

#[derive(Debug, Args)]
pub struct BorderArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, value_parser = parse_small)]
    pub n: u32,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, value_parser = parse_small)]
    pub n: u32,
    #[arg(long, value_parser = parse_count, default_value = "101")]
    pub samples: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long, value_parser = parse_small, default_value = "12")]
    pub max_n: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, value_parser = parse_small)]
    pub n: u32,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub rounds: u64,
    #[arg(long, value_enum, default_value = "none")]
    pub attack: AttackArg,
    /// Cloner `β` (qubits) or `β̃` (qudits), or `border` for the crossing.
    #[arg(long, value_parser = parse_beta)]
    pub beta: Option<BetaArg>,
    #[arg(long, value_parser = parse_count, default_value = "0")]
    pub seed: u64,
    /// Independent RNG streams; results are reproducible for a fixed count.
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub shards: u64,
    #[arg(long)]
    pub allow_huge_rounds: bool,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long, value_parser = parse_small)]
    pub n: u32,
}

/// What a command produced: a report for stdout or a file it wrote.
#[derive(Debug)]
pub enum Output {
    Report(RunReport),
    Written(PathBuf),
}

pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Border(a) => cmd_border(a.protocol.into(), a.n, a.tol).map(Output::Report),
        Command::Curves(a) => {
            let csv = curves_csv(a.protocol.into(), a.n, a.samples)?;
            fs::write(&a.out, csv)?;
            Ok(Output::Written(a.out))
        }
        Command::Figure1(a) => {
            let csv = figure1_csv(a.max_n)?;
            fs::write(&a.out, csv)?;
            Ok(Output::Written(a.out))
        }
        Command::Simulate(a) => {
            if a.rounds > MAX_ROUNDS && !a.allow_huge_rounds {
                return Err(validation(format!(
                    "rounds = {} exceeds {MAX_ROUNDS}; pass --allow-huge-rounds",
                    a.rounds
                )));
            }
            let protocol: Protocol = a.protocol.into();
            let attack = match (a.attack, a.beta) {
                (AttackArg::None, None) => Attack::None,
                (AttackArg::InterceptResend, None) => Attack::InterceptResend,
                (AttackArg::Cloner, Some(beta)) => Attack::Cloner {
                    beta: resolve_beta(protocol, a.n, beta)?,
                },
                (AttackArg::Cloner, None) => {
                    return Err(validation("--attack cloner requires --beta"))
                }
                (_, Some(_)) => return Err(validation("--beta only applies to --attack cloner")),
            };
            let config = SessionConfig {
                protocol,
                n: a.n,
                rounds: a.rounds,
                attack,
                seed: a.seed,
            };
            let shards = usize::try_from(a.shards).map_err(|_| validation("too many shards"))?;
            cmd_simulate(&config, shards).map(Output::Report)
        }
        Command::Rates(a) => cmd_rates(a.n).map(Output::Report),
    }
}

fn resolve_beta(protocol: Protocol, n: u32, beta: BetaArg) -> Result<f64> {
    match beta {
        BetaArg::Value(b) => Ok(b),
        BetaArg::Border => match border(protocol, n, DEFAULT_TOL)?.crossing_params {
            CrossingParams::Qubit(p) => Ok(p.beta()),
            CrossingParams::Qudit(p) => Ok(p.beta_t()),
        },
    }
}

pub fn cmd_border(protocol: Protocol, n: u32, tol: f64) -> Result<RunReport> {
    let result = border(protocol, n, tol)?;
    let params = BTreeMap::from([
        ("protocol".to_owned(), json!(protocol)),
        ("n".to_owned(), json!(n)),
        ("tol".to_owned(), json!(tol)),
    ]);
    Ok(RunReport::new(
        "border",
        params,
        serde_json::to_value(result)?,
    ))
}

pub fn cmd_rates(n: u32) -> Result<RunReport> {
    let rates = sifting_rates(n)?;
    let params = BTreeMap::from([("n".to_owned(), json!(n))]);
    Ok(RunReport::new(
        "rates",
        params,
        serde_json::to_value(rates)?,
    ))
}

pub fn cmd_simulate(config: &SessionConfig, shards: usize) -> Result<RunReport> {
    let stats = run_session_sharded(config, shards)?;
    let prediction = predict(config)?;
    let z = json!({
        "sift_fraction": z_score(stats.sift_fraction, prediction.sift_fraction, stats.rounds_sent),
        "qber": z_score(stats.qber, prediction.qber, stats.sifted_units),
        "dit_disturbance": z_score(stats.dit_disturbance, prediction.dit_disturbance, stats.symbols),
    });
    let info_deltas = json!({
        "bob": stats.bob_info_empirical().map(|b| b - prediction.info_bob),
        "eve": stats.eve_info_empirical().map(|e| e - prediction.info_eve),
    });
    let params = BTreeMap::from([
        ("protocol".to_owned(), json!(config.protocol)),
        ("n".to_owned(), json!(config.n)),
        ("rounds".to_owned(), json!(config.rounds)),
        ("attack".to_owned(), serde_json::to_value(config.attack)?),
        ("shards".to_owned(), json!(shards)),
    ]);
    let results = json!({
        "stats": stats,
        "prediction": prediction,
        "z_scores": z,
        "info_deltas": info_deltas,
    });
    let mut report = RunReport::new("simulate", params, results);
    report.seed = Some(config.seed);
    Ok(report)
}

/// Information curves over uniformly spaced cloner parameters `β ∈ [0, 1]`.
pub fn curves_csv(protocol: Protocol, n: u32, samples: u64) -> Result<String> {
    if samples < 2 {
        return Err(validation("curves need at least 2 samples"));
    }
    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for i in 0..samples {
        let beta = i as f64 / (samples - 1) as f64;
        let (d, bob, eve) = match protocol {
            Protocol::QubitString => {
                let pt = string_information(n, &params_from_beta(beta)?)?;
                (pt.disturbance, pt.info_bob, pt.info_eve)
            }
            Protocol::QuditMub => {
                let pt = qudit_information(&qudit_params_from_beta(n, beta)?)?;
                (pt.d_bob, pt.info_bob, pt.info_eve)
            }
        };
        // `{}` on f64 is the shortest representation that parses back exactly.
        writeln!(out, "{d},{bob},{eve}").expect("write to String");
    }
    Ok(out)
}

pub fn figure1_csv(max_n: u32) -> Result<String> {
    let rows = figure1_table(max_n)?;
    let mut out = String::from(FIGURE1_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.n, r.d, r.border_qubit_string, r.border_qudit_mub
        )
        .expect("write to String");
    }
    Ok(out)
}
