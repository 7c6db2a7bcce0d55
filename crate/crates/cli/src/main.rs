//! `slotcap`: capacity curves, optimal ensembles, self-checks and shot
//! simulations for the two-slot polarization channel.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use slotcap::capacity::{capacity_breakdown, optimal_input_ensemble, CurveMode, InputMode};
use slotcap::channel::NoiseModel;
use slotcap::measurement::simulate_shots;
use slotcap::protocol::{
    extended_rate, optimize_photon_probability, pair_information, TrainProtocolConfig,
};
use slotcap::verify::{run_suites, Suite, VerifyConfig};

#[derive(Parser, Debug)]
#[command(
    name = "slotcap",
    version,
    about = "Classical capacity of a two-slot polarization channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Total capacity versus η.
    Curve(CurveArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
    /// Describe the optimal input ensemble.
    Ensemble(EnsembleArgs),
    /// Shot-level singlet/triplet readout under the mixture noise model.
    Simulate(SimulateArgs),
    /// Rate of the multi-slot train protocol.
    Protocol(ProtocolArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long, default_value_t = 0.0)]
    eta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_max: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, value_enum, default_value = "all")]
    mode: CurveSelection,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    #[arg(long, value_enum, default_value = "entangled")]
    mode: PairMode,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "entangled")]
    mode: PairMode,
    /// Mixture weight of the identity in the relative-noise distribution.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Also report the rate-maximizing photon probability.
    #[arg(long)]
    optimize: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CurveSelection {
    Entangled,
    Separable,
    Baseline,
    All,
}

impl CurveSelection {
    fn modes(self) -> Vec<CurveMode> {
        match self {
            CurveSelection::Entangled => vec![CurveMode::Entangled],
            CurveSelection::Separable => vec![CurveMode::Separable],
            CurveSelection::Baseline => vec![CurveMode::Baseline],
            CurveSelection::All => CurveMode::ALL.to_vec(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PairMode {
    Entangled,
    Separable,
}

impl From<PairMode> for InputMode {
    fn from(m: PairMode) -> Self {
        match m {
            PairMode::Entangled => InputMode::Entangled,
            PairMode::Separable => InputMode::Separable,
        }
    }
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<slotcap::Error> for Failure {
    fn from(e: slotcap::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Curve(a) => cmd_curve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Ensemble(a) => cmd_ensemble(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Protocol(a) => cmd_protocol(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("slotcap: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("slotcap: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn json_text(v: &impl Serialize) -> Result<String, Failure> {
    // going through Value sorts object keys
    let value = serde_json::to_value(v).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Failure::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit_json(v: &impl Serialize, output: &Output) -> CmdResult {
    if output.format != Format::Json {
        return Err(Failure::Usage("this command only produces JSON".into()));
    }
    emit(&json_text(v)?, &output.out)
}

fn check_unit(name: &str, x: f64) -> CmdResult {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "--{name} must lie in [0, 1], got {x}"
        )))
    }
}

fn eta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    check_unit("eta-min", min)?;
    check_unit("eta-max", max)?;
    if min > max {
        return Err(Failure::Usage(format!(
            "--eta-min {min} exceeds --eta-max {max}"
        )));
    }
    match steps {
        0 => Err(Failure::Usage("--steps must be at least 1".into())),
        1 => Ok(vec![min]),
        _ if min == max => Err(Failure::Usage(
            "several steps need --eta-min < --eta-max".into(),
        )),
        _ => Ok((0..steps)
            .map(|i| {
                if i == steps - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (steps - 1) as f64
                }
            })
            .collect()),
    }
}

fn cmd_curve(a: &CurveArgs) -> CmdResult {
    let grid = eta_grid(a.eta_min, a.eta_max, a.steps)?;
    let modes = a.mode.modes();
    let mut columns = Vec::with_capacity(modes.len());
    for &m in &modes {
        columns.push(slotcap::capacity::capacity_curve(m, &grid)?);
    }
    let names: Vec<String> = modes
        .iter()
        .map(|m| format!("chi_total_{}", m.name()))
        .collect();
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("eta");
            for n in &names {
                s.push(',');
                s.push_str(n);
            }
            s.push('\n');
            for (i, eta) in grid.iter().enumerate() {
                write!(s, "{eta:.9}").unwrap();
                for col in &columns {
                    write!(s, ",{:.9}", col[i].1).unwrap();
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = grid
                .iter()
                .enumerate()
                .map(|(i, eta)| {
                    let mut row = serde_json::Map::new();
                    row.insert("eta".into(), Value::from(*eta));
                    for (n, col) in names.iter().zip(&columns) {
                        row.insert(n.clone(), Value::from(col[i].1));
                    }
                    Value::Object(row)
                })
                .collect();
            json_text(&serde_json::json!({
                "modes": modes.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "rows": rows,
            }))?
        }
    };
    emit(&text, &a.out)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let suites = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        let mut v = Vec::new();
        for name in a.suite.split(',') {
            v.push(Suite::from_name(name.trim()).ok_or_else(|| {
                let known: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Failure::Usage(format!(
                    "unknown suite `{name}` (known: {}, all)",
                    known.join(", ")
                ))
            })?);
        }
        v
    };
    if a.shards == 0 {
        return Err(Failure::Usage("--shards must be at least 1".into()));
    }
    let cfg = VerifyConfig {
        samples: a.samples,
        seed: a.seed,
        shards: a.shards,
    };
    let reports = run_suites(&suites, &cfg)?;
    let all_passed = reports.iter().all(|r| r.passed);
    emit_json(
        &serde_json::json!({
            "all_passed": all_passed,
            "samples": a.samples,
            "seed": a.seed,
            "shards": a.shards,
            "suites": reports,
        }),
        &a.output,
    )?;
    if all_passed {
        Ok(())
    } else {
        let failed: Vec<_> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name)
            .collect();
        Err(Failure::Verification(format!(
            "failed suites: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_ensemble(a: &EnsembleArgs) -> CmdResult {
    check_unit("eta", a.eta)?;
    let ens = optimal_input_ensemble(a.mode.into(), a.eta)?;
    let b = ens.breakdown;
    let sum: f64 = ens.members.iter().map(|m| m.probability).sum();
    emit_json(
        &serde_json::json!({
            "mode": ens.mode,
            "eta": ens.eta,
            "members": ens.members,
            "block_probabilities": b.block_probs,
            "pair_probabilities": ens.pair_probs,
            "probability_sum": sum,
            "chi": {
                "chi0": b.chi0,
                "chi1": b.chi1,
                "chi2": b.chi2,
                "total": b.total,
            },
            "gamma_opt": b.gamma_opt,
        }),
        &a.output,
    )
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let q = a
        .q
        .ok_or_else(|| Failure::Usage("simulate needs the mixture noise model: pass --q".into()))?;
    check_unit("q", q)?;
    if a.shards == 0 {
        return Err(Failure::Usage("--shards must be at least 1".into()));
    }
    let noise = NoiseModel::mixture(q)?;
    let r = simulate_shots(a.mode.into(), &noise, a.shots, a.seed, a.shards)?;
    emit_json(
        &serde_json::json!({
            "mode": r.mode,
            "q": r.q,
            "shots": r.shots,
            "seed": r.seed,
            "shards": r.shards,
            "counts": r.counts,
            "prior": r.prior,
            "empirical_mi": r.empirical_mi,
            "std_error": r.std_error,
            "analytic_mi": r.analytic_mi,
            "abs_deviation": r.abs_deviation(),
            "within_3_sigma": r.within_three_sigma(),
        }),
        &a.output,
    )
}

fn cmd_protocol(a: &ProtocolArgs) -> CmdResult {
    check_unit("p", a.p)?;
    check_unit("eta", a.eta)?;
    let cfg = TrainProtocolConfig::new(a.p, a.eta)?;
    let mut report = serde_json::json!({
        "p": a.p,
        "eta": a.eta,
        "rate": extended_rate(&cfg)?,
        "pair_information": pair_information(a.eta)?,
        "eta_generalization": cfg.is_eta_extension(),
        "two_slot_capacity": capacity_breakdown(CurveMode::Entangled, a.eta)?.total,
    });
    if a.optimize {
        let (p_star, rate_star) = optimize_photon_probability(a.eta)?;
        report["optimized"] = serde_json::json!({ "p_star": p_star, "rate_star": rate_star });
    }
    emit_json(&report, &a.output)
}
