use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdrelay_cli::spec::{assignments, merge, parse_power, read_json};
use fdrelay_cli::{
    lookup_preset, presets, run_design, run_sweep, run_validation, sweep, write_series_csv, Axis,
    CliError, CliResult, Coupling, DesignKind, DesignQuery, Output, ScenarioSpec, SweepSpec,
};
use serde_json::{json, Value};

/// Rate analysis of a full-duplex massive-MIMO relay with low-resolution ADCs.
#[derive(Parser)]
#[command(name = "fdrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate rates over one swept parameter and write CSV.
    Sweep(SweepArgs),
    /// Compare every closed-form SINR term with Monte Carlo.
    Validate(Common),
    /// Answer a design question (optimal power, crossovers, required resources).
    Design(DesignArgs),
    /// Run a named figure experiment.
    Preset(PresetArgs),
}

#[derive(Args)]
struct Common {
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one scenario key, e.g. `--set M=128 --set p_S=-10dB`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Monte-Carlo realizations.
    #[arg(long, default_value_t = 10_000)]
    mc_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output path (stdout for sweeps when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// One of M, K, p_S, p_R, p_p, sigma_LI2, relay_bits, dest_bits.
    #[arg(long)]
    axis: String,
    /// Comma-separated values, e.g. `-10dB,0dB,10dB` or `64,128`.
    #[arg(long, allow_hyphen_values = true)]
    values: String,
    /// Comma-separated subset of exact, approx, mc, limit, half_duplex, required_p_S.
    #[arg(long, default_value = "exact")]
    outputs: String,
    /// Sum-rate target for required_p_S.
    #[arg(long)]
    target: Option<f64>,
    /// Relay power rule for required_p_S: fixed, per-pair (p_R = K p_S) or a factor.
    #[arg(long, default_value = "per-pair")]
    coupling: String,
}

#[derive(Args)]
struct DesignArgs {
    /// optimal-relay-power, relay-power-search, crossover-loop,
    /// crossover-antennas, required-source-power or required-antennas.
    #[arg(value_parser = parse_kind)]
    kind: DesignKind,
    #[command(flatten)]
    common: Common,
    /// Sum-rate target in bits/s/Hz.
    #[arg(long)]
    target: Option<f64>,
    /// Search interval bounds (linear or dB for powers, antenna counts otherwise).
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<String>,
    /// Stopping tolerance (in ln units for powers).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "per-pair")]
    coupling: String,
    /// Largest antenna count tried by required-antennas.
    #[arg(long, default_value_t = 4096)]
    max_m: usize,
}

#[derive(Args)]
struct PresetArgs {
    /// fig3 ... fig10.
    #[arg(required_unless_present = "list")]
    name: Option<String>,
    /// List the presets and exit.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    common: Common,
}

fn parse_kind(s: &str) -> Result<DesignKind, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

/// Scenario object from `--config` and `--set`, not yet interpreted.
fn scenario_value(c: &Common) -> CliResult<Value> {
    let mut v = match &c.config {
        Some(p) => read_json(p)?,
        None => json!({}),
    };
    merge(&mut v, &assignments(&c.set)?)?;
    Ok(v)
}

fn open_out(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::eval(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn warn(failures: &[String]) {
    for f in failures {
        eprintln!("warning: {f}");
    }
}

fn sweep_cmd(a: SweepArgs) -> CliResult<()> {
    let base = ScenarioSpec::from_value(&scenario_value(&a.common)?)?;
    let axis: Axis = a.axis.parse()?;
    let mut spec = SweepSpec::new(
        base,
        axis,
        sweep::parse_values(axis, &a.values)?,
        Output::parse_list(&a.outputs)?,
    );
    spec.target = a.target;
    spec.coupling = a.coupling.parse()?;
    let result = run_sweep(&spec, a.common.mc_n, a.common.seed)?;
    warn(&result.failures);
    result.write_csv(open_out(&a.common.out)?)
}

fn validate_cmd(c: Common) -> CliResult<()> {
    let cfg = ScenarioSpec::from_value(&scenario_value(&c)?)?.to_config()?;
    let report = run_validation(&cfg, c.mc_n, c.seed)?;
    report.print(io::stdout().lock())?;
    if let Some(p) = &c.out {
        report.write_csv(BufWriter::new(File::create(p)?))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::eval("validation failed"))
    }
}

fn bound(text: &Option<String>) -> CliResult<Option<f64>> {
    text.as_deref()
        .map(|t| parse_power(t).map_err(CliError::usage))
        .transpose()
}

fn design_cmd(a: DesignArgs) -> CliResult<()> {
    let cfg = ScenarioSpec::from_value(&scenario_value(&a.common)?)?.to_config()?;
    let mut q = DesignQuery::new(a.kind, cfg);
    q.target = a.target;
    q.lo = bound(&a.lo)?;
    q.hi = bound(&a.hi)?;
    q.tol = a.tol;
    q.coupling = a.coupling.parse::<Coupling>()?;
    q.max_antennas = a.max_m;
    let r = run_design(&q)?;
    println!("{r}");
    if let Some(p) = &a.common.out {
        r.append_csv(p)?;
    }
    Ok(())
}

fn preset_cmd(a: PresetArgs) -> CliResult<()> {
    if a.list {
        for p in presets::all() {
            println!("{:<6} {}", p.name, p.title);
        }
        return Ok(());
    }
    let preset = lookup_preset(a.name.as_deref().unwrap_or_default())?;
    let user = scenario_value(&a.common)?;
    let mut results = Vec::new();
    for (label, spec) in preset.sweeps(&user)? {
        eprintln!("{}: {label}", preset.name);
        let r = run_sweep(&spec, a.common.mc_n, a.common.seed)?;
        warn(&r.failures);
        results.push((label, r));
    }
    write_series_csv(&results, open_out(&a.common.out)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sweep(a) => sweep_cmd(a),
        Command::Validate(c) => validate_cmd(c),
        Command::Design(a) => design_cmd(a),
        Command::Preset(a) => preset_cmd(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
