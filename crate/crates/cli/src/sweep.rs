//! One-parameter sweeps and their CSV form.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use fdrelay::mc::MIN_REALIZATIONS;
use fdrelay::{
    approx_rate, exact_rate, half_duplex_rate, limit_rate_infinite_m, linear_to_db,
    required_source_power, AdcModel, LimitRate, MomentSamples, PowerCoupling, SearchBracket,
    SystemConfig,
};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::spec::{adc, parse_power, ScenarioSpec};

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Antennas,
    Pairs,
    SourcePower,
    RelayPower,
    PilotPower,
    LoopInterference,
    RelayBits,
    DestBits,
}

impl Axis {
    pub const ALL: [Axis; 8] = [
        Axis::Antennas,
        Axis::Pairs,
        Axis::SourcePower,
        Axis::RelayPower,
        Axis::PilotPower,
        Axis::LoopInterference,
        Axis::RelayBits,
        Axis::DestBits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Antennas => "M",
            Axis::Pairs => "K",
            Axis::SourcePower => "p_S",
            Axis::RelayPower => "p_R",
            Axis::PilotPower => "p_p",
            Axis::LoopInterference => "sigma_LI2",
            Axis::RelayBits => "relay_bits",
            Axis::DestBits => "dest_bits",
        }
    }

    pub fn is_power(self) -> bool {
        matches!(
            self,
            Axis::SourcePower | Axis::RelayPower | Axis::PilotPower | Axis::LoopInterference
        )
    }

    /// Parses one axis value. Bits axes use `inf` for an ideal converter.
    pub fn parse_value(self, text: &str) -> CliResult<f64> {
        let t = text.trim();
        let bad = |why: &str| CliError::usage(format!("{}: bad value `{t}`: {why}", self.name()));
        match self {
            Axis::Antennas | Axis::Pairs => match t.parse::<u64>() {
                Ok(n) if n > 0 => Ok(n as f64),
                _ => Err(bad("expected a positive integer")),
            },
            Axis::RelayBits | Axis::DestBits => {
                let m = adc(self.name(), &Value::String(t.to_string()))
                    .map_err(|_| bad("expected bits or `inf`"))?;
                Ok(if m.is_perfect() {
                    f64::INFINITY
                } else {
                    t.parse::<f64>().map_err(|_| bad("not a number"))?
                })
            }
            _ => parse_power(t).map_err(|e| bad(&e)),
        }
    }

    /// Returns `base` with this parameter set to `value`.
    pub fn apply(self, base: &ScenarioSpec, value: f64) -> CliResult<ScenarioSpec> {
        let mut s = base.clone();
        let bits = |v: f64| -> CliResult<AdcModel> {
            if v.is_infinite() {
                Ok(AdcModel::perfect())
            } else {
                adc(self.name(), &Value::from(v as i64))
            }
        };
        match self {
            Axis::Antennas => s.antennas = value as usize,
            Axis::Pairs => s.pairs = value as usize,
            Axis::SourcePower => s.source_power = value,
            Axis::RelayPower => s.relay_power = value,
            Axis::PilotPower => s.pilot_power = value,
            Axis::LoopInterference => s.loop_interference = value,
            Axis::RelayBits => s.relay_adc = bits(value)?,
            Axis::DestBits => s.dest_adc = bits(value)?,
        }
        Ok(s)
    }
}

impl FromStr for Axis {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<_> = Axis::ALL.iter().map(|a| a.name()).collect();
                CliError::usage(format!(
                    "unknown axis `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantity evaluated at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Exact,
    Approx,
    Mc,
    Limit,
    HalfDuplex,
    /// Smallest `p_S` meeting the sweep target (large-array approximation).
    RequiredSourcePower,
}

impl Output {
    pub const ALL: [Output; 6] = [
        Output::Exact,
        Output::Approx,
        Output::Mc,
        Output::Limit,
        Output::HalfDuplex,
        Output::RequiredSourcePower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Exact => "exact",
            Output::Approx => "approx",
            Output::Mc => "mc",
            Output::Limit => "limit",
            Output::HalfDuplex => "half_duplex",
            Output::RequiredSourcePower => "required_p_S",
        }
    }

    fn per_user(self) -> bool {
        self != Output::RequiredSourcePower
    }

    /// Parses a comma-separated list.
    pub fn parse_list(text: &str) -> CliResult<Vec<Output>> {
        let mut out = Vec::new();
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let o: Output = part.parse()?;
            if !out.contains(&o) {
                out.push(o);
            }
        }
        if out.is_empty() {
            return Err(CliError::usage("no outputs requested"));
        }
        Ok(out)
    }
}

impl FromStr for Output {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Output::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<_> = Output::ALL.iter().map(|o| o.name()).collect();
                CliError::usage(format!(
                    "unknown output `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Relay power rule used while searching for the required source power.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Coupling {
    Fixed,
    /// `p_R = K p_S`.
    #[default]
    PerPair,
    Factor(f64),
}

impl Coupling {
    pub fn resolve(self, cfg: &SystemConfig) -> PowerCoupling {
        match self {
            Coupling::Fixed => PowerCoupling::Fixed,
            Coupling::PerPair => PowerCoupling::per_pair(cfg),
            Coupling::Factor(c) => PowerCoupling::Proportional(c),
        }
    }
}

impl FromStr for Coupling {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "fixed" => Ok(Coupling::Fixed),
            "per-pair" | "K" => Ok(Coupling::PerPair),
            other => match other.parse::<f64>() {
                Ok(c) if c > 0.0 && c.is_finite() => Ok(Coupling::Factor(c)),
                _ => Err(CliError::usage(format!(
                    "coupling must be `fixed`, `per-pair` or a positive factor, got `{s}`"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioSpec,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub outputs: Vec<Output>,
    /// Sum-rate target for [`Output::RequiredSourcePower`].
    pub target: Option<f64>,
    pub coupling: Coupling,
    pub bracket: SearchBracket,
}

impl SweepSpec {
    pub fn new(base: ScenarioSpec, axis: Axis, values: Vec<f64>, outputs: Vec<Output>) -> Self {
        Self {
            base,
            axis,
            values,
            outputs,
            target: None,
            coupling: Coupling::default(),
            bracket: SearchBracket::default_power(),
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    /// Checks sweep-level rules; per-point configuration problems are
    /// reported in the result instead.
    pub fn check(&self, mc_n: usize) -> CliResult<()> {
        if self.values.is_empty() {
            return Err(CliError::usage("no sweep values given"));
        }
        if self.outputs.is_empty() {
            return Err(CliError::usage("no outputs requested"));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(CliError::usage(format!(
                "values of {} must be strictly monotone",
                self.axis
            )));
        }
        if self.outputs.contains(&Output::RequiredSourcePower) {
            match self.target {
                Some(t) if t.is_finite() && t > 0.0 => {}
                _ => return Err(CliError::usage("required_p_S needs a positive --target")),
            }
            if self.axis == Axis::SourcePower {
                return Err(CliError::usage("required_p_S cannot be swept over p_S"));
            }
        }
        if self.outputs.contains(&Output::Mc) && mc_n < MIN_REALIZATIONS {
            return Err(CliError::usage(format!(
                "--mc-n must be at least {MIN_REALIZATIONS}"
            )));
        }
        Ok(())
    }
}

/// Values of one output kind at one point. Failed cells hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cells {
    pub sum: f64,
    pub per_user: Vec<f64>,
    /// Standard errors, Monte-Carlo only.
    pub std_error: Option<(f64, Vec<f64>)>,
}

impl Cells {
    fn failed(pairs: usize, mc: bool) -> Self {
        Self {
            sum: f64::NAN,
            per_user: vec![f64::NAN; pairs],
            std_error: mc.then(|| (f64::NAN, vec![f64::NAN; pairs])),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Same order as [`SweepResult::outputs`].
    pub cells: Vec<Cells>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Axis,
    pub outputs: Vec<Output>,
    pub rows: Vec<SweepRow>,
    /// Human-readable reasons for `NaN` cells.
    pub failures: Vec<String>,
}

fn cells_of(b: &fdrelay::RateBreakdown) -> Cells {
    Cells {
        sum: b.sum_rate,
        per_user: b.rate.clone(),
        std_error: None,
    }
}

fn closed_form(out: Output, cfg: &SystemConfig, spec: &SweepSpec) -> fdrelay::Result<Cells> {
    match out {
        Output::Exact => exact_rate(cfg).map(|b| cells_of(&b)),
        Output::Approx => approx_rate(cfg).map(|b| cells_of(&b)),
        Output::HalfDuplex => half_duplex_rate(cfg).map(|b| cells_of(&b)),
        Output::Limit => {
            let per_user: Vec<f64> = limit_rate_infinite_m(cfg)?
                .into_iter()
                .map(|r| match r {
                    LimitRate::Finite(x) => x,
                    LimitRate::Unbounded => f64::INFINITY,
                })
                .collect();
            Ok(Cells {
                sum: per_user.iter().sum(),
                per_user,
                std_error: None,
            })
        }
        Output::RequiredSourcePower => {
            let target = spec.target.unwrap_or(f64::NAN);
            let r = required_source_power(cfg, target, spec.bracket, spec.coupling.resolve(cfg))?;
            Ok(Cells {
                sum: r.source_power,
                per_user: Vec::new(),
                std_error: None,
            })
        }
        Output::Mc => unreachable!("Monte-Carlo cells are filled separately"),
    }
}

/// Evaluates every requested output at every axis value.
///
/// Closed forms run in parallel across points. Monte-Carlo points run in
/// axis order and reuse one sample set while the sampled quantities (`M`,
/// `K`, `p_p`, betas, relay ADC) stay fixed, so sweeps over `p_S`, `p_R` or
/// `sigma_LI2` simulate once.
pub fn run_sweep(spec: &SweepSpec, mc_n: usize, seed: u64) -> CliResult<SweepResult> {
    spec.check(mc_n)?;
    let label = |v: f64| format!("{}={}", spec.axis, v);
    let configs: Vec<Result<SystemConfig, String>> = spec
        .values
        .iter()
        .map(|&v| {
            spec.axis
                .apply(&spec.base, v)
                .and_then(|s| s.to_config())
                .map_err(|e| match e {
                    CliError::Usage(m) | CliError::Eval(m) => m,
                })
        })
        .collect();

    let mut failures = Vec::new();
    let mut rows: Vec<SweepRow> = configs
        .par_iter()
        .zip(spec.values.par_iter())
        .map(|(cfg, &value)| {
            let pairs = cfg.as_ref().map_or(spec.base.pairs, |c| c.pairs);
            let mut errs = Vec::new();
            let cells = spec
                .outputs
                .iter()
                .map(|&out| match cfg {
                    Err(e) => {
                        if errs.is_empty() {
                            errs.push(format!("{}: {e}", label(value)));
                        }
                        Cells::failed(pairs, out == Output::Mc)
                    }
                    Ok(_) if out == Output::Mc => Cells::failed(pairs, true),
                    Ok(c) => closed_form(out, c, spec).unwrap_or_else(|e| {
                        errs.push(format!("{}: {}: {e}", label(value), out.name()));
                        Cells::failed(pairs, false)
                    }),
                })
                .collect();
            (SweepRow { value, cells }, errs)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|(row, errs)| {
            failures.extend(errs);
            row
        })
        .collect();

    if let Some(slot) = spec.outputs.iter().position(|&o| o == Output::Mc) {
        let mut cache: Option<MomentSamples> = None;
        for (row, cfg) in rows.iter_mut().zip(&configs) {
            let Ok(cfg) = cfg else { continue };
            let reused = cache.as_ref().and_then(|s| s.rate(cfg).ok());
            let rate = match reused {
                Some(r) => Ok(r),
                None => MomentSamples::simulate(cfg, mc_n, seed).and_then(|s| {
                    let r = s.rate(cfg);
                    cache = Some(s);
                    r
                }),
            };
            match rate {
                Ok(r) => {
                    row.cells[slot] = Cells {
                        sum: r.sum.mean,
                        per_user: r.per_user.iter().map(|e| e.mean).collect(),
                        std_error: Some((
                            r.sum.std_error,
                            r.per_user.iter().map(|e| e.std_error).collect(),
                        )),
                    }
                }
                Err(e) => failures.push(format!("{}: mc: {e}", label(row.value))),
            }
        }
    }

    Ok(SweepResult {
        axis: spec.axis,
        outputs: spec.outputs.clone(),
        rows,
        failures,
    })
}

/// Column layout shared by single sweeps and preset series.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    pub axis: String,
    pub axis_db: bool,
    pub outputs: Vec<Output>,
    pub users: usize,
}

impl Columns {
    pub fn of(result: &SweepResult) -> Self {
        Self {
            axis: result.axis.name().to_string(),
            axis_db: result.axis.is_power(),
            outputs: result.outputs.clone(),
            users: result.max_users(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec![self.axis.clone()];
        if self.axis_db {
            h.push(format!("{}_dB", self.axis));
        }
        for o in &self.outputs {
            match o {
                Output::RequiredSourcePower => {
                    h.push("required_p_S".into());
                    h.push("required_p_S_dB".into());
                }
                o => h.push(format!("sum_{}", o.name())),
            }
        }
        for o in self.outputs.iter().filter(|o| o.per_user()) {
            h.extend((1..=self.users).map(|k| format!("{}_{k}", o.name())));
        }
        if self.outputs.contains(&Output::Mc) {
            h.push("se_sum_mc".into());
            h.extend((1..=self.users).map(|k| format!("se_mc_{k}")));
        }
        h
    }

    pub fn record(&self, row: &SweepRow) -> Vec<String> {
        let users = |v: &[f64], out: &mut Vec<String>| {
            out.extend(
                (0..self.users).map(|k| v.get(k).map_or_else(String::new, |x| x.to_string())),
            );
        };
        let mut r = vec![row.value.to_string()];
        if self.axis_db {
            r.push(linear_to_db(row.value).to_string());
        }
        for (o, c) in self.outputs.iter().zip(&row.cells) {
            r.push(c.sum.to_string());
            if *o == Output::RequiredSourcePower {
                r.push(linear_to_db(c.sum).to_string());
            }
        }
        for (o, c) in self.outputs.iter().zip(&row.cells) {
            if o.per_user() {
                users(&c.per_user, &mut r);
            }
        }
        if let Some(c) = self
            .outputs
            .iter()
            .position(|&o| o == Output::Mc)
            .map(|i| &row.cells[i])
        {
            match &c.std_error {
                Some((s, per)) => {
                    r.push(s.to_string());
                    users(per, &mut r);
                }
                None => r.extend(std::iter::repeat_n(String::new(), self.users + 1)),
            }
        }
        r
    }
}

impl SweepResult {
    pub fn max_users(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().map(|c| c.per_user.len()))
            .max()
            .unwrap_or(0)
    }

    /// Sum column of `output`, one entry per row.
    pub fn sums(&self, output: Output) -> Option<Vec<f64>> {
        let i = self.outputs.iter().position(|&o| o == output)?;
        Some(self.rows.iter().map(|r| r.cells[i].sum).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let cols = Columns::of(self);
        let mut out = csv::Writer::from_writer(w);
        out.write_record(cols.header())?;
        for row in &self.rows {
            out.write_record(cols.record(row))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Writes several labelled sweeps into one table with a leading `series`
/// column. All sweeps must request the same outputs.
pub fn write_series_csv<W: Write>(series: &[(String, SweepResult)], w: W) -> CliResult<()> {
    let Some((_, first)) = series.first() else {
        return Err(CliError::eval("no series to write"));
    };
    let mut cols = Columns::of(first);
    if series.iter().any(|(_, r)| r.outputs != first.outputs) {
        return Err(CliError::eval("series request different outputs"));
    }
    if series.iter().any(|(_, r)| r.axis != first.axis) {
        cols.axis = "value".into();
        cols.axis_db = series.iter().all(|(_, r)| r.axis.is_power());
    }
    cols.users = series.iter().map(|(_, r)| r.max_users()).max().unwrap_or(0);
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["series".to_string()];
    header.extend(cols.header());
    out.write_record(&header)?;
    for (label, r) in series {
        for row in &r.rows {
            let mut rec = vec![label.clone()];
            rec.extend(cols.record(row));
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses comma-separated axis values.
pub fn parse_values(axis: Axis, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| axis.parse_value(p))
        .collect()
}
