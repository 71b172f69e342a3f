//! Dispatch of the six design queries.

use std::fmt;
use std::fs::OpenOptions;
use std::path::Path;
use std::str::FromStr;

use fdrelay::{
    approx_rate, duplex_crossover_antennas, duplex_crossover_loop_interference, exact_rate,
    linear_to_db, optimal_relay_power_homogeneous, optimize_relay_power, required_antennas,
    required_source_power, SearchBracket, SystemConfig,
};

use crate::error::{CliError, CliResult};
use crate::sweep::Coupling;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    OptimalRelayPower,
    RelayPowerSearch,
    CrossoverLoop,
    CrossoverAntennas,
    RequiredSourcePower,
    RequiredAntennas,
}

impl DesignKind {
    pub const ALL: [DesignKind; 6] = [
        DesignKind::OptimalRelayPower,
        DesignKind::RelayPowerSearch,
        DesignKind::CrossoverLoop,
        DesignKind::CrossoverAntennas,
        DesignKind::RequiredSourcePower,
        DesignKind::RequiredAntennas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DesignKind::OptimalRelayPower => "optimal-relay-power",
            DesignKind::RelayPowerSearch => "relay-power-search",
            DesignKind::CrossoverLoop => "crossover-loop",
            DesignKind::CrossoverAntennas => "crossover-antennas",
            DesignKind::RequiredSourcePower => "required-source-power",
            DesignKind::RequiredAntennas => "required-antennas",
        }
    }

    fn needs_target(self) -> bool {
        matches!(
            self,
            DesignKind::RequiredSourcePower | DesignKind::RequiredAntennas
        )
    }

    fn default_bracket(self) -> SearchBracket {
        match self {
            DesignKind::CrossoverAntennas => SearchBracket {
                lo: 1.0,
                hi: 4096.0,
                tol: 1.0,
            },
            _ => SearchBracket::default_power(),
        }
    }
}

impl FromStr for DesignKind {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        DesignKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = DesignKind::ALL.iter().map(|k| k.name()).collect();
                CliError::usage(format!(
                    "unknown design query `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignQuery {
    pub kind: DesignKind,
    pub config: SystemConfig,
    /// Sum-rate target in bits/s/Hz.
    pub target: Option<f64>,
    /// Overrides of the default search interval.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub tol: Option<f64>,
    pub coupling: Coupling,
    pub max_antennas: usize,
}

impl DesignQuery {
    pub fn new(kind: DesignKind, config: SystemConfig) -> Self {
        Self {
            kind,
            config,
            target: None,
            lo: None,
            hi: None,
            tol: None,
            coupling: Coupling::default(),
            max_antennas: 4096,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    fn bracket(&self) -> CliResult<SearchBracket> {
        let d = self.kind.default_bracket();
        SearchBracket::new(
            self.lo.unwrap_or(d.lo),
            self.hi.unwrap_or(d.hi),
            self.tol.unwrap_or(d.tol),
        )
        .map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub kind: DesignKind,
    /// What `value` is, e.g. `p_R` or `M`.
    pub quantity: &'static str,
    pub value: f64,
    /// `value` in dB when it is a power.
    pub value_db: Option<f64>,
    /// Sum rate at the result, where meaningful.
    pub sum_rate: Option<f64>,
    pub note: String,
}

impl fmt::Display for DesignResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} = {}", self.kind, self.quantity, self.value)?;
        if let Some(db) = self.value_db {
            write!(f, " ({db:.4} dB)")?;
        }
        if let Some(r) = self.sum_rate {
            write!(f, ", sum rate {r:.6} bits/s/Hz")?;
        }
        if !self.note.is_empty() {
            write!(f, " [{}]", self.note)?;
        }
        Ok(())
    }
}

impl DesignResult {
    fn power(kind: DesignKind, quantity: &'static str, value: f64) -> Self {
        Self {
            kind,
            quantity,
            value,
            value_db: Some(linear_to_db(value)),
            sum_rate: None,
            note: String::new(),
        }
    }

    /// Appends one row to `path`, writing the header if the file is new or empty.
    pub fn append_csv(&self, path: &Path) -> CliResult<()> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let fresh = file.metadata()?.len() == 0;
        let mut w = csv::Writer::from_writer(file);
        if fresh {
            w.write_record(["query", "quantity", "value", "value_dB", "sum_rate", "note"])?;
        }
        let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
        w.write_record([
            self.kind.name().to_string(),
            self.quantity.to_string(),
            self.value.to_string(),
            opt(self.value_db),
            opt(self.sum_rate),
            self.note.clone(),
        ])?;
        w.flush()?;
        Ok(())
    }
}

pub fn run_design(q: &DesignQuery) -> CliResult<DesignResult> {
    let cfg = &q.config;
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let target = match (q.kind.needs_target(), q.target) {
        (true, Some(t)) if t.is_finite() && t > 0.0 => t,
        (true, _) => {
            return Err(CliError::usage(format!(
                "{} needs a positive --target",
                q.kind
            )))
        }
        (false, _) => f64::NAN,
    };
    let bracket = q.bracket()?;
    let kind = q.kind;
    Ok(match kind {
        DesignKind::OptimalRelayPower => {
            let p = optimal_relay_power_homogeneous(cfg)?;
            let mut r = DesignResult::power(kind, "p_R", p);
            r.sum_rate = Some(approx_rate(&cfg.clone().with_relay_power(p))?.sum_rate);
            r
        }
        DesignKind::RelayPowerSearch => {
            let o = optimize_relay_power(cfg, bracket)?;
            let mut r = DesignResult::power(kind, "p_R", o.relay_power);
            r.sum_rate = Some(o.sum_rate);
            if o.multimodal {
                r.note = "objective has several local maxima; highest refined".into();
            }
            r
        }
        DesignKind::CrossoverLoop => {
            let s = duplex_crossover_loop_interference(cfg, bracket)?;
            DesignResult::power(kind, "sigma_LI2", s)
        }
        DesignKind::CrossoverAntennas => {
            let m = duplex_crossover_antennas(cfg, bracket)?;
            DesignResult {
                kind,
                quantity: "M",
                value: m as f64,
                value_db: None,
                sum_rate: Some(approx_rate(&cfg.clone().with_antennas(m))?.sum_rate),
                note: String::new(),
            }
        }
        DesignKind::RequiredSourcePower => {
            let p = required_source_power(cfg, target, bracket, q.coupling.resolve(cfg))?;
            let mut r = DesignResult::power(kind, "p_S", p.source_power);
            r.sum_rate = Some(p.sum_rate);
            if !p.monotone {
                r.note = "sum rate not monotone in p_S over the bracket".into();
            }
            r
        }
        DesignKind::RequiredAntennas => {
            let m = required_antennas(cfg, target, q.max_antennas)?;
            DesignResult {
                kind,
                quantity: "M",
                value: m as f64,
                value_db: None,
                sum_rate: Some(exact_rate(&cfg.clone().with_antennas(m))?.sum_rate),
                note: String::new(),
            }
        }
    })
}
