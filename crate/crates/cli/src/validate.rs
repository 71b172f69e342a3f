//! Closed-form terms against the Monte-Carlo oracle.

use std::io::Write;

use fdrelay::mc::{pooled_term, user_classes};
use fdrelay::rate_exact::TERM_NAMES;
use fdrelay::{exact_breakdown, McEstimate, MomentSamples, RateBreakdown, SystemConfig};

use crate::error::{CliError, CliResult};

pub const MIN_VALIDATION_N: usize = 1000;
pub const Z_LIMIT: f64 = 3.0;

/// One compared quantity. Exchangeable users are pooled into one row.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub quantity: String,
    /// Zero-based user indices pooled in this row.
    pub users: Vec<usize>,
    pub closed_form: f64,
    pub mc: McEstimate,
    pub z: f64,
}

impl ValidationRow {
    pub fn passed(&self) -> bool {
        self.z.abs() <= Z_LIMIT
    }

    /// Both sides are identically zero (e.g. quantization terms with ideal ADCs).
    pub fn exact_zero(&self) -> bool {
        self.closed_form == 0.0 && self.mc.mean == 0.0
    }

    fn users_label(&self) -> String {
        let one_based: Vec<String> = self.users.iter().map(|k| (k + 1).to_string()).collect();
        one_based.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub n: usize,
    pub seed: u64,
    pub sum_rate_closed: f64,
    pub sum_rate_mc: McEstimate,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ValidationRow::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| !r.passed())
    }

    pub fn print<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{:<26} {:>7} {:>14} {:>14} {:>11} {:>8}  status",
            "quantity", "users", "closed form", "mc mean", "mc se", "z"
        )?;
        for r in &self.rows {
            let status = if r.exact_zero() {
                "exact zero"
            } else if r.passed() {
                "ok"
            } else {
                "FAIL"
            };
            writeln!(
                w,
                "{:<26} {:>7} {:>14.7e} {:>14.7e} {:>11.3e} {:>8.2}  {status}",
                r.quantity,
                r.users_label(),
                r.closed_form,
                r.mc.mean,
                r.mc.std_error,
                r.z
            )?;
        }
        let rel = (self.sum_rate_mc.mean - self.sum_rate_closed) / self.sum_rate_closed;
        writeln!(
            w,
            "sum rate: closed form {:.6}, mc {:.6} (se {:.2e}, relative difference {:+.3}%)",
            self.sum_rate_closed,
            self.sum_rate_mc.mean,
            self.sum_rate_mc.std_error,
            100.0 * rel
        )?;
        let failed = self.failures().count();
        writeln!(
            w,
            "{} realizations, seed {}: {}",
            self.n,
            self.seed,
            if failed == 0 {
                format!("PASS (all |z| <= {Z_LIMIT})")
            } else {
                format!(
                    "FAIL ({failed} of {} rows with |z| > {Z_LIMIT})",
                    self.rows.len()
                )
            }
        )
    }

    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "quantity",
            "users",
            "closed_form",
            "mc_mean",
            "mc_se",
            "z",
            "passed",
        ])?;
        for r in &self.rows {
            out.write_record([
                r.quantity.clone(),
                r.users_label(),
                r.closed_form.to_string(),
                r.mc.mean.to_string(),
                r.mc.std_error.to_string(),
                r.z.to_string(),
                r.passed().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Compares the exact closed-form terms with `n` Monte-Carlo realizations.
pub fn run_validation(config: &SystemConfig, n: usize, seed: u64) -> CliResult<ValidationReport> {
    run_validation_with(config, n, seed, exact_breakdown)
}

/// Same as [`run_validation`] with a caller-supplied closed form.
pub fn run_validation_with<F>(
    config: &SystemConfig,
    n: usize,
    seed: u64,
    closed: F,
) -> CliResult<ValidationReport>
where
    F: Fn(&SystemConfig) -> fdrelay::Result<RateBreakdown>,
{
    if n < MIN_VALIDATION_N {
        return Err(CliError::usage(format!(
            "validation needs at least {MIN_VALIDATION_N} realizations, got {n}"
        )));
    }
    config
        .validate()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let reference = closed(config)?;
    let samples = MomentSamples::simulate(config, n, seed)?;
    let classes = user_classes(config);
    let mut rows = Vec::new();
    for (index, name) in TERM_NAMES.iter().enumerate() {
        for class in &classes {
            let mc = pooled_term(&samples, config, index, class)?;
            let closed_form =
                class.iter().map(|&k| reference.term(index)[k]).sum::<f64>() / class.len() as f64;
            rows.push(ValidationRow {
                quantity: name.to_string(),
                users: class.clone(),
                closed_form,
                z: mc.z_score(closed_form),
                mc,
            });
        }
    }
    let gamma = samples.estimate(|mu| MomentSamples::assemble(config, mu).gamma);
    rows.push(ValidationRow {
        quantity: "amplification_gain".into(),
        users: (0..config.pairs).collect(),
        closed_form: reference.gamma,
        z: gamma.z_score(reference.gamma),
        mc: gamma,
    });
    let rate = samples.rate(config)?;
    Ok(ValidationReport {
        rows,
        n,
        seed,
        sum_rate_closed: reference.sum_rate,
        sum_rate_mc: rate.sum,
    })
}
