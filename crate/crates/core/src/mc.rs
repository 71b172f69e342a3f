//! Monte-Carlo oracle for the rate terms and the amplification gain.
//!
//! Symbols and noise are never drawn: every term is an expectation over the
//! channels of a deterministic channel functional. Each realization stores a
//! small row of power-independent moments (the loop channel is drawn with unit
//! variance), so one set of samples serves any `p_S`, `p_R`, `sigma_LI2` and
//! `theta`. Terms are smooth functions of the moment means; their standard
//! errors follow from the delta method.
//!
//! Realization `i` uses the streams of [`RealizationStreams::new`]`(seed, i)`,
//! so results do not depend on how realizations are split between workers.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::channel::{draw_link, estimate_links};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::products::{LoopSummary, RelayProducts};
use crate::random::RealizationStreams;
use crate::rate_exact::{RateBreakdown, TERM_NAMES};

/// Smallest realization count accepted by the top-level simulators.
pub const MIN_REALIZATIONS: usize = 100;

const CHUNK: usize = 32;

/// Sample estimate of a scalar with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// `(mean - reference) / std_error`; zero when both coincide exactly.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = self.mean - reference;
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Monte-Carlo estimates of every SINR term (same scale as
/// [`RateBreakdown`]) and of the expectations that fix the relay gain.
#[derive(Debug, Clone, PartialEq)]
pub struct McTermReport {
    pub desired: Vec<McEstimate>,
    pub estimation_error: Vec<McEstimate>,
    pub interpair: Vec<McEstimate>,
    pub loop_interference: Vec<McEstimate>,
    pub relay_noise: Vec<McEstimate>,
    pub relay_quantization: Vec<McEstimate>,
    pub destination_noise: Vec<McEstimate>,
    pub destination_quantization: Vec<McEstimate>,
    /// `E ||F G_SR||^2`.
    pub frob_sources: McEstimate,
    /// `E ||F G_RR||^2`.
    pub frob_loop: McEstimate,
    /// `E ||F||^2`.
    pub frob_noise: McEstimate,
    /// `E ||F n_q||^2` for the relay quantization noise `n_q`.
    pub frob_quantization: McEstimate,
    pub gamma: McEstimate,
    pub n: usize,
}

impl McTermReport {
    /// Term `index` in the order of [`TERM_NAMES`].
    pub fn term(&self, index: usize) -> &[McEstimate] {
        match index {
            0 => &self.desired,
            1 => &self.estimation_error,
            2 => &self.interpair,
            3 => &self.loop_interference,
            4 => &self.relay_noise,
            5 => &self.relay_quantization,
            6 => &self.destination_noise,
            7 => &self.destination_quantization,
            _ => panic!("term index {index} out of range"),
        }
    }
}

/// Monte-Carlo rate of every user and of the sum.
#[derive(Debug, Clone, PartialEq)]
pub struct McRate {
    pub per_user: Vec<McEstimate>,
    pub sum: McEstimate,
}

// Per-user moment columns.
const X_RE: usize = 0;
const X_IM: usize = 1;
const X_POW: usize = 2;
const INTER: usize = 3;
const ROW: usize = 4;
const ROW_LOOP: usize = 5;
const ROW_SRC: usize = 6;
const ROW_W_SRC: usize = 7;
const ROW_W_LOOP: usize = 8;
const PER_USER: usize = 9;
// Global columns after the per-user block.
const F_SRC: usize = 0;
const F_LOOP: usize = 1;
const F_NOISE: usize = 2;
const F_W_SRC: usize = 3;
const F_W_LOOP: usize = 4;
const GLOBAL: usize = 5;

/// Parameters the samples depend on. Powers other than the pilot power, the
/// loop-interference level and the destination ADCs may vary freely.
#[derive(Debug, Clone, PartialEq)]
struct SampleKey {
    antennas: usize,
    pairs: usize,
    pilot_len: usize,
    pilot_power: f64,
    alpha: f64,
    beta_sr: Vec<f64>,
    beta_rd: Vec<f64>,
}

impl SampleKey {
    fn of(config: &SystemConfig) -> Self {
        Self {
            antennas: config.antennas,
            pairs: config.pairs,
            pilot_len: config.pilot_len,
            pilot_power: config.pilot_power,
            alpha: config.alpha(),
            beta_sr: config.beta_sr.clone(),
            beta_rd: config.beta_rd.clone(),
        }
    }
}

/// Per-realization moment rows for realizations `start..end` of one seed.
#[derive(Debug, Clone)]
pub struct MomentSamples {
    key: SampleKey,
    seed: u64,
    start: u64,
    cols: usize,
    data: Vec<f64>,
    cov: OnceLock<(Vec<f64>, Vec<f64>)>,
}

impl PartialEq for MomentSamples {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
            && self.seed == other.seed
            && self.start == other.start
            && self.data == other.data
    }
}

fn moment_row(config: &SystemConfig, products: &RelayProducts) -> Vec<f64> {
    let kk = config.pairs;
    let mut row = vec![0.0; kk * PER_USER + GLOBAL];
    for k in 0..kk {
        let u = &mut row[k * PER_USER..(k + 1) * PER_USER];
        let x = products.cross(k, k);
        u[X_RE] = x.re;
        u[X_IM] = x.im;
        u[X_POW] = x.norm_sqr();
        u[INTER] = (0..kk)
            .filter(|&j| j != k)
            .map(|j| products.cross(k, j).norm_sqr())
            .sum();
        u[ROW] = products.row_energy(k);
        u[ROW_LOOP] = products.row_through_loop(k);
        u[ROW_SRC] = products.row_through_sources(k);
        u[ROW_W_SRC] = products.row_weighted_sources(k);
        u[ROW_W_LOOP] = products.row_weighted_loop(k);
    }
    let g = &mut row[kk * PER_USER..];
    g[F_SRC] = products.frobenius_sources();
    g[F_LOOP] = products.frobenius_loop();
    g[F_NOISE] = products.frobenius();
    g[F_W_SRC] = products.frobenius_weighted_sources();
    g[F_W_LOOP] = products.frobenius_weighted_loop();
    row
}

/// Moment row of realization `index`, loop channel streamed with unit variance.
pub(crate) fn realization_row(config: &SystemConfig, seed: u64, index: u64) -> Result<Vec<f64>> {
    let mut streams = RealizationStreams::new(seed, index);
    let m = config.antennas;
    let g_sr = draw_link(&mut streams.channel, m, &config.beta_sr);
    let g_rd = draw_link(&mut streams.channel, m, &config.beta_rd);
    let est = estimate_links(&g_sr, &g_rd, config, &mut streams.pilot)?;
    let summary = LoopSummary::stream(&est.g_sr_hat, &mut streams.channel);
    let products = RelayProducts::from_parts(&est, &g_sr, &g_rd, summary)?;
    Ok(moment_row(config, &products))
}

/// Same row computed from a dense channel draw, for cross-checking.
#[doc(hidden)]
pub fn realization_row_dense(config: &SystemConfig, seed: u64, index: u64) -> Result<Vec<f64>> {
    let unit = config.clone().with_loop_interference(1.0);
    let mut streams = RealizationStreams::new(seed, index);
    let ch = crate::channel::draw_channels(&unit, &mut streams.channel)?;
    let est = crate::channel::simulate_pilot_estimation(&ch, &unit, &mut streams.pilot)?;
    let products = RelayProducts::new(&est, &ch)?;
    Ok(moment_row(config, &products))
}

impl MomentSamples {
    /// Simulates realizations `start..end` (any non-empty range).
    pub fn simulate_range(config: &SystemConfig, seed: u64, start: u64, end: u64) -> Result<Self> {
        config.validate()?;
        if end <= start {
            return Err(Error::TooFewRealizations { min: 1, got: 0 });
        }
        let cols = config.pairs * PER_USER + GLOBAL;
        let chunks: Vec<(u64, u64)> = (start..end)
            .step_by(CHUNK)
            .map(|a| (a, (a + CHUNK as u64).min(end)))
            .collect();
        let parts: Vec<Vec<f64>> = chunks
            .par_iter()
            .map(|&(a, b)| -> Result<Vec<f64>> {
                let mut out = Vec::with_capacity((b - a) as usize * cols);
                for i in a..b {
                    out.extend(realization_row(config, seed, i)?);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            key: SampleKey::of(config),
            seed,
            start,
            cols,
            data: parts.concat(),
            cov: OnceLock::new(),
        })
    }

    /// Simulates realizations `0..n`; requires `n >= 100`.
    pub fn simulate(config: &SystemConfig, n: usize, seed: u64) -> Result<Self> {
        if n < MIN_REALIZATIONS {
            return Err(Error::TooFewRealizations {
                min: MIN_REALIZATIONS,
                got: n,
            });
        }
        Self::simulate_range(config, seed, 0, n as u64)
    }

    /// Concatenates consecutive ranges of the same seed and configuration.
    /// The result equals a single-range run over the union.
    pub fn merge(parts: Vec<Self>) -> Result<Self> {
        let mut iter = parts.into_iter();
        let mut acc = iter
            .next()
            .ok_or(Error::TooFewRealizations { min: 1, got: 0 })?;
        acc.cov = OnceLock::new();
        for p in iter {
            let next = acc.start + acc.len() as u64;
            if p.key != acc.key || p.seed != acc.seed || p.start != next {
                return Err(Error::InvalidConfig(
                    "moment samples to merge must share seed and configuration and be contiguous"
                        .into(),
                ));
            }
            acc.data.extend_from_slice(&p.data);
        }
        Ok(acc)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pairs(&self) -> usize {
        self.key.pairs
    }

    /// Column means, accumulated in realization order.
    pub fn means(&self) -> &[f64] {
        &self.moments().0
    }

    fn moments(&self) -> &(Vec<f64>, Vec<f64>) {
        self.cov.get_or_init(|| {
            let c = self.cols;
            let n = self.len() as f64;
            let mut mean = vec![0.0; c];
            for row in self.data.chunks_exact(c) {
                for (m, v) in mean.iter_mut().zip(row) {
                    *m += v;
                }
            }
            mean.iter_mut().for_each(|m| *m /= n);
            let mut cov = vec![0.0; c * c];
            let mut d = vec![0.0; c];
            for row in self.data.chunks_exact(c) {
                for ((di, v), m) in d.iter_mut().zip(row).zip(&mean) {
                    *di = v - m;
                }
                for i in 0..c {
                    let di = d[i];
                    for j in i..c {
                        cov[i * c + j] += di * d[j];
                    }
                }
            }
            let denom = (n - 1.0).max(1.0);
            for i in 0..c {
                for j in i..c {
                    let v = cov[i * c + j] / denom;
                    cov[i * c + j] = v;
                    cov[j * c + i] = v;
                }
            }
            (mean, cov)
        })
    }

    /// Estimate of a smooth function of the column means, with a delta-method
    /// standard error.
    pub fn estimate<F: Fn(&[f64]) -> f64>(&self, f: F) -> McEstimate {
        let (mean, cov) = self.moments();
        let value = f(mean);
        let c = self.cols;
        let n = self.len();
        let mut grad = vec![0.0; c];
        let mut probe = mean.clone();
        for i in 0..c {
            let sd = cov[i * c + i].sqrt();
            let h = 1e-6 * (mean[i].abs() + sd) + 1e-300;
            probe[i] = mean[i] + h;
            let up = f(&probe);
            probe[i] = mean[i] - h;
            let down = f(&probe);
            probe[i] = mean[i];
            grad[i] = (up - down) / (2.0 * h);
        }
        let mut var = 0.0;
        for i in 0..c {
            if grad[i] == 0.0 {
                continue;
            }
            for j in 0..c {
                var += grad[i] * cov[i * c + j] * grad[j];
            }
        }
        McEstimate {
            mean: value,
            std_error: (var.max(0.0) / n as f64).sqrt(),
            n,
        }
    }

    fn check(&self, config: &SystemConfig) -> Result<()> {
        config.validate()?;
        if SampleKey::of(config) != self.key {
            return Err(Error::InvalidConfig(
                "samples were drawn for a different antenna count, user set, pilot power or relay ADC".into(),
            ));
        }
        Ok(())
    }

    /// Term breakdown for `config` evaluated at a moment vector `mu`.
    pub fn assemble(config: &SystemConfig, mu: &[f64]) -> RateBreakdown {
        let kk = config.pairs;
        let m = config.antennas as f64;
        let a = config.alpha();
        let t = config.theta();
        let (p_s, p_r) = (config.source_power, config.relay_power);
        let lp = p_r * config.loop_interference / m;
        let g = &mu[kk * PER_USER..];
        let den_gamma = a * a * (p_s * g[F_SRC] + lp * g[F_LOOP] + g[F_NOISE])
            + a * (1.0 - a) * (p_s * g[F_W_SRC] + lp * g[F_W_LOOP] + g[F_NOISE]);
        let gamma = (p_r / den_gamma).sqrt();
        let g_term = den_gamma / (a * a * p_r);
        let mut out = RateBreakdown::empty(kk, gamma);
        for k in 0..kk {
            let u = &mu[k * PER_USER..(k + 1) * PER_USER];
            let mean_pow = u[X_RE] * u[X_RE] + u[X_IM] * u[X_IM];
            out.desired[k] = p_s * mean_pow;
            out.estimation_error[k] = p_s * (u[X_POW] - mean_pow);
            out.interpair[k] = p_s * u[INTER];
            out.loop_interference[k] = lp * u[ROW_LOOP];
            out.relay_noise[k] = u[ROW];
            let f = (1.0 - a) / a * (p_s * u[ROW_W_SRC] + lp * u[ROW_W_LOOP] + u[ROW]);
            out.relay_quantization[k] = f;
            out.destination_noise[k] = g_term;
            out.destination_quantization[k] =
                (1.0 - t) / t * (p_s * u[ROW_SRC] + lp * u[ROW_LOOP] + u[ROW] + f + g_term);
        }
        out.finish(config.prelog());
        out
    }

    /// Per-term report for `config`, which must match the sampled one except
    /// for `p_S`, `p_R`, `sigma_LI2` and the destination ADCs.
    pub fn term_report(&self, config: &SystemConfig) -> Result<McTermReport> {
        self.check(config)?;
        let kk = config.pairs;
        let per = |index: usize| -> Vec<McEstimate> {
            (0..kk)
                .map(|k| self.estimate(|mu| Self::assemble(config, mu).term(index)[k]))
                .collect()
        };
        let a = config.alpha();
        let lp = config.relay_power * config.loop_interference / config.antennas as f64;
        let base = kk * PER_USER;
        let sigma2 = config.loop_interference;
        Ok(McTermReport {
            desired: per(0),
            estimation_error: per(1),
            interpair: per(2),
            loop_interference: per(3),
            relay_noise: per(4),
            relay_quantization: per(5),
            destination_noise: per(6),
            destination_quantization: per(7),
            frob_sources: self.estimate(|mu| mu[base + F_SRC]),
            frob_loop: self.estimate(|mu| sigma2 * mu[base + F_LOOP]),
            frob_noise: self.estimate(|mu| mu[base + F_NOISE]),
            frob_quantization: self.estimate(|mu| {
                a * (1.0 - a)
                    * (config.source_power * mu[base + F_W_SRC]
                        + lp * mu[base + F_W_LOOP]
                        + mu[base + F_NOISE])
            }),
            gamma: self.estimate(|mu| Self::assemble(config, mu).gamma),
            n: self.len(),
        })
    }

    /// Rate of every user and the sum rate for `config`.
    pub fn rate(&self, config: &SystemConfig) -> Result<McRate> {
        self.check(config)?;
        Ok(McRate {
            per_user: (0..config.pairs)
                .map(|k| self.estimate(|mu| Self::assemble(config, mu).rate[k]))
                .collect(),
            sum: self.estimate(|mu| Self::assemble(config, mu).sum_rate),
        })
    }
}

/// Simulates `n` realizations and reports every term.
pub fn simulate_terms(config: &SystemConfig, n: usize, seed: u64) -> Result<McTermReport> {
    MomentSamples::simulate(config, n, seed)?.term_report(config)
}

/// Simulates `n` realizations and estimates the amplification gain.
pub fn simulate_gamma(config: &SystemConfig, n: usize, seed: u64) -> Result<McEstimate> {
    let samples = MomentSamples::simulate(config, n, seed)?;
    samples.check(config)?;
    Ok(samples.estimate(|mu| MomentSamples::assemble(config, mu).gamma))
}

/// Simulates `n` realizations and estimates every user's rate.
pub fn simulate_rate(config: &SystemConfig, n: usize, seed: u64) -> Result<McRate> {
    MomentSamples::simulate(config, n, seed)?.rate(config)
}

/// Groups users with identical large-scale gains; their terms share a
/// distribution and can be pooled.
pub fn user_classes(config: &SystemConfig) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for k in 0..config.pairs {
        let key = (config.beta_sr[k], config.beta_rd[k]);
        match classes
            .iter_mut()
            .find(|c| (config.beta_sr[c[0]], config.beta_rd[c[0]]) == key)
        {
            Some(c) => c.push(k),
            None => classes.push(vec![k]),
        }
    }
    classes
}

/// Pooled estimate of term `index` averaged over the users in `class`.
pub fn pooled_term(
    samples: &MomentSamples,
    config: &SystemConfig,
    index: usize,
    class: &[usize],
) -> Result<McEstimate> {
    samples.check(config)?;
    if index >= TERM_NAMES.len() {
        return Err(Error::DimensionMismatch {
            expected: TERM_NAMES.len(),
            actual: index,
        });
    }
    let w = 1.0 / class.len() as f64;
    Ok(samples.estimate(|mu| {
        let b = MomentSamples::assemble(config, mu);
        class.iter().map(|&k| b.term(index)[k]).sum::<f64>() * w
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adc::AdcModel;
    use crate::config::db_to_linear;
    use crate::rate_exact::{amplification_gain, exact_breakdown};

    fn fig3(m: usize) -> SystemConfig {
        let adc = AdcModel::bits(2).unwrap();
        SystemConfig::homogeneous(m, 5)
            .with_adcs(adc, adc)
            .with_pilot_power(10.0)
            .with_relay_power(10.0)
            .with_loop_interference(1.0)
    }

    #[test]
    fn rejects_small_n() {
        assert_eq!(
            simulate_rate(&fig3(8), 99, 1).unwrap_err(),
            Error::TooFewRealizations { min: 100, got: 99 }
        );
    }

    #[test]
    fn streamed_rows_match_dense_rows() {
        for (m, k) in [(2, 1), (4, 2), (3, 2), (8, 3)] {
            let mut cfg = fig3(m).with_betas(vec![1.0; k], vec![1.0; k]);
            cfg.pairs = k;
            cfg.pilot_len = k;
            for i in 0..5 {
                let a = realization_row(&cfg, 9, i).unwrap();
                let b = realization_row_dense(&cfg, 9, i).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-10 * y.abs().max(1e-300), "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn reproducible_and_partition_invariant() {
        let cfg = fig3(16);
        let whole = MomentSamples::simulate(&cfg, 400, 5).unwrap();
        let again = MomentSamples::simulate(&cfg, 400, 5).unwrap();
        assert_eq!(whole, again);
        let parts = (0..4)
            .map(|p| MomentSamples::simulate_range(&cfg, 5, p * 100, (p + 1) * 100).unwrap())
            .collect();
        let merged = MomentSamples::merge(parts).unwrap();
        assert_eq!(merged.means(), whole.means());
        assert_eq!(merged.rate(&cfg).unwrap(), whole.rate(&cfg).unwrap());
    }

    #[test]
    fn merge_rejects_gaps() {
        let cfg = fig3(4);
        let a = MomentSamples::simulate_range(&cfg, 1, 0, 10).unwrap();
        let b = MomentSamples::simulate_range(&cfg, 1, 11, 20).unwrap();
        assert!(MomentSamples::merge(vec![a, b]).is_err());
    }

    #[test]
    fn perfect_relay_has_no_relay_quantization() {
        let cfg = fig3(16).with_adcs(AdcModel::perfect(), AdcModel::perfect());
        let rep = simulate_terms(&cfg, 200, 3).unwrap();
        for e in &rep.relay_quantization {
            assert_eq!(e.mean, 0.0);
            assert_eq!(e.z_score(0.0), 0.0);
        }
        assert_eq!(rep.frob_quantization.mean, 0.0);
    }

    #[test]
    fn terms_agree_with_closed_form() {
        for (m, k) in [(16, 1), (16, 5), (64, 1), (64, 5)] {
            let mut cfg = fig3(m).with_betas(vec![1.0; k], vec![1.0; k]);
            cfg.pairs = k;
            cfg.pilot_len = k;
            let samples = MomentSamples::simulate(&cfg, 10_000, 11).unwrap();
            let exact = exact_breakdown(&cfg).unwrap();
            let class: Vec<usize> = (0..k).collect();
            // interpair is identically zero for a single pair
            for (index, name) in TERM_NAMES.iter().enumerate() {
                let est = pooled_term(&samples, &cfg, index, &class).unwrap();
                let z = est.z_score(exact.term(index)[0]);
                assert!(z.abs() <= 3.0, "M={m} K={k} {name}: z = {z}");
            }
            let g = samples.term_report(&cfg).unwrap().gamma;
            assert!(g.z_score(exact.gamma).abs() <= 3.0);
        }
    }

    #[test]
    fn gamma_within_one_percent_and_scales() {
        let cfg = fig3(64)
            .with_source_power(1.0)
            .with_relay_power(1.0)
            .with_pilot_power(1.0);
        let samples = MomentSamples::simulate(&cfg, 10_000, 2).unwrap();
        let g = samples.term_report(&cfg).unwrap().gamma;
        let closed = amplification_gain(&cfg).unwrap();
        assert!((g.mean / closed - 1.0).abs() < 0.01);
        // without loop interference p_R enters only the numerator
        let quiet = cfg.clone().with_loop_interference(0.0);
        let g1 = samples.term_report(&quiet).unwrap().gamma;
        let g4 = samples
            .term_report(&quiet.with_relay_power(4.0))
            .unwrap()
            .gamma;
        assert!((g4.mean / g1.mean - 2.0).abs() < 3.0 * g4.std_error / g1.mean);
    }

    #[test]
    fn tiny_instance_desired_power() {
        let mut cfg = SystemConfig::homogeneous(2, 1)
            .with_pilot_power(1e12)
            .with_loop_interference(0.0);
        cfg.pilot_len = 1;
        let rep = simulate_terms(&cfg, 1_000_000, 4).unwrap();
        let exact = exact_breakdown(&cfg).unwrap();
        assert!((exact.desired[0] - 16.0).abs() < 1e-9);
        assert!(
            rep.desired[0].z_score(16.0).abs() <= 3.0,
            "{:?}",
            rep.desired[0]
        );
        let gamma = simulate_gamma(&cfg, 1_000_000, 4).unwrap();
        assert!(gamma.z_score(exact.gamma).abs() <= 3.0);
    }

    #[test]
    fn rate_matches_exact_and_saturates() {
        let cfg = fig3(64);
        let samples = MomentSamples::simulate(&cfg, 10_000, 1).unwrap();
        for p_db in [-10.0, 0.0, 10.0, 20.0] {
            let c = cfg.clone().with_source_power(db_to_linear(p_db));
            let mc = samples.rate(&c).unwrap().sum.mean;
            let ex = crate::rate_exact::exact_rate(&c).unwrap().sum_rate;
            assert!((mc / ex - 1.0).abs() < 0.01, "{p_db} dB: {mc} vs {ex}");
        }
        let r = |db| {
            samples
                .rate(&cfg.clone().with_source_power(db_to_linear(db)))
                .unwrap()
                .sum
                .mean
        };
        assert!((r(40.0) - r(30.0)).abs() < 0.1);
    }

    #[test]
    fn zero_prelog_rate_is_zero() {
        let mut cfg = fig3(8);
        cfg.coherence_len = 10;
        let r = simulate_rate(&cfg, 100, 1).unwrap();
        assert!(r.per_user.iter().all(|e| e.mean == 0.0));
        assert_eq!(r.sum.mean, 0.0);
    }

    #[test]
    fn standard_error_scales_as_inverse_sqrt_n() {
        let cfg = fig3(8);
        let small = simulate_rate(&cfg, 1_000, 6).unwrap().sum.std_error;
        let large = simulate_rate(&cfg, 100_000, 6).unwrap().sum.std_error;
        let ratio = small / large;
        assert!((ratio / 10.0 - 1.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn samples_reject_incompatible_config() {
        let cfg = fig3(8);
        let s = MomentSamples::simulate(&cfg, 100, 1).unwrap();
        assert!(s.rate(&cfg.clone().with_pilot_power(2.0)).is_err());
        assert!(s.rate(&cfg.clone().with_source_power(7.0)).is_ok());
    }

    #[test]
    fn classes_group_equal_gains() {
        let cfg = fig3(8).with_betas(vec![1.0, 2.0, 1.0, 2.0, 1.0], vec![1.0, 1.0, 1.0, 3.0, 1.0]);
        assert_eq!(user_classes(&cfg), vec![vec![0, 2, 4], vec![1], vec![3]]);
    }
}
