//! Exact closed-form achievable rate of the MRC/MRT relay with quantized
//! relay and destination front ends.
//!
//! Every user's SINR is `A / (B + C + D + E + F + G + H)`, where the terms are
//! the desired signal, estimation-error leakage, interpair interference, loop
//! interference, amplified relay noise, relay quantization noise, destination
//! noise and destination quantization noise. All terms are kept in the
//! unnormalized scale of the received signal divided by `alpha gamma`.

use crate::channel::{estimation_stats, EstimationStats};
use crate::config::SystemConfig;
use crate::error::Result;

/// Per-user SINR terms and the resulting rates.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    pub desired: Vec<f64>,
    pub estimation_error: Vec<f64>,
    pub interpair: Vec<f64>,
    pub loop_interference: Vec<f64>,
    pub relay_noise: Vec<f64>,
    pub relay_quantization: Vec<f64>,
    pub destination_noise: Vec<f64>,
    pub destination_quantization: Vec<f64>,
    /// Relay amplification gain. Not meaningful for the approximations,
    /// which are written without it; there it is set to `NaN`.
    pub gamma: f64,
    pub sinr: Vec<f64>,
    pub rate: Vec<f64>,
    pub sum_rate: f64,
}

/// Names of the eight SINR terms in the order of [`RateBreakdown::term`].
pub const TERM_NAMES: [&str; 8] = [
    "desired",
    "estimation_error",
    "interpair",
    "loop_interference",
    "relay_noise",
    "relay_quantization",
    "destination_noise",
    "destination_quantization",
];

impl RateBreakdown {
    pub fn pairs(&self) -> usize {
        self.desired.len()
    }

    /// Term `index` (see [`TERM_NAMES`]) for all users.
    pub fn term(&self, index: usize) -> &[f64] {
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

    pub(crate) fn empty(pairs: usize, gamma: f64) -> Self {
        let z = vec![0.0; pairs];
        Self {
            desired: z.clone(),
            estimation_error: z.clone(),
            interpair: z.clone(),
            loop_interference: z.clone(),
            relay_noise: z.clone(),
            relay_quantization: z.clone(),
            destination_noise: z.clone(),
            destination_quantization: z.clone(),
            gamma,
            sinr: z.clone(),
            rate: z,
            sum_rate: 0.0,
        }
    }

    /// Interference-plus-noise of user `k`, summed largest term first.
    pub fn denominator(&self, k: usize) -> f64 {
        let mut parts: Vec<f64> = (1..8).map(|i| self.term(i)[k]).collect();
        sum_descending(&mut parts)
    }

    /// Recomputes `sinr`, `rate` and `sum_rate` from the terms.
    pub fn finish(&mut self, prelog: f64) {
        for k in 0..self.pairs() {
            let den = self.denominator(k);
            self.sinr[k] = self.desired[k] / den;
            self.rate[k] = prelog * self.sinr[k].log2_1p();
        }
        self.sum_rate = self.rate.iter().sum();
    }
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    #[inline]
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

pub(crate) fn sum_descending(parts: &mut [f64]) -> f64 {
    parts.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    parts.iter().sum()
}

/// Aggregates of the estimation statistics shared by several terms.
pub(crate) struct Moments {
    /// `sigma2_SR`, `sigma2_RD`.
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub beta_sr: Vec<f64>,
    pub beta_rd: Vec<f64>,
    /// `sum_n s_n r_n`.
    pub sum_sr: f64,
    /// `sum_n s_n^2 r_n`.
    pub sum_s2r: f64,
    /// `sum_n r_n`.
    pub sum_r: f64,
    /// `sum_i beta_SR,i`.
    pub sum_beta_sr: f64,
}

impl Moments {
    pub fn new(config: &SystemConfig, stats: &EstimationStats) -> Self {
        let s = stats.sigma2_sr.clone();
        let r = stats.sigma2_rd.clone();
        let sum_sr = s.iter().zip(&r).map(|(a, b)| a * b).sum();
        let sum_s2r = s.iter().zip(&r).map(|(a, b)| a * a * b).sum();
        Self {
            sum_r: r.iter().sum(),
            sum_beta_sr: config.beta_sr.iter().sum(),
            beta_sr: config.beta_sr.clone(),
            beta_rd: config.beta_rd.clone(),
            s,
            r,
            sum_sr,
            sum_s2r,
        }
    }
}

/// Closed-form relay amplification gain satisfying the average transmit
/// power constraint `E ||x_R||^2 = p_R`.
pub fn amplification_gain(config: &SystemConfig) -> Result<f64> {
    let stats = estimation_stats(config)?;
    Ok(gain_from(config, &Moments::new(config, &stats)))
}

pub(crate) fn gain_from(config: &SystemConfig, mo: &Moments) -> f64 {
    let m = config.antennas as f64;
    let a = config.alpha();
    let (p_s, p_r) = (config.source_power, config.relay_power);
    let den = p_s * mo.sum_s2r * (m * a * a + a * (1.0 - a))
        + a * mo.sum_sr * (p_s * mo.sum_beta_sr + p_r * config.loop_interference + 1.0);
    (p_r / den).sqrt() / m
}

/// All eight exact SINR terms for every user; `sinr`, `rate` and `sum_rate`
/// are filled as well.
pub fn exact_breakdown(config: &SystemConfig) -> Result<RateBreakdown> {
    let stats = estimation_stats(config)?;
    let mo = Moments::new(config, &stats);
    let gamma = gain_from(config, &mo);
    let kk = config.pairs;
    let m = config.antennas as f64;
    let (m2, m3, m4) = (m * m, m * m * m, m * m * m * m);
    let a = config.alpha();
    let t = config.theta();
    let p_s = config.source_power;
    let li = config.relay_power * config.loop_interference + 1.0;
    let q_relay = (1.0 - a) / a;
    let q_dest = (1.0 - t) / t;
    let q_both = (1.0 - a) * (1.0 - t) / (a * t);
    let g_term = 1.0 / (a * a * gamma * gamma);

    let (s, r) = (&mo.s, &mo.r);
    let (bs, br) = (&mo.beta_sr, &mo.beta_rd);
    let sb = mo.sum_beta_sr;
    let sum_sr_sb: f64 = s.iter().zip(r).map(|(x, y)| x * y * (x + sb)).sum();

    let mut out = RateBreakdown::empty(kk, gamma);
    for k in 0..kk {
        let (sk, rk) = (s[k], r[k]);
        let srr = sk * rk * rk;
        out.desired[k] = p_s * m4 * sk * sk * rk * rk;
        out.estimation_error[k] =
            p_s * m3 * sk * rk * (bs[k] * rk + br[k] * sk) + p_s * m2 * bs[k] * br[k] * mo.sum_sr;

        let mut c = [0.0; 4];
        for j in (0..kk).filter(|&j| j != k) {
            let bb = bs[j] * br[k];
            c[0] += p_s * m3 * (srr * bs[j] + br[k] * s[j] * s[j] * r[j]);
            c[1] += p_s * m2 * bb * (mo.sum_sr - sk * rk - s[j] * r[j]);
            c[2] += p_s * m2 * bb * sk * rk;
            c[3] += p_s * m2 * bb * s[j] * r[j];
        }
        out.interpair[k] = sum_descending(&mut c);

        let e = m2 * (m * srr + br[k] * mo.sum_sr);
        out.loop_interference[k] = config.loop_interference * config.relay_power * e;
        out.relay_noise[k] = e;

        let mut f = [
            q_relay * m3 * p_s * srr * (sk + sb),
            q_relay * m3 * li * srr,
            q_relay * m2 * li * br[k] * mo.sum_sr,
            q_relay * m2 * p_s * br[k] * sum_sr_sb,
        ];
        out.relay_quantization[k] = sum_descending(&mut f);
        out.destination_noise[k] = g_term;

        let mut h = [
            q_dest * p_s * m3 * srr * (m * sk + sb),
            q_dest * p_s * m2 * sk * (m * sk + sb) * br[k] * mo.sum_r,
            q_dest / a * m3 * li * srr,
            q_dest / a * m2 * li * br[k] * mo.sum_sr,
            q_both * m3 * p_s * srr * (sk + sb),
            q_both * p_s * m2 * br[k] * mo.sum_s2r,
            q_both * p_s * m2 * br[k] * mo.sum_sr * sb,
            q_dest * g_term,
        ];
        out.destination_quantization[k] = sum_descending(&mut h);
    }
    out.finish(config.prelog());
    Ok(out)
}

/// Exact per-user and sum rates.
pub fn exact_rate(config: &SystemConfig) -> Result<RateBreakdown> {
    exact_breakdown(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adc::AdcModel;
    use crate::config::db_to_linear;

    fn fig3(m: usize, p_s_db: f64) -> SystemConfig {
        let adc = AdcModel::bits(2).unwrap();
        SystemConfig::homogeneous(m, 5)
            .with_adcs(adc, adc)
            .with_pilot_power(10.0)
            .with_relay_power(10.0)
            .with_loop_interference(1.0)
            .with_source_power(db_to_linear(p_s_db))
    }

    #[test]
    fn gain_vanishes_with_relay_power() {
        let g1 = amplification_gain(&fig3(64, 0.0).with_relay_power(1e-12)).unwrap();
        assert!(g1 > 0.0 && g1 < 1e-7);
    }

    #[test]
    fn gain_decreases_with_antennas() {
        let gains: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&m| amplification_gain(&fig3(m, 0.0)).unwrap())
            .collect();
        assert!(gains.windows(2).all(|w| w[1] < w[0]), "{gains:?}");
    }

    #[test]
    fn perfect_adcs_have_no_quantization_terms() {
        let cfg = fig3(64, 0.0).with_adcs(AdcModel::perfect(), AdcModel::perfect());
        let b = exact_breakdown(&cfg).unwrap();
        assert!(b.relay_quantization.iter().all(|&x| x == 0.0));
        assert!(b.destination_quantization.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_pair_has_no_interpair_term() {
        let mut cfg = fig3(64, 0.0);
        cfg.pairs = 1;
        cfg.pilot_len = 1;
        cfg.beta_sr = vec![1.0];
        cfg.beta_rd = vec![1.0];
        assert_eq!(exact_breakdown(&cfg).unwrap().interpair, vec![0.0]);
    }

    #[test]
    fn zero_prelog_gives_zero_rate() {
        let mut cfg = fig3(64, 0.0);
        cfg.coherence_len = 10;
        let b = exact_rate(&cfg).unwrap();
        assert!(b.rate.iter().all(|&r| r == 0.0));
        assert_eq!(b.sum_rate, 0.0);
    }

    #[test]
    fn rate_increases_with_antennas() {
        let mut prev = 0.0;
        for m in [32, 64, 128, 256, 512] {
            let r = exact_rate(&fig3(m, 0.0)).unwrap().rate[0];
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn rate_decreases_with_relay_resolution() {
        let hi =
            exact_rate(&fig3(64, 0.0).with_adcs(AdcModel::perfect(), AdcModel::bits(2).unwrap()))
                .unwrap();
        let lo = exact_rate(
            &fig3(64, 0.0).with_adcs(AdcModel::bits(1).unwrap(), AdcModel::bits(2).unwrap()),
        )
        .unwrap();
        assert!(lo.rate[0] < hi.rate[0]);
    }

    #[test]
    fn monotone_in_pilot_power_loop_and_pairs() {
        let base = fig3(128, 10.0);
        let r = |c: &SystemConfig| exact_rate(c).unwrap().rate[0];
        assert!(r(&base.clone().with_pilot_power(20.0)) >= r(&base));
        assert!(r(&base.clone().with_loop_interference(2.0)) <= r(&base));
        let mut more = base.clone();
        more.pairs = 6;
        more.pilot_len = 6;
        more.beta_sr = vec![1.0; 6];
        more.beta_rd = vec![1.0; 6];
        assert!(r(&more) <= r(&base));
    }

    #[test]
    fn permuting_users_permutes_rates() {
        let cfg =
            fig3(64, 5.0).with_betas(vec![0.4, 1.0, 1.7, 0.9, 2.2], vec![1.1, 0.3, 0.8, 1.9, 1.0]);
        let perm = [3, 0, 4, 1, 2];
        let permuted = cfg.clone().with_betas(
            perm.iter().map(|&i| cfg.beta_sr[i]).collect(),
            perm.iter().map(|&i| cfg.beta_rd[i]).collect(),
        );
        let a = exact_rate(&cfg).unwrap();
        let b = exact_rate(&permuted).unwrap();
        for (slot, &i) in perm.iter().enumerate() {
            assert!((b.rate[slot] - a.rate[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sinr_identity_holds() {
        let b = exact_rate(&fig3(64, 20.0)).unwrap();
        for k in 0..5 {
            let den: f64 = (1..8).map(|i| b.term(i)[k]).sum();
            assert!((b.sinr[k] - b.desired[k] / den).abs() < 1e-12 * b.sinr[k]);
        }
        assert!((b.sum_rate - b.rate.iter().sum::<f64>()).abs() < 1e-12);
    }
}
