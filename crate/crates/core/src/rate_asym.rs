//! Large-array approximation of the achievable rate and the results built on
//! it: infinite-antenna limit, power-scaling limit, ADC placement cases and the
//! half-duplex reference.
//!
//! The approximate terms are the exact ones divided by `M^3` with lower-order
//! contributions dropped. They share [`RateBreakdown`] with the exact evaluator
//! but carry no gain (`gamma = NaN`).

use crate::adc::AdcModel;
use crate::channel::estimation_stats;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rate_exact::{sum_descending, Moments, RateBreakdown};

/// Destination distortion factors above this are treated as ideal when
/// evaluating the infinite-antenna limit.
pub const THETA_ONE_GUARD: f64 = 1.0 - 1e-12;

/// Infinite-antenna rate of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitRate {
    Finite(f64),
    /// Ideal destination ADCs: the rate grows without bound in `M`.
    Unbounded,
}

impl LimitRate {
    pub fn finite(self) -> Option<f64> {
        match self {
            LimitRate::Finite(r) => Some(r),
            LimitRate::Unbounded => None,
        }
    }
}

/// Everything the asymptotic analysis produces for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub approx: RateBreakdown,
    pub limit: Vec<LimitRate>,
    pub scaled_limit: Vec<f64>,
    pub half_duplex: RateBreakdown,
}

/// Which variant of the destination-quantization term to use.
#[derive(Clone, Copy, PartialEq)]
enum DestTerm {
    General,
    /// Ideal relay ADCs; the gain-dependent tail is absent.
    IdealRelay,
}

fn approx_terms(config: &SystemConfig, dest: DestTerm) -> Result<RateBreakdown> {
    let stats = estimation_stats(config)?;
    let mo = Moments::new(config, &stats);
    let kk = config.pairs;
    let m = config.antennas as f64;
    let a = config.alpha();
    let t = config.theta();
    let (p_s, p_r) = (config.source_power, config.relay_power);
    let li = p_r * config.loop_interference + 1.0;
    let q_relay = (1.0 - a) / a;
    let q_dest = (1.0 - t) / t;
    let q_both = (1.0 - a) * (1.0 - t) / (a * t);
    let (s, r) = (&mo.s, &mo.r);
    let (bs, br) = (&mo.beta_sr, &mo.beta_rd);
    let sb = mo.sum_beta_sr;

    let mut out = RateBreakdown::empty(kk, f64::NAN);
    for k in 0..kk {
        let (sk, rk) = (s[k], r[k]);
        out.desired[k] = p_s * m * sk * rk;
        out.estimation_error[k] = p_s * (bs[k] * rk + br[k] * sk);
        out.interpair[k] = p_s
            * (0..kk)
                .filter(|&j| j != k)
                .map(|j| rk * bs[j] + br[k] * s[j] * s[j] * r[j] / (sk * rk))
                .sum::<f64>();
        out.loop_interference[k] = p_r * config.loop_interference * rk;
        out.relay_noise[k] = rk;
        out.relay_quantization[k] = q_relay * rk * (p_s * (sk + sb) + li);
        let tail = p_s * mo.sum_s2r / (p_r * sk * rk);
        out.destination_noise[k] = tail;
        let mut h = match dest {
            DestTerm::General => [
                q_dest * p_s * (m * sk * rk + sk * br[k] / rk * mo.sum_r),
                q_dest * p_s * rk * (sb + li / (a * p_s)),
                q_both * rk * p_s * (sk + sb),
                q_dest * tail,
            ],
            DestTerm::IdealRelay => [
                q_dest * p_s * (m * sk * rk + sk * br[k] / rk * mo.sum_r),
                q_dest * p_s * rk * (sb + li / p_s),
                0.0,
                0.0,
            ],
        };
        out.destination_quantization[k] = sum_descending(&mut h);
    }
    out.finish(config.prelog());
    Ok(out)
}

/// Large-array approximation of every user's SINR terms and rate.
pub fn approx_rate(config: &SystemConfig) -> Result<RateBreakdown> {
    approx_terms(config, DestTerm::General)
}

/// Rate of every user as `M -> infinity`; independent of the relay ADCs.
pub fn limit_rate_infinite_m(config: &SystemConfig) -> Result<Vec<LimitRate>> {
    config.validate()?;
    let t = config.theta();
    let value = if t > THETA_ONE_GUARD {
        LimitRate::Unbounded
    } else {
        LimitRate::Finite(config.prelog() * (1.0 + t / (1.0 - t)).log2())
    };
    Ok(vec![value; config.pairs])
}

/// Rate of every user as `M -> infinity` when `p_S = e_s / M` and
/// `p_R = e_r / M` with the pilot power held fixed. The powers in `config`
/// are ignored.
pub fn scaled_power_limit(config: &SystemConfig, e_s: f64, e_r: f64) -> Result<Vec<f64>> {
    for (name, e) in [("E_S", e_s), ("E_R", e_r)] {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "{name} must be positive and finite, got {e}"
            )));
        }
    }
    let stats = estimation_stats(config)?;
    let mo = Moments::new(config, &stats);
    let a = config.alpha();
    let t = config.theta();
    Ok((0..config.pairs)
        .map(|k| {
            let (sk, rk) = (mo.s[k], mo.r[k]);
            let den = 1.0 - t + 1.0 / (a * e_s * sk) + mo.sum_s2r / (e_r * sk * sk * rk * rk);
            config.prelog() * (1.0 + t / den).log2()
        })
        .collect())
}

/// Rates with one-sided quantization: `(relay_only, dest_only)`.
///
/// `relay_only` quantizes at the relay with distortion `rho` and keeps ideal
/// destination ADCs; `dest_only` does the opposite. The ADC models in
/// `config` are replaced.
pub fn placement_rates(config: &SystemConfig, rho: f64) -> Result<(RateBreakdown, RateBreakdown)> {
    let adc = AdcModel::with_distortion(rho)?;
    let relay_only = config.clone().with_adcs(adc, AdcModel::perfect());
    let dest_only = config.clone().with_adcs(AdcModel::perfect(), adc);
    Ok((
        approx_terms(&relay_only, DestTerm::General)?,
        approx_terms(&dest_only, DestTerm::IdealRelay)?,
    ))
}

/// Half-duplex rate under the same total energy per coherence interval.
///
/// Pass the full-duplex configuration: source and relay powers are doubled
/// internally, the data prelog is halved and loop interference is absent.
/// The returned terms are the doubled-power ones, so `sinr = desired / sum`.
pub fn half_duplex_rate(config: &SystemConfig) -> Result<RateBreakdown> {
    let fd = approx_terms(config, DestTerm::General)?;
    let stats = estimation_stats(config)?;
    let mo = Moments::new(config, &stats);
    let a = config.alpha();
    let t = config.theta();
    let p2 = 2.0 * config.source_power;
    let q_relay = (1.0 - a) / a;
    let q_dest = (1.0 - t) / t;
    let q_both = (1.0 - a) * (1.0 - t) / (a * t);
    let m = config.antennas as f64;
    let sb = mo.sum_beta_sr;

    let mut out = RateBreakdown::empty(config.pairs, f64::NAN);
    for k in 0..config.pairs {
        let (sk, rk) = (mo.s[k], mo.r[k]);
        out.desired[k] = 2.0 * fd.desired[k];
        out.estimation_error[k] = 2.0 * fd.estimation_error[k];
        out.interpair[k] = 2.0 * fd.interpair[k];
        out.loop_interference[k] = 0.0;
        out.relay_noise[k] = fd.relay_noise[k];
        out.relay_quantization[k] = q_relay * rk * (p2 * (sk + sb) + 1.0);
        out.destination_noise[k] = fd.destination_noise[k];
        let mut h = [
            q_dest * p2 * (m * sk * rk + sk * mo.beta_rd[k] / rk * mo.sum_r),
            q_dest * p2 * rk * (sb + 1.0 / (a * p2)),
            q_both * rk * p2 * (sk + sb),
            q_dest * fd.destination_noise[k],
        ];
        out.destination_quantization[k] = sum_descending(&mut h);
    }
    out.finish(0.5 * config.prelog());
    Ok(out)
}

/// Evaluates all asymptotic quantities; `e_s`, `e_r` feed the power-scaling limit.
pub fn asymptotic_report(config: &SystemConfig, e_s: f64, e_r: f64) -> Result<AsymptoticReport> {
    Ok(AsymptoticReport {
        approx: approx_rate(config)?,
        limit: limit_rate_infinite_m(config)?,
        scaled_limit: scaled_power_limit(config, e_s, e_r)?,
        half_duplex: half_duplex_rate(config)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::db_to_linear;
    use crate::rate_exact::exact_rate;

    fn two_bit(m: usize) -> SystemConfig {
        let adc = AdcModel::bits(2).unwrap();
        SystemConfig::homogeneous(m, 5)
            .with_adcs(adc, adc)
            .with_pilot_power(10.0)
            .with_relay_power(10.0)
            .with_loop_interference(1.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn close_to_exact_at_moderate_m() {
        for p_db in [0.0, 10.0, 20.0, 30.0] {
            let cfg = two_bit(64).with_source_power(db_to_linear(p_db));
            let a = approx_rate(&cfg).unwrap();
            let e = exact_rate(&cfg).unwrap();
            assert!(rel(a.rate[0], e.rate[0]) < 0.05, "{p_db}");
        }
    }

    #[test]
    fn converges_at_large_m() {
        let cfg =
            two_bit(4096).with_betas(vec![0.3, 1.0, 1.5, 0.8, 2.0], vec![1.0, 0.6, 1.2, 1.9, 0.4]);
        let a = approx_rate(&cfg).unwrap();
        let e = exact_rate(&cfg).unwrap();
        for k in 0..5 {
            assert!(rel(a.rate[k], e.rate[k]) < 0.005);
        }
    }

    #[test]
    fn error_shrinks_with_m() {
        let betas = [
            (vec![0.2, 1.1, 1.9], vec![0.5, 1.6, 0.1]),
            (vec![1.3, 0.4, 0.7], vec![1.8, 0.9, 1.2]),
            (vec![0.1, 2.0, 0.6], vec![0.7, 0.3, 1.5]),
        ];
        for (bs, br) in betas {
            let mut prev = f64::INFINITY;
            for m in [16, 64, 256, 1024] {
                let mut cfg = two_bit(m).with_betas(bs.clone(), br.clone());
                cfg.pairs = 3;
                cfg.pilot_len = 3;
                let a = approx_rate(&cfg).unwrap().sum_rate;
                let e = exact_rate(&cfg).unwrap().sum_rate;
                let err = rel(a, e);
                assert!(err < prev, "M = {m}: {err} >= {prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn ideal_single_pair_matches_exact_leading_terms() {
        let mut cfg = SystemConfig::homogeneous(10_000, 1).with_loop_interference(0.0);
        cfg.pilot_len = 1;
        let a = approx_rate(&cfg).unwrap();
        assert_eq!(a.relay_quantization[0], 0.0);
        assert_eq!(a.destination_quantization[0], 0.0);
        let e = exact_rate(&cfg).unwrap();
        assert!(rel(a.sinr[0], e.sinr[0]) < 1e-3);
    }

    #[test]
    fn limit_value_and_alpha_independence() {
        let cfg = two_bit(64);
        let lim = limit_rate_infinite_m(&cfg).unwrap()[0].finite().unwrap();
        let expect = 186.0 / 196.0 * (1.0 + 0.8825 / 0.1175f64).log2();
        assert!((lim - expect).abs() < 1e-12);
        let one_bit = cfg
            .clone()
            .with_adcs(AdcModel::bits(1).unwrap(), cfg.dest_adc);
        let perfect = cfg.clone().with_adcs(AdcModel::perfect(), cfg.dest_adc);
        assert_eq!(
            limit_rate_infinite_m(&one_bit).unwrap(),
            limit_rate_infinite_m(&perfect).unwrap()
        );

        let far = approx_rate(&cfg.with_antennas(10_000_000)).unwrap();
        assert!(rel(far.rate[0], lim) < 0.005);
    }

    #[test]
    fn ideal_destination_is_unbounded() {
        let cfg = two_bit(64).with_adcs(AdcModel::bits(2).unwrap(), AdcModel::perfect());
        assert!(limit_rate_infinite_m(&cfg)
            .unwrap()
            .iter()
            .all(|l| *l == LimitRate::Unbounded));
        let near = cfg.with_adcs(
            AdcModel::bits(2).unwrap(),
            AdcModel::with_distortion(1.0 - 1e-13).unwrap(),
        );
        assert_eq!(
            limit_rate_infinite_m(&near).unwrap()[0],
            LimitRate::Unbounded
        );
    }

    #[test]
    fn scaled_limit_matches_large_m() {
        let cfg = two_bit(1_000_000);
        let (e_s, e_r) = (20.0, 50.0);
        let lim = scaled_power_limit(&cfg, e_s, e_r).unwrap();
        let m = cfg.antennas as f64;
        let a = approx_rate(&cfg.with_source_power(e_s / m).with_relay_power(e_r / m)).unwrap();
        assert!(rel(a.rate[0], lim[0]) < 0.005);
    }

    #[test]
    fn scaled_limit_monotone_and_vanishing() {
        let cfg = two_bit(64).with_adcs(AdcModel::bits(2).unwrap(), AdcModel::perfect());
        let r = |es, er| scaled_power_limit(&cfg, es, er).unwrap()[0];
        assert!(r(2.0, 1.0) > r(1.0, 1.0));
        assert!(r(1.0, 2.0) > r(1.0, 1.0));
        assert!(r(1e-12, 1.0) < 1e-9);
        assert!(scaled_power_limit(&cfg, 0.0, 1.0).is_err());
    }

    #[test]
    fn placement_converges_at_ideal() {
        let cfg = two_bit(128);
        let ideal = approx_rate(
            &cfg.clone()
                .with_adcs(AdcModel::perfect(), AdcModel::perfect()),
        )
        .unwrap();
        let (r, d) = placement_rates(&cfg, 1.0 - 1e-12).unwrap();
        for k in 0..5 {
            assert!((r.rate[k] - ideal.rate[k]).abs() < 1e-9);
            assert!((d.rate[k] - ideal.rate[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn relay_placement_grows_like_log_m() {
        let cfg = two_bit(1000)
            .with_relay_power(1.0)
            .with_pilot_power(1.0)
            .with_loop_interference(0.1);
        let (r3, d3) = placement_rates(&cfg, 0.6366).unwrap();
        let (r4, d4) = placement_rates(&cfg.with_antennas(10_000), 0.6366).unwrap();
        let prelog = 186.0 / 196.0;
        // fit a from M = 10^3, predict M = 10^4
        let a = ((r3.rate[0] / prelog).exp2() - 1.0) / 1000.0;
        let predicted = prelog * (1.0 + a * 10_000.0).log2();
        assert!(rel(r4.rate[0], predicted) < 0.005);
        assert!(r4.rate[0] - r3.rate[0] >= 3.0 * prelog);
        assert!(d4.rate[0] - d3.rate[0] < 0.05);
    }

    #[test]
    fn half_duplex_ignores_loop_interference() {
        let cfg = two_bit(128);
        let a = half_duplex_rate(&cfg.clone().with_loop_interference(0.0)).unwrap();
        let b = half_duplex_rate(&cfg.with_loop_interference(10.0)).unwrap();
        assert_eq!(a.rate, b.rate);
    }

    #[test]
    fn duplex_ordering_follows_loop_interference() {
        let cfg = two_bit(128)
            .with_source_power(1.0)
            .with_relay_power(1.0)
            .with_pilot_power(1.0);
        let strong = cfg.clone().with_loop_interference(1e3);
        assert!(
            half_duplex_rate(&strong).unwrap().sum_rate > approx_rate(&strong).unwrap().sum_rate
        );
        let clean = cfg.with_loop_interference(0.0);
        assert!(approx_rate(&clean).unwrap().sum_rate > half_duplex_rate(&clean).unwrap().sum_rate);
    }

    #[test]
    fn report_collects_everything() {
        let rep = asymptotic_report(&two_bit(64), 1.0, 1.0).unwrap();
        assert_eq!(rep.limit.len(), 5);
        assert!(rep.approx.gamma.is_nan());
        assert!(rep.half_duplex.rate.iter().all(|&r| r >= 0.0));
    }
}
