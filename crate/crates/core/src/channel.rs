//! Channel realizations, quantized pilot training and MMSE estimation.
//!
//! Pilots are identity matrices with `pilot_len == pairs`; column `k` of the
//! received pilot block is `sqrt(tau_p p_p) g_k + n_k`. After the relay AQNM the
//! MMSE filter reduces to a per-column scaling
//! `g_hat_k = c_k y~_k / sqrt(tau_p p_p)` with `c_k = tau_p p_p beta_k / (1 + tau_p p_p beta_k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::adc::aqnm_transform;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::random::fill_complex_normal;

pub type CMatrix = DMatrix<Complex64>;

/// One draw of the propagation channels.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Sources to relay, `M x K`.
    pub g_sr: CMatrix,
    /// Relay to destinations, `M x K`.
    pub g_rd: CMatrix,
    /// Residual loop interference, `M x M`.
    pub g_rr: CMatrix,
}

/// MMSE estimates and the matching estimation errors (`G = G_hat + E`).
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    pub g_sr_hat: CMatrix,
    pub g_rd_hat: CMatrix,
    pub err_sr: CMatrix,
    pub err_rd: CMatrix,
}

/// Per-entry variances of the estimates and of the estimation errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationStats {
    pub sigma2_sr: Vec<f64>,
    pub sigma2err_sr: Vec<f64>,
    pub sigma2_rd: Vec<f64>,
    pub sigma2err_rd: Vec<f64>,
}

/// `M x K` matrix whose column `k` is i.i.d. `CN(0, betas[k])`, filled column by column.
pub(crate) fn draw_link<R: Rng + ?Sized>(rng: &mut R, antennas: usize, betas: &[f64]) -> CMatrix {
    let mut data = vec![Complex64::default(); antennas * betas.len()];
    for (col, &beta) in data.chunks_exact_mut(antennas).zip(betas) {
        fill_complex_normal(rng, beta, col);
    }
    CMatrix::from_vec(antennas, betas.len(), data)
}

/// Fills one loop-channel column with unit-variance entries.
#[inline]
pub(crate) fn draw_loop_column<R: Rng + ?Sized>(rng: &mut R, col: &mut [Complex64]) {
    fill_complex_normal(rng, 1.0, col);
}

/// Draws `G_SR`, `G_RD` and `G_RR`, in that order, from `rng`.
///
/// `G_RR` is generated column by column with unit variance and then scaled by
/// `sqrt(sigma_LI2)`, so `sigma_LI2 = 0` yields an exactly zero matrix.
pub fn draw_channels<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Result<ChannelSet> {
    config.validate()?;
    let m = config.antennas;
    let g_sr = draw_link(rng, m, &config.beta_sr);
    let g_rd = draw_link(rng, m, &config.beta_rd);
    let scale = config.loop_interference.sqrt();
    let mut data = vec![Complex64::default(); m * m];
    for col in data.chunks_exact_mut(m) {
        draw_loop_column(rng, col);
        for z in col.iter_mut() {
            *z *= scale;
        }
    }
    Ok(ChannelSet {
        g_sr,
        g_rd,
        g_rr: CMatrix::from_vec(m, m, data),
    })
}

/// Closed-form estimate and error variances for the relay distortion factor
/// `alpha`:
///
/// `sigma2 = alpha tau_p p_p beta^2 / (1 + tau_p p_p beta)`, `sigma2err = beta - sigma2`.
pub fn estimation_stats(config: &SystemConfig) -> Result<EstimationStats> {
    config.validate()?;
    let alpha = config.alpha();
    let snr = config.pilot_len as f64 * config.pilot_power;
    let split = |betas: &[f64]| -> (Vec<f64>, Vec<f64>) {
        betas
            .iter()
            .map(|&b| {
                let est = alpha * snr * b * b / (1.0 + snr * b);
                let err = (b + (1.0 - alpha) * snr * b * b) / (1.0 + snr * b);
                (est, err)
            })
            .unzip()
    };
    let (sigma2_sr, sigma2err_sr) = split(&config.beta_sr);
    let (sigma2_rd, sigma2err_rd) = split(&config.beta_rd);
    Ok(EstimationStats {
        sigma2_sr,
        sigma2err_sr,
        sigma2_rd,
        sigma2err_rd,
    })
}

fn estimate_link<R: Rng + ?Sized>(
    g: &CMatrix,
    betas: &[f64],
    alpha: f64,
    snr: f64,
    rng: &mut R,
) -> Result<(CMatrix, CMatrix)> {
    let m = g.nrows();
    let amp = snr.sqrt();
    let mut noise = vec![Complex64::default(); m];
    let mut g_hat = CMatrix::zeros(m, betas.len());
    for (k, &beta) in betas.iter().enumerate() {
        fill_complex_normal(rng, 1.0, &mut noise);
        let received: Vec<Complex64> = g
            .column(k)
            .iter()
            .zip(&noise)
            .map(|(gi, ni)| gi * amp + ni)
            .collect();
        // statistical per-entry input power, diag(tau_p p_p D + I)
        let power = vec![snr * beta + 1.0; m];
        let (quantized, _) = aqnm_transform(&received, alpha, &power, rng)?;
        let filter = snr * beta / (1.0 + snr * beta) / amp;
        for (dst, y) in g_hat.column_mut(k).iter_mut().zip(&quantized) {
            *dst = y * filter;
        }
    }
    let err = g - &g_hat;
    Ok((g_hat, err))
}

/// Synthesizes both quantized pilot phases for `channels` and applies the
/// closed-form MMSE filter.
///
/// Only identity pilots with `pilot_len == pairs` are supported.
pub fn simulate_pilot_estimation<R: Rng + ?Sized>(
    channels: &ChannelSet,
    config: &SystemConfig,
    rng: &mut R,
) -> Result<ChannelEstimate> {
    estimate_links(&channels.g_sr, &channels.g_rd, config, rng)
}

/// Pilot phase for the two user links only; the loop channel plays no role in
/// training.
pub(crate) fn estimate_links<R: Rng + ?Sized>(
    g_sr: &CMatrix,
    g_rd: &CMatrix,
    config: &SystemConfig,
    rng: &mut R,
) -> Result<ChannelEstimate> {
    config.validate()?;
    if config.pilot_len != config.pairs {
        return Err(Error::UnsupportedPilotGeometry {
            pilot_len: config.pilot_len,
            pairs: config.pairs,
        });
    }
    let expected = (config.antennas, config.pairs);
    for g in [g_sr, g_rd] {
        if g.shape() != expected {
            return Err(Error::DimensionMismatch {
                expected: expected.0 * expected.1,
                actual: g.len(),
            });
        }
    }
    let snr = config.pilot_len as f64 * config.pilot_power;
    let alpha = config.alpha();
    let (g_sr_hat, err_sr) = estimate_link(g_sr, &config.beta_sr, alpha, snr, rng)?;
    let (g_rd_hat, err_rd) = estimate_link(g_rd, &config.beta_rd, alpha, snr, rng)?;
    Ok(ChannelEstimate {
        g_sr_hat,
        g_rd_hat,
        err_sr,
        err_rd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adc::AdcModel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_loop_interference_gives_zero_matrix() {
        let cfg = SystemConfig::homogeneous(6, 2).with_loop_interference(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = draw_channels(&cfg, &mut rng).unwrap();
        assert!(ch.g_rr.iter().all(|z| z.re == 0.0 && z.im == 0.0));
    }

    #[test]
    fn unit_beta_entry_variance() {
        let cfg = SystemConfig::homogeneous(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 12_500; // 10^5 entries of G_SR
        let mut acc = 0.0;
        for _ in 0..draws {
            let ch = draw_channels(&cfg, &mut rng).unwrap();
            acc += ch.g_sr.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let var = acc / (draws * 8) as f64;
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn column_variances_follow_betas() {
        let cfg = SystemConfig::homogeneous(64, 2)
            .with_betas(vec![2.0, 0.5], vec![1.0, 1.0])
            .with_loop_interference(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let draws = 10_000;
        let mut acc = [0.0; 2];
        for _ in 0..draws {
            let ch = draw_channels(&cfg, &mut rng).unwrap();
            for (k, a) in acc.iter_mut().enumerate() {
                *a += ch.g_sr.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        let n = (draws * 64) as f64;
        assert!((acc[0] / n / 2.0 - 1.0).abs() < 0.03);
        assert!((acc[1] / n / 0.5 - 1.0).abs() < 0.03);
    }

    #[test]
    fn stats_conserve_beta() {
        let cfg = SystemConfig::homogeneous(16, 3)
            .with_betas(vec![0.3, 1.0, 2.7], vec![1.9, 0.11, 1.0])
            .with_adcs(AdcModel::bits(1).unwrap(), AdcModel::perfect())
            .with_pilot_power(3.3);
        let st = estimation_stats(&cfg).unwrap();
        for k in 0..3 {
            let sr = st.sigma2_sr[k] + st.sigma2err_sr[k];
            let rd = st.sigma2_rd[k] + st.sigma2err_rd[k];
            assert!((sr / cfg.beta_sr[k] - 1.0).abs() < 1e-12);
            assert!((rd / cfg.beta_rd[k] - 1.0).abs() < 1e-12);
            assert!(st.sigma2_sr[k] >= 0.0 && st.sigma2_sr[k] <= cfg.beta_sr[k]);
        }
    }

    #[test]
    fn two_bit_stats_value() {
        let cfg = SystemConfig::homogeneous(16, 5)
            .with_adcs(AdcModel::bits(2).unwrap(), AdcModel::perfect())
            .with_pilot_power(10.0);
        let st = estimation_stats(&cfg).unwrap();
        assert!((st.sigma2_sr[0] - 0.8825 * 50.0 / 51.0).abs() < 1e-15);
        assert!((st.sigma2err_sr[0] - (1.0 - 0.8825 * 50.0 / 51.0)).abs() < 1e-15);
    }

    #[test]
    fn perfect_training_limit() {
        let cfg = SystemConfig::homogeneous(8, 2).with_pilot_power(1e12);
        let st = estimation_stats(&cfg).unwrap();
        assert!((st.sigma2_sr[0] - 1.0).abs() < 1e-9);
        assert!(st.sigma2err_sr[0] < 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = draw_channels(&cfg, &mut rng).unwrap();
        let est = simulate_pilot_estimation(&ch, &cfg, &mut rng).unwrap();
        let err = est.err_sr.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn decomposition_reconstructs_channel() {
        let cfg = SystemConfig::homogeneous(8, 3)
            .with_adcs(AdcModel::bits(2).unwrap(), AdcModel::perfect());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ch = draw_channels(&cfg, &mut rng).unwrap();
        let est = simulate_pilot_estimation(&ch, &cfg, &mut rng).unwrap();
        // E is formed as G - G_hat, so the sum is exact up to one rounding
        for (hat, err, g) in [
            (&est.g_sr_hat, &est.err_sr, &ch.g_sr),
            (&est.g_rd_hat, &est.err_rd, &ch.g_rd),
        ] {
            for ((h, e), g) in hat.iter().zip(err.iter()).zip(g.iter()) {
                let d = (h + e - g).norm();
                assert!(d <= 2.0 * f64::EPSILON * (h.norm() + e.norm()), "{d}");
            }
        }
    }

    #[test]
    fn rejects_longer_pilots() {
        let mut cfg = SystemConfig::homogeneous(8, 3);
        cfg.pilot_len = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = draw_channels(&cfg, &mut rng).unwrap();
        assert_eq!(
            simulate_pilot_estimation(&ch, &cfg, &mut rng).unwrap_err(),
            Error::UnsupportedPilotGeometry {
                pilot_len: 4,
                pairs: 3
            }
        );
    }
}
