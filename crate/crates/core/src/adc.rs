//! Additive quantization noise model (AQNM) for low-resolution ADCs.
//!
//! A `b`-bit non-uniform quantizer is replaced by a linear gain `rho` plus an
//! uncorrelated Gaussian noise whose variance is `rho (1 - rho)` times the
//! input power. The model is known to be accurate at low SNR; no SNR guard is
//! enforced here.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::random::complex_normal;

/// Optimal non-uniform quantizer distortion factors for 1..=5 bits.
pub const DISTORTION_TABLE: [f64; 5] = [0.6366, 0.8825, 0.96546, 0.990503, 0.997501];

/// Resolutions above this are treated as perfect.
pub const MAX_BITS: u32 = 64;

/// ADC resolution in bits, or an ideal (unquantized) converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Bits(u32),
    Infinite,
}

impl Resolution {
    /// Validates a signed bit count.
    pub fn from_bits(bits: i64) -> Result<Self> {
        if bits < 1 {
            return Err(Error::InvalidBits(bits));
        }
        Ok(Resolution::Bits(u32::try_from(bits).unwrap_or(u32::MAX)))
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Bits(b) => write!(f, "{b}"),
            Resolution::Infinite => f.write_str("infinite"),
        }
    }
}

/// AQNM distortion factor for a given resolution.
///
/// Tabulated values for 1 to 5 bits, `1 - (pi sqrt(3) / 2) 2^(-2b)` above,
/// exactly 1 for an ideal converter or more than [`MAX_BITS`] bits.
pub fn distortion_factor(resolution: Resolution) -> Result<f64> {
    match resolution {
        Resolution::Infinite => Ok(1.0),
        Resolution::Bits(0) => Err(Error::InvalidBits(0)),
        Resolution::Bits(b) if b <= 5 => Ok(DISTORTION_TABLE[b as usize - 1]),
        Resolution::Bits(b) if b > MAX_BITS => Ok(1.0),
        Resolution::Bits(b) => Ok(1.0 - 0.5 * PI * 3f64.sqrt() * 2f64.powi(-2 * b as i32)),
    }
}

/// An ADC described by its resolution and AQNM distortion factor
/// (`alpha` at the relay, `theta` at a destination).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcModel {
    /// `None` when the model was built directly from a distortion factor.
    pub resolution: Option<Resolution>,
    pub rho: f64,
}

impl AdcModel {
    pub fn new(resolution: Resolution) -> Result<Self> {
        Ok(Self {
            resolution: Some(resolution),
            rho: distortion_factor(resolution)?,
        })
    }

    pub fn bits(bits: u32) -> Result<Self> {
        Self::new(Resolution::Bits(bits))
    }

    pub fn perfect() -> Self {
        Self {
            resolution: Some(Resolution::Infinite),
            rho: 1.0,
        }
    }

    /// Builds a model from a raw distortion factor in (0, 1].
    pub fn with_distortion(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidDistortion(rho));
        }
        Ok(Self {
            resolution: None,
            rho,
        })
    }

    pub fn is_perfect(&self) -> bool {
        self.rho == 1.0
    }
}

/// Applies the AQNM to `input`: `rho * y + n_q`, with `n_q` element-wise
/// `CN(0, rho (1 - rho) p_i)` where `p_i = input_power[i]` is the conditional
/// input power `E{|y_i|^2}`.
///
/// Returns the quantized vector and the diagonal of the quantization noise
/// covariance.
pub fn aqnm_transform<R: Rng + ?Sized>(
    input: &[Complex64],
    rho: f64,
    input_power: &[f64],
    rng: &mut R,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if input.len() != input_power.len() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            actual: input_power.len(),
        });
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidDistortion(rho));
    }
    let gain = rho * (1.0 - rho);
    let noise_var: Vec<f64> = input_power.iter().map(|p| gain * p).collect();
    let output = input
        .iter()
        .zip(&noise_var)
        .map(|(y, &v)| {
            if v > 0.0 {
                y * rho + complex_normal(rng, v)
            } else {
                y * rho
            }
        })
        .collect();
    Ok((output, noise_var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_values() {
        assert_eq!(distortion_factor(Resolution::Bits(1)).unwrap(), 0.6366);
        assert_eq!(distortion_factor(Resolution::Bits(2)).unwrap(), 0.8825);
        assert_eq!(distortion_factor(Resolution::Bits(5)).unwrap(), 0.997501);
        assert_eq!(distortion_factor(Resolution::Infinite).unwrap(), 1.0);
    }

    #[test]
    fn six_bits_uses_formula() {
        let rho = distortion_factor(Resolution::Bits(6)).unwrap();
        assert!((rho - 0.9993358).abs() < 1e-7);
    }

    #[test]
    fn rejects_zero_and_negative_bits() {
        assert_eq!(
            distortion_factor(Resolution::Bits(0)),
            Err(Error::InvalidBits(0))
        );
        assert_eq!(Resolution::from_bits(-3), Err(Error::InvalidBits(-3)));
        assert!(Resolution::from_bits(4).is_ok());
    }

    #[test]
    fn strictly_increasing_then_saturates() {
        let mut prev = 0.0;
        for b in 1..=26 {
            let rho = distortion_factor(Resolution::Bits(b)).unwrap();
            assert!(rho > prev, "b = {b}");
            assert!(rho <= 1.0);
            prev = rho;
        }
        assert_eq!(distortion_factor(Resolution::Bits(65)).unwrap(), 1.0);
        assert_eq!(distortion_factor(Resolution::Bits(u32::MAX)).unwrap(), 1.0);
    }

    #[test]
    fn table_boundary_is_continuous() {
        let formula = 1.0 - 0.5 * PI * 3f64.sqrt() * 2f64.powi(-10);
        assert!((DISTORTION_TABLE[4] - formula).abs() < 5e-4);
    }

    #[test]
    fn perfect_quantizer_adds_no_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = vec![Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5)];
        let (out, cov) = aqnm_transform(&y, 1.0, &[1.0, 4.0], &mut rng).unwrap();
        assert_eq!(out, y);
        assert_eq!(cov, vec![0.0, 0.0]);
    }

    #[test]
    fn zero_input_stays_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = vec![Complex64::new(0.0, 0.0); 3];
        let (out, cov) = aqnm_transform(&y, 0.8825, &[0.0; 3], &mut rng).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));
        assert_eq!(cov, vec![0.0; 3]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(
            aqnm_transform(&y, 0.9, &[1.0; 2], &mut rng),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn noise_variance_and_output_power() {
        // unit-power Gaussian input, one-bit distortion
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let rho = 0.6366;
        let n = 100_000;
        let y: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let (out, cov) = aqnm_transform(&y, rho, &vec![1.0; n], &mut rng).unwrap();
        assert!((cov[0] - rho * (1.0 - rho)).abs() < 1e-15);

        let noise_power: f64 = out
            .iter()
            .zip(&y)
            .map(|(o, y)| (o - y * rho).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((noise_power / 0.231_34 - 1.0).abs() < 0.01, "{noise_power}");

        let out_power: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((out_power / rho - 1.0).abs() < 0.01, "{out_power}");
    }

    #[test]
    fn with_distortion_validates_range() {
        assert!(AdcModel::with_distortion(0.0).is_err());
        assert!(AdcModel::with_distortion(1.2).is_err());
        assert!(AdcModel::with_distortion(f64::NAN).is_err());
        assert!(AdcModel::with_distortion(1.0).unwrap().is_perfect());
    }
}
