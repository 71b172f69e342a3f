use crate::adc::AdcModel;
use crate::error::{Error, Result};

/// Converts a power ratio in dB to linear scale.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Scenario parameters of the multipair full-duplex relay.
///
/// All powers are linear. `beta_sr[k]` and `beta_rd[k]` are the large-scale
/// gains of source `k` to the relay and of the relay to destination `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Relay antennas `M`.
    pub antennas: usize,
    /// User pairs `K`.
    pub pairs: usize,
    /// Coherence interval in symbols.
    pub coherence_len: usize,
    /// Pilot length per training phase.
    pub pilot_len: usize,
    pub source_power: f64,
    pub relay_power: f64,
    pub pilot_power: f64,
    /// Residual loop-interference variance.
    pub loop_interference: f64,
    pub beta_sr: Vec<f64>,
    pub beta_rd: Vec<f64>,
    pub relay_adc: AdcModel,
    pub dest_adc: AdcModel,
}

impl SystemConfig {
    /// Coherence interval used throughout the numerical study (LTE-like).
    pub const DEFAULT_COHERENCE_LEN: usize = 196;

    /// Homogeneous scenario (all betas 1) with unit powers, 0.1 loop
    /// interference, perfect ADCs, `pilot_len = pairs` and the default
    /// coherence interval.
    pub fn homogeneous(antennas: usize, pairs: usize) -> Self {
        Self {
            antennas,
            pairs,
            coherence_len: Self::DEFAULT_COHERENCE_LEN,
            pilot_len: pairs,
            source_power: 1.0,
            relay_power: 1.0,
            pilot_power: 1.0,
            loop_interference: 0.1,
            beta_sr: vec![1.0; pairs],
            beta_rd: vec![1.0; pairs],
            relay_adc: AdcModel::perfect(),
            dest_adc: AdcModel::perfect(),
        }
    }

    pub fn with_antennas(mut self, antennas: usize) -> Self {
        self.antennas = antennas;
        self
    }

    pub fn with_source_power(mut self, p: f64) -> Self {
        self.source_power = p;
        self
    }

    pub fn with_relay_power(mut self, p: f64) -> Self {
        self.relay_power = p;
        self
    }

    pub fn with_pilot_power(mut self, p: f64) -> Self {
        self.pilot_power = p;
        self
    }

    pub fn with_loop_interference(mut self, sigma2: f64) -> Self {
        self.loop_interference = sigma2;
        self
    }

    pub fn with_adcs(mut self, relay: AdcModel, dest: AdcModel) -> Self {
        self.relay_adc = relay;
        self.dest_adc = dest;
        self
    }

    pub fn with_betas(mut self, beta_sr: Vec<f64>, beta_rd: Vec<f64>) -> Self {
        self.beta_sr = beta_sr;
        self.beta_rd = beta_rd;
        self
    }

    /// Relay distortion factor `alpha`.
    #[inline]
    pub fn alpha(&self) -> f64 {
        self.relay_adc.rho
    }

    /// Destination distortion factor `theta`.
    #[inline]
    pub fn theta(&self) -> f64 {
        self.dest_adc.rho
    }

    /// Fraction of the coherence interval left for data,
    /// `(coherence_len - 2 pilot_len) / coherence_len`.
    pub fn prelog(&self) -> f64 {
        (self.coherence_len - 2 * self.pilot_len) as f64 / self.coherence_len as f64
    }

    pub fn is_homogeneous(&self) -> bool {
        self.beta_sr.iter().chain(&self.beta_rd).all(|&b| b == 1.0)
    }

    /// Checks every scenario invariant and names the first one violated.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.antennas == 0 {
            return fail("M must be at least 1".into());
        }
        if self.pairs == 0 {
            return fail("K must be at least 1".into());
        }
        if self.pilot_len < self.pairs {
            return fail(format!(
                "tau_p >= K violated (tau_p = {}, K = {})",
                self.pilot_len, self.pairs
            ));
        }
        if self.coherence_len < 2 * self.pilot_len {
            return fail(format!(
                "tau_c >= 2 tau_p violated (tau_c = {}, tau_p = {})",
                self.coherence_len, self.pilot_len
            ));
        }
        for (name, p) in [
            ("p_S", self.source_power),
            ("p_R", self.relay_power),
            ("p_p", self.pilot_power),
        ] {
            if !(p.is_finite() && p > 0.0) {
                return fail(format!("{name} must be positive and finite, got {p}"));
            }
        }
        if !(self.loop_interference.is_finite() && self.loop_interference >= 0.0) {
            return fail(format!(
                "sigma_LI2 must be nonnegative and finite, got {}",
                self.loop_interference
            ));
        }
        for (name, betas) in [("beta_SR", &self.beta_sr), ("beta_RD", &self.beta_rd)] {
            if betas.len() != self.pairs {
                return fail(format!(
                    "{name} has length {}, expected K = {}",
                    betas.len(),
                    self.pairs
                ));
            }
            if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
                return fail(format!("{name} entries must be positive, got {b}"));
            }
        }
        for (name, adc) in [("relay_adc", &self.relay_adc), ("dest_adc", &self.dest_adc)] {
            if !(adc.rho > 0.0 && adc.rho <= 1.0) {
                return fail(format!(
                    "{name} distortion factor {} outside (0, 1]",
                    adc.rho
                ));
            }
        }
        Ok(())
    }
}
