//! Relay power allocation, full/half-duplex crossovers and inverse design.
//!
//! Power and loop-interference searches run on a log scale. All objectives use
//! the large-array approximation except [`required_antennas`], which uses the
//! exact rate because it is evaluated at moderate, integer `M`.

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rate_asym::{approx_rate, half_duplex_rate};
use crate::rate_exact::exact_rate;

/// Search interval `[lo, hi]` and stopping tolerance.
///
/// For power-like quantities the tolerance is on the natural log of the
/// variable, i.e. relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl SearchBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi.is_finite() && tol > 0.0) {
            return Err(Error::InvalidBracket { lo, hi, tol });
        }
        Ok(Self { lo, hi, tol })
    }

    /// `[1e-4, 1e4]` linear with relative tolerance `1e-4`.
    pub fn default_power() -> Self {
        Self {
            lo: 1e-4,
            hi: 1e4,
            tol: 1e-4,
        }
    }

    fn validated(&self) -> Result<Self> {
        Self::new(self.lo, self.hi, self.tol)
    }
}

impl Default for SearchBracket {
    fn default() -> Self {
        Self::default_power()
    }
}

/// Result of the relay power search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayPowerOptimum {
    pub relay_power: f64,
    pub sum_rate: f64,
    /// The coarse scan found more than one local maximum; the highest one was refined.
    pub multimodal: bool,
}

/// How the relay power follows the source power in [`required_source_power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerCoupling {
    /// Keep the relay power of the configuration.
    Fixed,
    /// `p_R = factor * p_S`.
    Proportional(f64),
}

impl PowerCoupling {
    /// `p_R = K p_S`.
    pub fn per_pair(config: &SystemConfig) -> Self {
        PowerCoupling::Proportional(config.pairs as f64)
    }

    fn apply(self, config: &SystemConfig, p_s: f64) -> SystemConfig {
        let cfg = config.clone().with_source_power(p_s);
        match self {
            PowerCoupling::Fixed => cfg,
            PowerCoupling::Proportional(c) => cfg.with_relay_power(c * p_s),
        }
    }
}

/// Minimal source power meeting a sum-rate target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequiredPower {
    pub source_power: f64,
    pub sum_rate: f64,
    /// Whether the sum rate was non-decreasing over a scan of the bracket.
    pub monotone: bool,
}

/// Closed-form optimal relay power for homogeneous large-scale fading,
/// `sqrt(alpha p_S K / sigma_LI2)`.
pub fn optimal_relay_power_homogeneous(config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    if !config.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if config.loop_interference == 0.0 {
        return Err(Error::ZeroLoopInterference);
    }
    Ok(
        (config.alpha() * config.source_power * config.pairs as f64 / config.loop_interference)
            .sqrt(),
    )
}

const SCAN_POINTS: usize = 33;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Maximizes the approximate sum rate over the relay power.
///
/// A coarse log-spaced scan locates the best cell and flags multiple local
/// maxima; golden-section search on `ln p_R` then refines it.
pub fn optimize_relay_power(
    config: &SystemConfig,
    bracket: SearchBracket,
) -> Result<RelayPowerOptimum> {
    let b = bracket.validated()?;
    config.validate()?;
    let objective = |p_r: f64| -> Result<f64> {
        Ok(approx_rate(&config.clone().with_relay_power(p_r))?.sum_rate)
    };

    let grid = log_grid(b.lo, b.hi, SCAN_POINTS);
    let values: Vec<f64> = grid.iter().map(|&p| objective(p)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(Error::NoInteriorMaximum { lo: b.lo, hi: b.hi });
    }
    let peaks = (1..SCAN_POINTS - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .count();

    let (mut lo, mut hi) = (grid[best - 1].ln(), grid[best + 1].ln());
    let f = |x: f64| objective(x.exp());
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > b.tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let p = (0.5 * (lo + hi)).exp();
    Ok(RelayPowerOptimum {
        relay_power: p,
        sum_rate: objective(p)?,
        multimodal: peaks > 1,
    })
}

fn duplex_gap(config: &SystemConfig) -> Result<f64> {
    Ok(approx_rate(config)?.sum_rate - half_duplex_rate(config)?.sum_rate)
}

/// Loop-interference level at which full- and half-duplex sum rates coincide
/// (bisection on `ln sigma_LI2`).
pub fn duplex_crossover_loop_interference(
    config: &SystemConfig,
    bracket: SearchBracket,
) -> Result<f64> {
    let b = bracket.validated()?;
    let gap = |x: f64| duplex_gap(&config.clone().with_loop_interference(x.exp()));
    let (mut lo, mut hi) = (b.lo.ln(), b.hi.ln());
    let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoCrossing { lo: b.lo, hi: b.hi });
    }
    let lo_sign = g_lo.signum();
    while hi - lo > b.tol {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g == 0.0 {
            return Ok(mid.exp());
        }
        if g.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Smallest antenna count in `[bracket.lo, bracket.hi]` (rounded) at which
/// full duplex reaches at least the half-duplex sum rate.
pub fn duplex_crossover_antennas(config: &SystemConfig, bracket: SearchBracket) -> Result<usize> {
    let b = bracket.validated()?;
    let (mut lo, mut hi) = (b.lo.round().max(1.0) as usize, b.hi.round() as usize);
    let gap = |m: usize| duplex_gap(&config.clone().with_antennas(m));
    if gap(lo)? >= 0.0 || gap(hi)? < 0.0 {
        return Err(Error::NoCrossing { lo: b.lo, hi: b.hi });
    }
    // invariant: gap(lo) < 0 <= gap(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if gap(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest source power whose approximate sum rate reaches `target`
/// (bisection on `ln p_S`, relay power set by `coupling`).
pub fn required_source_power(
    config: &SystemConfig,
    target: f64,
    bracket: SearchBracket,
    coupling: PowerCoupling,
) -> Result<RequiredPower> {
    let b = bracket.validated()?;
    let rate = |p: f64| -> Result<f64> { Ok(approx_rate(&coupling.apply(config, p))?.sum_rate) };
    let best = rate(b.hi)?;
    if best < target {
        return Err(Error::Unreachable { target, best });
    }
    let scan: Vec<f64> = log_grid(b.lo, b.hi, 17)
        .into_iter()
        .map(&rate)
        .collect::<Result<_>>()?;
    let monotone = scan.windows(2).all(|w| w[1] >= w[0]);
    let low = rate(b.lo)?;
    if low >= target {
        return Ok(RequiredPower {
            source_power: b.lo,
            sum_rate: low,
            monotone,
        });
    }
    let (mut lo, mut hi) = (b.lo.ln(), b.hi.ln());
    while hi - lo > b.tol {
        let mid = 0.5 * (lo + hi);
        if rate(mid.exp())? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = hi.exp();
    Ok(RequiredPower {
        source_power: p,
        sum_rate: rate(p)?,
        monotone,
    })
}

/// Smallest antenna count whose exact sum rate reaches `target`.
pub fn required_antennas(config: &SystemConfig, target: f64, max_m: usize) -> Result<usize> {
    let rate =
        |m: usize| -> Result<f64> { Ok(exact_rate(&config.clone().with_antennas(m))?.sum_rate) };
    if max_m == 0 {
        return Err(Error::InvalidBracket {
            lo: 1.0,
            hi: 0.0,
            tol: 1.0,
        });
    }
    let best = rate(max_m)?;
    if best < target {
        return Err(Error::Unreachable { target, best });
    }
    if rate(1)? >= target {
        return Ok(1);
    }
    let (mut lo, mut hi) = (1, max_m);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rate(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
