use thiserror::Error;

/// Errors produced by the analysis, simulation and design routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ADC resolution must be at least 1 bit, got {0}")]
    InvalidBits(i64),

    #[error("distortion factor must lie in (0, 1], got {0}")]
    InvalidDistortion(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported pilot geometry: pilot length {pilot_len} must equal the number of pairs {pairs}")]
    UnsupportedPilotGeometry { pilot_len: usize, pairs: usize },

    #[error("at least {min} Monte-Carlo realizations are required, got {got}")]
    TooFewRealizations { min: usize, got: usize },

    #[error("closed-form optimum requires homogeneous large-scale fading (all betas equal to 1)")]
    NotHomogeneous,

    #[error("loop interference is zero; the optimal relay power is unbounded")]
    ZeroLoopInterference,

    #[error("invalid search bracket [{lo}, {hi}] with tolerance {tol}")]
    InvalidBracket { lo: f64, hi: f64, tol: f64 },

    #[error("no interior maximum in bracket [{lo}, {hi}]")]
    NoInteriorMaximum { lo: f64, hi: f64 },

    #[error("full- and half-duplex modes do not cross in bracket [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("target sum rate {target} bits/s/Hz is unreachable (best {best} bits/s/Hz)")]
    Unreachable { target: f64, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
