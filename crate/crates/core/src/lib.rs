//! Achievable-rate analysis of a multipair amplify-and-forward full-duplex
//! massive-MIMO relay whose relay and destinations use low-resolution ADCs.
//!
//! The crate provides the quantization model ([`adc`]), channel drawing and
//! MMSE estimation ([`channel`]), the exact closed-form rate ([`rate_exact`]),
//! its large-array approximations ([`rate_asym`]), an independent Monte-Carlo
//! oracle ([`mc`]) and power/antenna design routines ([`design`]).

pub mod adc;
pub mod channel;
pub mod config;
pub mod design;
pub mod error;
pub mod mc;
pub mod products;
pub mod random;
pub mod rate_asym;
pub mod rate_exact;

pub use adc::{distortion_factor, AdcModel, Resolution};
pub use channel::{ChannelEstimate, ChannelSet, EstimationStats};
pub use config::{db_to_linear, linear_to_db, SystemConfig};
pub use design::{
    duplex_crossover_antennas, duplex_crossover_loop_interference, optimal_relay_power_homogeneous,
    optimize_relay_power, required_antennas, required_source_power, PowerCoupling,
    RelayPowerOptimum, RequiredPower, SearchBracket,
};
pub use error::{Error, Result};
pub use mc::{
    simulate_gamma, simulate_rate, simulate_terms, McEstimate, McRate, McTermReport, MomentSamples,
};
pub use products::RelayProducts;
pub use rate_asym::{
    approx_rate, half_duplex_rate, limit_rate_infinite_m, placement_rates, scaled_power_limit,
    AsymptoticReport, LimitRate,
};
pub use rate_exact::{amplification_gain, exact_breakdown, exact_rate, RateBreakdown};
