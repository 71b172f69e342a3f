//! Shared scenarios for the benchmarks.

use fdrelay::{AdcModel, SystemConfig};

/// Two-bit relay and destinations at `M` antennas, five pairs.
pub fn two_bit(antennas: usize) -> SystemConfig {
    let two = AdcModel::bits(2).expect("2 bits is valid");
    SystemConfig::homogeneous(antennas, 5)
        .with_relay_power(10.0)
        .with_pilot_power(10.0)
        .with_adcs(two, two)
}
