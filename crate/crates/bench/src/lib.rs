//! Fixed inputs shared by the benchmarks.

use tangle_core::measures::TwoQubitDensity;
use tangle_core::{make_config, InitialState, PhysicalConfig};

/// On the light cone, z = ΩT = 10, default cutoff.
pub fn light_cone(channel: InitialState) -> PhysicalConfig {
    make_config(1.0, 10.0, 10.0, 5e-3, channel, 50.0).expect("valid fixture")
}

/// Long window, far outside the light cone.
pub fn long_window(channel: InitialState) -> PhysicalConfig {
    make_config(1.0, 100.0, 5.0, 5e-3, channel, 50.0).expect("valid fixture")
}

/// Werner state with visibility 0.8.
pub fn werner() -> TwoQubitDensity {
    TwoQubitDensity::werner(0.8).expect("valid fixture")
}

/// Evenly spaced probe frequencies for kernel evaluation.
pub fn frequencies(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.01 + 3.0 * i as f64 / n as f64).collect()
}
