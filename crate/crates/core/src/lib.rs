//! Entanglement generated between two two-level atoms by a finite-time
//! exchange of photons, in second-order perturbation theory.
//!
//! The pipeline is: a [`PhysicalConfig`] fixes Ω, T, L, the dipole strength
//! and the initial state; [`amplitudes`] reduces the mode sums to
//! one-dimensional k integrals evaluated by [`quadrature`]; [`measures`]
//! turns the amplitudes into concurrence, entropy and mutual information;
//! [`sweep`] tabulates them over grids. [`oracles`] holds slow independent
//! checks of the engine.

// NaN must fail the positivity checks, hence `!(x > 0.0)`; quadrature nodes
// are quoted to full published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod amplitudes;
pub mod error;
pub mod kernels;
pub mod measures;
pub mod oracles;
pub mod quadrature;
pub mod sweep;
pub mod units;

pub use amplitudes::{compute_amplitudes, AmplitudeReport, AmplitudeSet};
pub use error::{Error, Result};
pub use quadrature::{QuadratureResult, QuadratureSpec};
pub use sweep::{
    evaluate_point, sweep, Execution, Figure, ObservableSet, PointObservables, SweepRequest,
    SweepTable,
};
pub use units::{make_config, DimensionlessPoint, InitialState, PhysicalConfig};
