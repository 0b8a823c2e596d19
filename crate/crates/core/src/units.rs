//! Parameter space and unit conventions.
//!
//! Everything is computed in natural units ħ = c = ε₀ = 1 with the atomic
//! transition frequency Ω as the unit of frequency, so times and lengths are
//! measured in units of 1/Ω. Every observable depends only on the three
//! dimensionless coordinates
//!
//! * `x = L / cT` (distance relative to the light-travel distance),
//! * `z = ΩL / c`,
//! * `ΩT`,
//!
//! plus the coupling strength and the UV form-factor scale. The two dipoles
//! are parallel to each other and perpendicular to the line joining the
//! atoms; no other geometry is modelled.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fine-structure constant (CODATA 2018).
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// Dipole ratio Ω|d|/ec of the reference configuration.
pub const REFERENCE_DIPOLE_RATIO: f64 = 5e-3;

/// Default form-factor scale Λ, in units of Ω.
pub const DEFAULT_CUTOFF: f64 = 50.0;

/// Relative tolerance for the `z = x · ΩT` consistency check.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-12;

/// Initial product state of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// Atom A excited, atom B in the ground state.
    Eg,
    /// Both atoms excited.
    Ee,
    /// Both atoms in the ground state.
    Gg,
}

impl InitialState {
    pub const ALL: [InitialState; 3] = [InitialState::Eg, InitialState::Ee, InitialState::Gg];

    pub fn as_str(self) -> &'static str {
        match self {
            InitialState::Eg => "eg",
            InitialState::Ee => "ee",
            InitialState::Gg => "gg",
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eg" => Ok(InitialState::Eg),
            "ee" => Ok(InitialState::Ee),
            "gg" => Ok(InitialState::Gg),
            other => Err(Error::Parse(format!(
                "unknown channel '{other}' (expected eg, ee or gg)"
            ))),
        }
    }
}

/// Full physical parameter set.
///
/// `cutoff` is the UV form-factor scale Λ expressed in units of Ω;
/// `dipole_ratio` is Ω|d|/(ec).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    omega: f64,
    t_window: f64,
    separation: f64,
    dipole_ratio: f64,
    channel: InitialState,
    cutoff: f64,
}

fn check_positive(field: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::domain(field, value, "must be finite"));
    }
    if value <= 0.0 {
        return Err(Error::domain(field, value, "must be positive"));
    }
    Ok(value)
}

impl PhysicalConfig {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn t_window(&self) -> f64 {
        self.t_window
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn dipole_ratio(&self) -> f64 {
        self.dipole_ratio
    }

    pub fn channel(&self) -> InitialState {
        self.channel
    }

    /// Λ in units of Ω.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn omega_t(&self) -> f64 {
        self.omega * self.t_window
    }

    /// Separation in units of 1/Ω, i.e. z.
    pub fn omega_l(&self) -> f64 {
        self.omega * self.separation
    }

    /// Dimensionless second-order coupling d²Ω²/(ε₀ħc³) = (Ω|d|/ec)² · 4πα.
    ///
    /// Every single-photon probability and every exchange amplitude is this
    /// number times a pure mode integral in units of Ω.
    pub fn coupling(&self) -> f64 {
        coupling_from_ratio(self.dipole_ratio)
    }

    /// Wigner–Weisskopf decay rate Γ = d²Ω³/(3πε₀ħc³) in units of Ω.
    pub fn decay_rate(&self) -> f64 {
        self.coupling() / (3.0 * std::f64::consts::PI)
    }

    pub fn with_channel(mut self, channel: InitialState) -> Self {
        self.channel = channel;
        self
    }

    pub fn with_cutoff(self, cutoff: f64) -> Result<Self> {
        make_config(
            self.omega,
            self.t_window,
            self.separation,
            self.dipole_ratio,
            self.channel,
            cutoff,
        )
    }

    pub fn with_dipole_ratio(self, dipole_ratio: f64) -> Result<Self> {
        make_config(
            self.omega,
            self.t_window,
            self.separation,
            dipole_ratio,
            self.channel,
            self.cutoff,
        )
    }
}

pub fn coupling_from_ratio(dipole_ratio: f64) -> f64 {
    dipole_ratio * dipole_ratio * 4.0 * std::f64::consts::PI * FINE_STRUCTURE
}

/// Validates and builds a configuration.
pub fn make_config(
    omega: f64,
    t_window: f64,
    separation: f64,
    dipole_ratio: f64,
    channel: InitialState,
    cutoff: f64,
) -> Result<PhysicalConfig> {
    Ok(PhysicalConfig {
        omega: check_positive("omega", omega)?,
        t_window: check_positive("t_window", t_window)?,
        separation: check_positive("separation", separation)?,
        dipole_ratio: check_positive("dipole_ratio", dipole_ratio)?,
        channel,
        cutoff: check_positive("cutoff", cutoff)?,
    })
}

/// Sweep coordinates `(x, z, ΩT)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPoint {
    pub x: f64,
    pub z: f64,
    pub omega_t: f64,
}

impl DimensionlessPoint {
    /// Point at distance ratio `x` and `z`, with ΩT = z / x.
    pub fn from_x_z(x: f64, z: f64) -> Result<Self> {
        check_positive("x", x)?;
        check_positive("z", z)?;
        let omega_t = check_positive("omega_t", z / x)?;
        Ok(DimensionlessPoint {
            x,
            z: x * omega_t,
            omega_t,
        })
    }

    /// Point at `z` and `ΩT`, with x = z / ΩT.
    pub fn from_z_omega_t(z: f64, omega_t: f64) -> Result<Self> {
        check_positive("z", z)?;
        check_positive("omega_t", omega_t)?;
        let x = check_positive("x", z / omega_t)?;
        Ok(DimensionlessPoint {
            x,
            z: x * omega_t,
            omega_t,
        })
    }

    pub fn is_consistent(&self) -> bool {
        let product = self.x * self.omega_t;
        (self.z - product).abs() <= CONSISTENCY_TOLERANCE * self.z.abs().max(product.abs())
    }
}

pub fn to_dimensionless(config: &PhysicalConfig) -> DimensionlessPoint {
    let x = config.separation / config.t_window;
    let omega_t = config.omega * config.t_window;
    DimensionlessPoint {
        x,
        z: x * omega_t,
        omega_t,
    }
}

pub fn from_dimensionless(
    point: &DimensionlessPoint,
    omega: f64,
    dipole_ratio: f64,
    channel: InitialState,
    cutoff: f64,
) -> Result<PhysicalConfig> {
    check_positive("x", point.x)?;
    check_positive("z", point.z)?;
    check_positive("omega_t", point.omega_t)?;
    if !point.is_consistent() {
        return Err(Error::Inconsistent {
            z: point.z,
            product: point.x * point.omega_t,
        });
    }
    let omega = check_positive("omega", omega)?;
    make_config(
        omega,
        point.omega_t / omega,
        point.z / omega,
        dipole_ratio,
        channel,
        cutoff,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn config_at_unit_light_cone() {
        let c = make_config(1.0, 10.0, 10.0, 5e-3, InitialState::Eg, 50.0).unwrap();
        let p = to_dimensionless(&c);
        assert_eq!(p.z, 10.0);
        assert_eq!(p.x, 1.0);
        assert_eq!(p.omega_t, 10.0);
    }

    #[test]
    fn rejects_bad_fields_by_name() {
        let err = make_config(1.0, 10.0, 0.0, 5e-3, InitialState::Eg, 50.0).unwrap_err();
        assert!(matches!(
            err,
            Error::Domain {
                field: "separation",
                ..
            }
        ));
        let err = make_config(1.0, f64::NAN, 1.0, 5e-3, InitialState::Eg, 50.0).unwrap_err();
        assert!(matches!(
            err,
            Error::Domain {
                field: "t_window",
                ..
            }
        ));
        let err = make_config(1.0, 1.0, 1.0, 5e-3, InitialState::Eg, f64::INFINITY).unwrap_err();
        assert!(matches!(
            err,
            Error::Domain {
                field: "cutoff",
                ..
            }
        ));
        let err = make_config(-1.0, 1.0, 1.0, 5e-3, InitialState::Eg, 1.0).unwrap_err();
        assert!(err.to_string().contains("omega"));
    }

    #[test]
    fn reference_coupling_regime() {
        let c = make_config(1.0, 10.0, 10.0, 5e-3, InitialState::Eg, 50.0).unwrap();
        assert_eq!(c.dipole_ratio(), 5e-3);
        // (5e-3)^2 * 4 pi alpha
        assert!(rel(c.coupling(), 2.292_530_9e-6) < 1e-6);
    }

    #[test]
    fn dimensionless_examples() {
        let cases = [
            ((1.0, 12.0, 12.0), (1.0, 12.0, 12.0)),
            ((1.0, 10.0, 5.0), (0.5, 5.0, 10.0)),
            ((2.0, 5.0, 5.0), (1.0, 10.0, 10.0)),
        ];
        for ((omega, t, l), (x, z, wt)) in cases {
            let c = make_config(omega, t, l, 5e-3, InitialState::Eg, 50.0).unwrap();
            let p = to_dimensionless(&c);
            assert_eq!((p.x, p.z, p.omega_t), (x, z, wt));
            assert_eq!(p.z, p.x * p.omega_t);
        }
    }

    #[test]
    fn inverse_map_examples() {
        let p = DimensionlessPoint {
            x: 1.0,
            z: 8.0,
            omega_t: 8.0,
        };
        let c = from_dimensionless(&p, 1.0, 5e-3, InitialState::Ee, 50.0).unwrap();
        assert_eq!((c.t_window(), c.separation()), (8.0, 8.0));

        let p = DimensionlessPoint {
            x: 0.5,
            z: 10.0,
            omega_t: 20.0,
        };
        let c = from_dimensionless(&p, 1.0, 5e-3, InitialState::Ee, 50.0).unwrap();
        assert_eq!((c.t_window(), c.separation()), (20.0, 10.0));

        let p = DimensionlessPoint {
            x: 1.0,
            z: 8.0,
            omega_t: 9.0,
        };
        let err = from_dimensionless(&p, 1.0, 5e-3, InitialState::Ee, 50.0).unwrap_err();
        assert!(matches!(err, Error::Inconsistent { .. }));
    }

    /// d²Ω²/(ε₀ħc³) = (Ω|d|/ec)² · e²/(ε₀ħc), checked in SI units.
    #[test]
    fn coupling_identity_in_si_units() {
        const E: f64 = 1.602_176_634e-19;
        const HBAR: f64 = 1.054_571_817e-34;
        const C: f64 = 299_792_458.0;
        const EPS0: f64 = 8.854_187_812_8e-12;
        let alpha = E * E / (4.0 * std::f64::consts::PI * EPS0 * HBAR * C);
        assert!(rel(alpha, FINE_STRUCTURE) < 1e-9);

        for (omega, ratio) in [(1.55e16, 5e-3), (3.0e15, 2e-2), (7.0e14, 1e-4)] {
            let d = ratio * E * C / omega;
            let direct = d * d * omega * omega / (EPS0 * HBAR * C * C * C);
            assert!(rel(direct, coupling_from_ratio(ratio)) < 1e-9);
            // the rate d²Ω³/(ε₀ħc³) carries one extra power of Ω
            let rate = d * d * omega.powi(3) / (EPS0 * HBAR * C.powi(3));
            assert!(rel(rate / omega, coupling_from_ratio(ratio)) < 1e-9);
        }
    }

    #[test]
    fn channel_parsing() {
        for ch in InitialState::ALL {
            assert_eq!(ch.as_str().parse::<InitialState>().unwrap(), ch);
        }
        assert_eq!("EG".parse::<InitialState>().unwrap(), InitialState::Eg);
        assert!("xx".parse::<InitialState>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_through_physical(
                x in 1e-3f64..1e2,
                omega_t in 1e-3f64..1e3,
                omega in 1e-3f64..1e3,
            ) {
                let p = DimensionlessPoint { x, z: x * omega_t, omega_t };
                let c = from_dimensionless(&p, omega, 5e-3, InitialState::Eg, 50.0).unwrap();
                let q = to_dimensionless(&c);
                prop_assert!(rel(q.x, p.x) < 1e-12);
                prop_assert!(rel(q.z, p.z) < 1e-12);
                prop_assert!(rel(q.omega_t, p.omega_t) < 1e-12);
            }
        }
    }
}
