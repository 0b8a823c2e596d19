//! Second-order amplitudes of two dipoles coupled through the vacuum field.
//!
//! Everything is evaluated in units of Ω (ħ = c = ε₀ = 1, Ω = 1), so a
//! configuration enters only through ΩT, ΩL, Λ/Ω and the dimensionless
//! coupling `g = d²Ω²/ε₀ħc³`. With both dipoles parallel to each other and
//! perpendicular to the separation, the transverse angular average of
//! `e^{ik·L}` is `P(kL) = j₀(kL) + j₀'(kL)/(kL)`, and
//!
//! ```text
//! u2 = (2g/3) ∫ k³ δ^T(k−1)² F(k) dk
//! v2 = (2g/3) ∫ k³ δ^T(k+1)² F(k) dk
//! l  = −g [M''(L) + M'(L)/L] = g ∫ k³ P(kL) K(k) F(k) dk
//! M(L) = ∫ k j₀(kL) K(k) F(k) dk = ∫ sin(kL)/L K(k) F(k) dk
//! b  = −(g/4π²) ∫ k³ P(kL) F(k) [h(1−k) + h(−1−k)] dk
//! h(α) = (1 − e^{iαT} + iαT)/α²
//! ```
//!
//! `b` comes from the time-ordered double integral over [0,T]², with the
//! inner time integrals done per mode. The global phase e^{iΩT} of the EG
//! cross term is dropped.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::SpectralKernel;
use crate::quadrature::{
    integrate_family, integrate_semi_infinite, QuadratureResult, QuadratureSpec,
};
use crate::units::{InitialState, PhysicalConfig};

/// Smallest separation accepted, in units of 1/Ω.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Below this argument the spherical Bessel forms use their power series.
const BESSEL_SERIES_THRESHOLD: f64 = 0.5;

const SERIES_TERMS: usize = 10;

fn series(s: f64, coefficient: impl Fn(usize) -> f64) -> f64 {
    let s2 = s * s;
    let mut acc = 0.0;
    for n in (0..SERIES_TERMS).rev() {
        acc = acc * s2 + coefficient(n);
    }
    acc
}

fn inv_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc / i as f64)
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// j₀(s) = sin(s)/s.
pub fn j0(s: f64) -> f64 {
    if s.abs() < BESSEL_SERIES_THRESHOLD {
        series(s, |n| sign(n) * inv_factorial(2 * n + 1))
    } else {
        s.sin() / s
    }
}

/// j₀'(s) = (s cos s − sin s)/s².
pub fn j0_prime(s: f64) -> f64 {
    if s.abs() < BESSEL_SERIES_THRESHOLD {
        // Σ_{n≥1} (−1)^n 2n s^{2n−1}/(2n+1)!
        s * series(s, |m| {
            let n = m + 1;
            sign(n) * 2.0 * n as f64 * inv_factorial(2 * n + 1)
        })
    } else {
        let (sn, cs) = s.sin_cos();
        (s * cs - sn) / (s * s)
    }
}

/// j₀''(s) = ((2 − s²) sin s − 2s cos s)/s³.
pub fn j0_second(s: f64) -> f64 {
    if s.abs() < BESSEL_SERIES_THRESHOLD {
        series(s, |m| {
            let n = m + 1;
            sign(n) * (2 * n * (2 * n - 1)) as f64 * inv_factorial(2 * n + 1)
        })
    } else {
        let (sn, cs) = s.sin_cos();
        ((2.0 - s * s) * sn - 2.0 * s * cs) / (s * s * s)
    }
}

/// Transverse angular factor P(s) = j₀(s) + j₀'(s)/s, with P(0) = 2/3.
pub fn transverse_factor(s: f64) -> f64 {
    if s.abs() < BESSEL_SERIES_THRESHOLD {
        series(s, |m| {
            sign(m) * (inv_factorial(2 * m + 1) - (2 * m + 2) as f64 * inv_factorial(2 * m + 3))
        })
    } else {
        let (sn, cs) = s.sin_cos();
        sn / s + cs / (s * s) - sn / (s * s * s)
    }
}

/// (1 − e^{iθ} + iθ)/θ², the per-mode time-ordered double integral over a
/// unit window.
fn ordered_window(theta: f64) -> Complex64 {
    if theta.abs() < 0.5 {
        // Σ (iθ)^n/(n+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut acc = term;
        for n in 1..20 {
            term *= Complex64::new(0.0, theta) / (n + 2) as f64;
            acc += term;
        }
        acc
    } else {
        let (s, c) = theta.sin_cos();
        Complex64::new(1.0 - c, theta - s) / (theta * theta)
    }
}

/// M(L) and its first two L-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MDerivatives {
    pub m: QuadratureResult,
    pub m1: QuadratureResult,
    pub m2: QuadratureResult,
}

/// A complex amplitude with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Mode-summed emission probabilities |u|² and |v|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionProbabilities {
    pub u2: QuadratureResult,
    pub v2: QuadratureResult,
}

/// Amplitudes of the traced two-atom state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSet {
    pub channel: InitialState,
    /// Radiative correction to the no-photon branch.
    pub a: Complex64,
    /// Exchange amplitude.
    pub b: Complex64,
    pub u2: f64,
    pub v2: f64,
    pub f2: f64,
    pub g2: f64,
    /// Cross amplitude of the one-photon sector for `channel`.
    pub l: Complex64,
    /// (1+a) b* + f g*.
    pub ab_cross: Complex64,
}

impl AmplitudeSet {
    /// One-photon amplitudes only; a = b = f = g = 0.
    pub fn new(channel: InitialState, u2: f64, v2: f64, l: Complex64) -> Self {
        AmplitudeSet {
            channel,
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            u2,
            v2,
            f2: 0.0,
            g2: 0.0,
            l,
            ab_cross: Complex64::new(0.0, 0.0),
        }
    }

    /// Sets b and the matching `ab_cross` with f g* = 0.
    pub fn with_exchange(mut self, b: Complex64) -> Self {
        self.b = b;
        self.ab_cross = (Complex64::new(1.0, 0.0) + self.a) * b.conj();
        self
    }

    /// Weights of the two one-photon branches for this channel.
    pub fn branch_weights(&self) -> (f64, f64) {
        match self.channel {
            InitialState::Eg => (self.u2, self.v2),
            InitialState::Ee => (self.u2, self.u2),
            InitialState::Gg => (self.v2, self.v2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("u2", self.u2),
            ("v2", self.v2),
            ("f2", self.f2),
            ("g2", self.g2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidDensity(format!(
                    "{name} = {v} must be finite and >= 0"
                )));
            }
        }
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("l", self.l),
            ("ab_cross", self.ab_cross),
        ] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidDensity(format!("{name} is not finite")));
            }
        }
        Ok(())
    }
}

/// Kernel of `channel` in units of Ω.
pub fn unit_kernel(config: &PhysicalConfig, channel: InitialState) -> SpectralKernel {
    SpectralKernel::new(channel, 1.0, config.omega_t(), config.cutoff())
}

fn check_separation(z: f64) -> Result<()> {
    if z >= MIN_SEPARATION && z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            "separation",
            z,
            "must be at least 1e-6 in units of 1/omega",
        ))
    }
}

fn oscillation_period(kernel: &SpectralKernel, separation: f64) -> f64 {
    let by_window = 2.0 * PI / kernel.t_window;
    let by_distance = 2.0 * PI / separation;
    by_window.min(by_distance)
}

fn kernel_nodes(kernel: &SpectralKernel, spec: &QuadratureSpec) -> Vec<f64> {
    // the envelope truncation point bounds where nodes matter
    let k_max = kernel
        .tail_envelope(3, 1.0)
        .truncation_point(0.5 * spec.absolute_tolerance);
    kernel.breakpoints(k_max).points
}

fn scaled(r: QuadratureResult, factor: f64) -> QuadratureResult {
    QuadratureResult {
        value: r.value * factor,
        error_estimate: r.error_estimate * factor.abs(),
        panels_used: r.panels_used,
        tail_bound: r.tail_bound * factor.abs(),
    }
}

/// M(L), M'(L) and M''(L) for `kernel`, in the kernel's units.
pub fn m_derivatives(
    separation: f64,
    kernel: &SpectralKernel,
    spec: &QuadratureSpec,
) -> Result<MDerivatives> {
    let l = separation;
    check_separation(l * kernel.omega)?;
    let family = |k: f64| {
        let s = k * l;
        let w = kernel.eval(k);
        [
            k * j0(s) * w,
            k * k * j0_prime(s) * w,
            k * k * k * j0_second(s) * w,
        ]
    };
    // |j₀^{(n)}| ≤ 1/(n+1)
    let tails = [
        kernel.tail_envelope(1, 1.0),
        kernel.tail_envelope(2, 0.5),
        kernel.tail_envelope(3, 1.0 / 3.0),
    ];
    let nodes = kernel_nodes(kernel, spec);
    let [m, m1, m2] = integrate_family(
        family,
        &nodes,
        Some(oscillation_period(kernel, l)),
        &tails,
        spec,
    )?;
    Ok(MDerivatives { m, m1, m2 })
}

/// `∫ k³ P(kL) K(k) F(k) dk = −[M''(L) + M'(L)/L]` evaluated as one integral.
pub fn transverse_integral(
    separation: f64,
    kernel: &SpectralKernel,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let l = separation;
    check_separation(l * kernel.omega)?;
    let nodes = kernel_nodes(kernel, spec);
    integrate_semi_infinite(
        |k: f64| k * k * k * transverse_factor(k * l) * kernel.eval(k),
        &nodes,
        Some(oscillation_period(kernel, l)),
        &kernel.tail_envelope(3, 4.0 / 3.0),
        spec,
    )
}

/// Cross amplitude of `config.channel()`: l, l' or l''.
pub fn cross_amplitude(config: &PhysicalConfig, spec: &QuadratureSpec) -> Result<Amplitude> {
    let kernel = unit_kernel(config, config.channel());
    let r = scaled(
        transverse_integral(config.omega_l(), &kernel, spec)?,
        config.coupling(),
    );
    Ok(Amplitude {
        value: Complex64::new(r.value, 0.0),
        error_estimate: r.error_estimate,
    })
}

/// (2/3) ∫ k³ K(k) F(k) dk for a non-negative kernel.
fn emission_integral(kernel: &SpectralKernel, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let nodes = kernel_nodes(kernel, spec);
    let r = integrate_semi_infinite(
        |k: f64| k * k * k * kernel.eval(k),
        &nodes,
        Some(2.0 * PI / kernel.t_window),
        &kernel.tail_envelope(3, 1.0),
        spec,
    )?;
    Ok(scaled(r, 2.0 / 3.0))
}

/// |u|² (rotating, atom de-excites) and |v|² (counter-rotating, atom
/// excites) summed over modes and polarizations. Independent of L.
pub fn emission_probabilities(
    config: &PhysicalConfig,
    spec: &QuadratureSpec,
) -> Result<EmissionProbabilities> {
    let g = config.coupling();
    let u2 = emission_integral(&unit_kernel(config, InitialState::Ee), spec)?;
    let v2 = emission_integral(&unit_kernel(config, InitialState::Gg), spec)?;
    Ok(EmissionProbabilities {
        u2: scaled(u2, g),
        v2: scaled(v2, g),
    })
}

/// `∫ k² P(kL) e^{−k/Λ} dk` in closed form.
fn transverse_moment(l: f64, cutoff: f64) -> f64 {
    let a = 1.0 / cutoff;
    let r = a * a + l * l;
    2.0 * a / (r * r) + a / (l * l * r) - (l / a).atan() / (l * l * l)
}

/// Exchange amplitude b: photon emitted by A, absorbed by B, time-ordered.
///
/// For large k, h(1−k) + h(−1−k) → −2iT/k, which turns the integrand into a
/// slowly decaying oscillation whose integral is tiny. That piece is
/// integrated in closed form and subtracted, so the quadrature only sees the
/// remainder.
pub fn exchange_amplitude_b(config: &PhysicalConfig, spec: &QuadratureSpec) -> Result<Amplitude> {
    let t = config.omega_t();
    let l = config.omega_l();
    check_separation(l)?;
    let cutoff = config.cutoff();
    let h = |alpha: f64| ordered_window(alpha * t) * (t * t);
    let family = |k: f64| {
        let j = h(1.0 - k) + h(-1.0 - k);
        let w = k * k * transverse_factor(k * l) * (-k / cutoff).exp();
        [w * k * j.re, w * (k * j.im + 2.0 * t)]
    };
    // for k ≥ 2: |J + 2iT/k| ≤ (10 + 4T/3)/k² and |P| ≤ 4/3
    let envelope = crate::quadrature::TailEnvelope {
        start: 2.0,
        coefficient: 4.0 / 3.0 * (10.0 + 4.0 * t / 3.0),
        power: 1,
        decay: cutoff,
    };
    let period = (2.0 * PI / t).min(2.0 * PI / l);
    let subtracted = 2.0 * t * transverse_moment(l, cutoff);
    let mut run = *spec;
    let mut attempts = 0;
    let (value, error) = loop {
        let [re, im] = integrate_family(family, &[1.0], Some(period), &[envelope, envelope], &run)?;
        let value = Complex64::new(re.value, im.value - subtracted);
        let error = re
            .error_estimate
            .hypot(im.error_estimate + 4.0 * f64::EPSILON * subtracted.abs());
        // the parts may cancel far below their own tolerances; tighten
        let scale = re.value.abs().max(im.value.abs()).max(subtracted.abs());
        let target = spec.tolerance_for(value.norm());
        attempts += 1;
        if error <= target || attempts == 2 || scale == 0.0 {
            break (value, error);
        }
        // each part needs an absolute error well below the target for b
        run.relative_tolerance = (0.25 * target / scale).max(1e-15);
        run.absolute_tolerance = (0.25 * target).max(1e-18);
    };
    let factor = -config.coupling() / (4.0 * PI * PI);
    Ok(Amplitude {
        value: value * factor,
        error_estimate: error * factor.abs(),
    })
}

/// All amplitudes of `config`; `b` only when `with_exchange` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub set: AmplitudeSet,
    /// Largest relative quadrature error among the computed amplitudes.
    pub max_relative_error: f64,
}

pub fn compute_amplitudes(
    config: &PhysicalConfig,
    spec: &QuadratureSpec,
    with_exchange: bool,
) -> Result<AmplitudeReport> {
    let emission = emission_probabilities(config, spec)?;
    compute_with_emission(config, &emission, spec, with_exchange)
}

/// As [`compute_amplitudes`], reusing emission probabilities computed for the
/// same ΩT and cutoff.
pub fn compute_with_emission(
    config: &PhysicalConfig,
    emission: &EmissionProbabilities,
    spec: &QuadratureSpec,
    with_exchange: bool,
) -> Result<AmplitudeReport> {
    let l = cross_amplitude(config, spec)?;
    let g = config.coupling();
    // relative to max(|value|, atol/rtol) of the underlying integral
    let floor = spec.absolute_tolerance / spec.relative_tolerance;
    let rel = |value: f64, err: f64, factor: f64| err / value.abs().max(factor * floor);
    let emission_factor = 2.0 * g / 3.0;
    let mut worst = rel(
        emission.u2.value,
        emission.u2.error_estimate,
        emission_factor,
    )
    .max(rel(
        emission.v2.value,
        emission.v2.error_estimate,
        emission_factor,
    ))
    .max(rel(l.value.norm(), l.error_estimate, g));
    let mut set = AmplitudeSet::new(
        config.channel(),
        emission.u2.value,
        emission.v2.value,
        l.value,
    );
    if with_exchange {
        let b = exchange_amplitude_b(config, spec)?;
        worst = worst.max(rel(b.value.norm(), b.error_estimate, g / (4.0 * PI * PI)));
        set = set.with_exchange(b.value);
    }
    Ok(AmplitudeReport {
        set,
        max_relative_error: worst,
    })
}
