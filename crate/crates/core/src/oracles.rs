//! Brute-force oracles.
//!
//! The field is quantized in a finite box, which turns every mode integral
//! into a sum over a k-lattice with spacing 2π/B. Angular and polarization
//! sums are done in closed form, so each lattice point is one spherical shell.
//! Nothing here calls the quadrature or the amplitude engine: the box sums
//! are plain ordered sums and the time integral for b uses its own
//! Gauss–Legendre rule. The finite-difference check is the exception, since
//! its job is to test the engine's derivative integrals directly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{
    cross_amplitude, emission_probabilities, exchange_amplitude_b, m_derivatives, unit_kernel,
};
use crate::error::{Error, Result};
use crate::kernels::SpectralKernel;
use crate::quadrature::QuadratureSpec;
use crate::units::{make_config, InitialState, PhysicalConfig, REFERENCE_DIPOLE_RATIO};

/// The lattice edge sits at this many cutoffs, where e^{−k/Λ} ≈ 4e-18.
pub const EDGE_IN_CUTOFFS: f64 = 40.0;

/// Largest form factor allowed at the lattice edge.
pub const EDGE_FORM_FACTOR: f64 = 1e-10;

/// Relative agreement required between oracle and engine.
pub const AGREEMENT: f64 = 1e-2;

/// Tolerance on the finite-difference derivative check.
pub const FD_TOLERANCE: f64 = 1e-4;

/// Finite quantization box with a spherical-shell k-lattice k_n = n·2π/B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub box_length: f64,
    pub max_mode_index: usize,
    pub cutoff: f64,
}

impl BoxSpec {
    /// Box of length `box_length` whose lattice reaches 40 cutoffs.
    pub fn new(box_length: f64, cutoff: f64) -> Result<Self> {
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::domain("box_length", box_length, "must be positive"));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::domain("cutoff", cutoff, "must be positive"));
        }
        let dk = 2.0 * PI / box_length;
        let modes = (EDGE_IN_CUTOFFS * cutoff / dk).ceil() as usize;
        Self::with_modes(box_length, modes, cutoff)
    }

    pub fn with_modes(box_length: f64, max_mode_index: usize, cutoff: f64) -> Result<Self> {
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::domain("box_length", box_length, "must be positive"));
        }
        let spec = BoxSpec {
            box_length,
            max_mode_index,
            cutoff,
        };
        if !(spec.edge_form_factor() < EDGE_FORM_FACTOR) {
            return Err(Error::domain(
                "max_mode_index",
                max_mode_index as f64,
                "form factor at the lattice edge must be below 1e-10",
            ));
        }
        Ok(spec)
    }

    /// Smallest box that holds the light cone of the whole window, 2(T + L).
    pub fn base(config: &PhysicalConfig) -> Result<Self> {
        Self::new(2.0 * (config.omega_t() + config.omega_l()), config.cutoff())
    }

    pub fn mode_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn edge(&self) -> f64 {
        self.max_mode_index as f64 * self.mode_spacing()
    }

    pub fn edge_form_factor(&self) -> f64 {
        (-self.edge() / self.cutoff).exp()
    }

    /// Same lattice reach, box scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.box_length * factor, self.cutoff)
    }

    /// Shell weight 4πk²Δk/(2π)³ · k/2 = k³Δk/(4π²), with the form factor.
    fn shell_weight(&self, k: f64) -> f64 {
        k * k * k * self.mode_spacing() / (4.0 * PI * PI) * (-k / self.cutoff).exp()
    }

    fn lattice(&self) -> impl Iterator<Item = f64> + '_ {
        let dk = self.mode_spacing();
        (1..=self.max_mode_index).map(move |n| n as f64 * dk)
    }
}

/// Compensated running sum, taken in lattice order.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// ∫₀^T e^{iwt} dt for one mode.
fn vertex(w: f64, t: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(t, 0.0);
    }
    let half = 0.5 * w * t;
    Complex64::new((w * t).sin() / w, 2.0 * half.sin() * half.sin() / w)
}

/// Polarization-summed angular average of e^{ik·L} for dipoles normal to L:
/// ¼ ∫₋₁¹ (1 + u²) cos(su) du.
fn angular_average(s: f64) -> f64 {
    let s = s.abs();
    if s < 0.5 {
        // ∫₋₁¹ u^{2m} cos(su) du = Σ (−1)ⁿ s^{2n} / (2n)! · 2/(2n + 2m + 1)
        let mut term = 1.0;
        let mut total = 0.0;
        for n in 0..12 {
            let e = 2.0 * n as f64;
            total += term * (2.0 / (e + 1.0) + 2.0 / (e + 3.0));
            term *= -s * s / ((e + 1.0) * (e + 2.0));
        }
        return 0.25 * total;
    }
    let (sin, cos) = s.sin_cos();
    let c0 = 2.0 * sin / s;
    let c2 = 2.0 * (sin / s + 2.0 * cos / (s * s) - 2.0 * sin / (s * s * s));
    0.25 * (c0 + c2)
}

/// (u2, v2) summed over the lattice of one box, in units where Ω = 1.
///
/// u2 pairs with the rotating vertex ∫e^{i(k−Ω)t}, v2 with the
/// counter-rotating one ∫e^{i(k+Ω)t}; the polarization average is 2/3.
pub fn box_emission_probabilities(config: &PhysicalConfig, spec: &BoxSpec) -> (f64, f64) {
    let t = config.omega_t();
    let mut u2 = Compensated::default();
    let mut v2 = Compensated::default();
    for k in spec.lattice() {
        let w = spec.shell_weight(k) * (2.0 / 3.0);
        u2.add(w * vertex(k - 1.0, t).norm_sqr());
        v2.add(w * vertex(k + 1.0, t).norm_sqr());
    }
    let g = config.coupling();
    (g * u2.total(), g * v2.total())
}

/// Cross amplitude of `config.channel()` summed over one box, with the
/// global phase e^{iΩT} of the EG channel removed.
pub fn box_cross_amplitude(config: &PhysicalConfig, spec: &BoxSpec) -> Complex64 {
    let t = config.omega_t();
    let l = config.omega_l();
    let strip = match config.channel() {
        InitialState::Eg => Complex64::from_polar(1.0, -t),
        _ => Complex64::new(1.0, 0.0),
    };
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    for k in spec.lattice() {
        let down = vertex(k - 1.0, t);
        let up = vertex(k + 1.0, t);
        let pair = match config.channel() {
            InitialState::Eg => up * down.conj(),
            InitialState::Ee => down * down.conj(),
            InitialState::Gg => up * up.conj(),
        };
        let term = pair * strip * (spec.shell_weight(k) * angular_average(k * l));
        re.add(term.re);
        im.add(term.im);
    }
    Complex64::new(re.total(), im.total()) * config.coupling()
}

/// Gauss–Legendre nodes and weights on [−1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn gl16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Exchange amplitude b from the time-domain box correlator.
///
/// b = −g ∫₀^T 2(T−τ) cos(Ωτ) G(τ) dτ with
/// G(τ) = Σ_k k³Δk/(4π²) · P(kL) e^{−k/Λ} e^{−ikτ}. The lattice phases are
/// advanced by recurrence and reseeded every 512 modes.
pub fn box_exchange_amplitude(config: &PhysicalConfig, spec: &BoxSpec) -> Complex64 {
    let t = config.omega_t();
    let l = config.omega_l();
    let dk = spec.mode_spacing();
    let weights: Vec<f64> = spec
        .lattice()
        .map(|k| spec.shell_weight(k) * angular_average(k * l))
        .collect();
    // G is analytic in a strip of half-width 1/Λ around the real axis
    let panels = ((t * spec.cutoff).ceil() as usize).max(8);
    let width = t / panels as f64;
    let rule = gl16();
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let mid = (p as f64 + 0.5) * width;
            rule.iter()
                .map(move |&(x, w)| (mid + 0.5 * width * x, 0.5 * width * w))
        })
        .collect();
    let correlator = |tau: f64| {
        let step = Complex64::from_polar(1.0, -dk * tau);
        let mut phase = step;
        let mut sum = Complex64::new(0.0, 0.0);
        for (i, &w) in weights.iter().enumerate() {
            if i % 512 == 0 {
                phase = Complex64::from_polar(1.0, -dk * tau * (i + 1) as f64);
            }
            sum += phase * w;
            phase *= step;
        }
        sum
    };
    let terms: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(tau, w)| correlator(tau) * (w * 2.0 * (t - tau) * tau.cos()))
        .collect();
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    for z in terms {
        re.add(z.re);
        im.add(z.im);
    }
    -Complex64::new(re.total(), im.total()) * config.coupling()
}

/// Box values at B, 2B, 4B and their extrapolation to an infinite box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub box_lengths: [f64; 3],
    pub values: [f64; 3],
    pub extrapolated: f64,
    /// Observed order p of the B^{−p} finite-size error, when resolvable.
    pub order: Option<f64>,
    /// |v(4B) − v(2B)| ≤ 1% of |v(4B)|.
    pub cauchy: bool,
}

impl Extrapolation {
    pub fn from_values(box_lengths: [f64; 3], values: [f64; 3]) -> Self {
        let [v1, v2, v3] = values;
        let d1 = v1 - v2;
        let d2 = v2 - v3;
        let noise = 64.0 * f64::EPSILON * v3.abs();
        let (extrapolated, order) = if d2.abs() > noise && d1 * d2 > 0.0 && d2.abs() < d1.abs() {
            let p = (d1 / d2).log2();
            (v3 - d2 / ((d1 / d2) - 1.0), Some(p))
        } else {
            (v3, None)
        };
        Extrapolation {
            box_lengths,
            values,
            extrapolated,
            order,
            cauchy: d2.abs() <= AGREEMENT * v3.abs(),
        }
    }

    pub fn relative_to(&self, reference: f64) -> f64 {
        (self.extrapolated - reference).abs() / reference.abs()
    }
}

fn three_boxes(base: &BoxSpec) -> Result<[BoxSpec; 3]> {
    Ok([*base, base.scaled(2.0)?, base.scaled(4.0)?])
}

/// u2 and v2 extrapolated from boxes B, 2B, 4B.
pub fn extrapolated_emission(
    config: &PhysicalConfig,
    base: &BoxSpec,
) -> Result<(Extrapolation, Extrapolation)> {
    let boxes = three_boxes(base)?;
    let values: Vec<(f64, f64)> = boxes
        .iter()
        .map(|b| box_emission_probabilities(config, b))
        .collect();
    let lengths = boxes.map(|b| b.box_length);
    Ok((
        Extrapolation::from_values(lengths, [values[0].0, values[1].0, values[2].0]),
        Extrapolation::from_values(lengths, [values[0].1, values[1].1, values[2].1]),
    ))
}

/// Complex box amplitude extrapolated component-wise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexExtrapolation {
    pub re: Extrapolation,
    pub im: Extrapolation,
    /// arg of the amplitude in each box.
    pub phases: [f64; 3],
}

impl ComplexExtrapolation {
    fn from_values(box_lengths: [f64; 3], values: [Complex64; 3]) -> Self {
        ComplexExtrapolation {
            re: Extrapolation::from_values(box_lengths, values.map(|z| z.re)),
            im: Extrapolation::from_values(box_lengths, values.map(|z| z.im)),
            phases: values.map(|z| z.arg()),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.extrapolated, self.im.extrapolated)
    }

    /// Largest phase difference between boxes, wrapped to [0, π].
    pub fn phase_spread(&self) -> f64 {
        let mut spread: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                let d = (self.phases[i] - self.phases[j]).rem_euclid(2.0 * PI);
                spread = spread.max(d.min(2.0 * PI - d));
            }
        }
        spread
    }

    /// Cauchy test on the modulus across the last two boxes.
    pub fn cauchy(&self) -> bool {
        let z2 = Complex64::new(self.re.values[1], self.im.values[1]);
        let z3 = Complex64::new(self.re.values[2], self.im.values[2]);
        (z3 - z2).norm() <= AGREEMENT * z3.norm()
    }
}

pub fn extrapolated_cross_amplitude(
    config: &PhysicalConfig,
    base: &BoxSpec,
) -> Result<ComplexExtrapolation> {
    let boxes = three_boxes(base)?;
    let values = boxes.map(|b| box_cross_amplitude(config, &b));
    Ok(ComplexExtrapolation::from_values(
        boxes.map(|b| b.box_length),
        values,
    ))
}

pub fn extrapolated_exchange_amplitude(
    config: &PhysicalConfig,
    base: &BoxSpec,
) -> Result<ComplexExtrapolation> {
    let boxes = three_boxes(base)?;
    let values = boxes.map(|b| box_exchange_amplitude(config, &b));
    Ok(ComplexExtrapolation::from_values(
        boxes.map(|b| b.box_length),
        values,
    ))
}

/// Analytic M', M'' against 5-point central differences of M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    pub separation: f64,
    pub step: f64,
    pub m1_analytic: f64,
    pub m2_analytic: f64,
    pub m1_difference: f64,
    pub m2_difference: f64,
    pub max_relative_error: f64,
    pub passed: bool,
}

impl FdReport {
    /// `samples` holds M at L−2h, L−h, L, L+h, L+2h.
    pub fn compare(separation: f64, step: f64, m1: f64, m2: f64, samples: [f64; 5]) -> Self {
        let [a, b, c, d, e] = samples;
        let h = step;
        let m1_difference = (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
        let m2_difference = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
        let max_relative_error = rel(m1_difference, m1).max(rel(m2_difference, m2));
        FdReport {
            separation,
            step,
            m1_analytic: m1,
            m2_analytic: m2,
            m1_difference,
            m2_difference,
            max_relative_error,
            passed: max_relative_error < FD_TOLERANCE,
        }
    }
}

/// Default finite-difference step for M(L).
///
/// M' bends sharply across the light cone L = T over a width 1/Λ, so the
/// step resolves that scale.
pub fn default_fd_step(separation: f64, kernel: &SpectralKernel) -> f64 {
    (0.1 / kernel.cutoff).min(0.25 * separation)
}

/// Tight tolerances so that rounding in M stays below the difference error.
fn fd_spec() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-13,
        absolute_tolerance: 1e-18,
        ..QuadratureSpec::default()
    }
}

pub fn fd_derivative_check(separation: f64, kernel: &SpectralKernel) -> Result<FdReport> {
    fd_derivative_check_with_step(separation, kernel, default_fd_step(separation, kernel))
}

pub fn fd_derivative_check_with_step(
    separation: f64,
    kernel: &SpectralKernel,
    step: f64,
) -> Result<FdReport> {
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::domain("separation", separation, "must be positive"));
    }
    if !(step > 0.0 && step < separation) {
        return Err(Error::domain("step", step, "must lie in (0, L)"));
    }
    let spec = fd_spec();
    let centre = m_derivatives(separation, kernel, &spec)?;
    let mut samples = [0.0; 5];
    for (i, slot) in samples.iter_mut().enumerate() {
        let shift = (i as f64 - 2.0) * step;
        *slot = if i == 2 {
            centre.m.value
        } else {
            m_derivatives(separation + shift, kernel, &spec)?.m.value
        };
    }
    Ok(FdReport::compare(
        separation,
        step,
        centre.m1.value,
        centre.m2.value,
        samples,
    ))
}

/// Smallest ΩT at which the long-time decay law is asserted.
pub const WW_MIN_OMEGA_T: f64 = 50.0;

/// Single-atom emission against the Wigner–Weisskopf law u2 ≈ ΓT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeisskopfReport {
    pub omega_t: f64,
    pub cutoff: f64,
    pub u2: f64,
    pub decay_rate: f64,
    /// u2 / (ΓT).
    pub ratio: f64,
    /// (u2(T + π) − u2(T − π)) / (2πΓ): the secular growth rate over Γ.
    pub secular_ratio: f64,
    /// None when ΩT is below the validity threshold.
    pub passed: Option<bool>,
}

fn box_u2(config: &PhysicalConfig) -> Result<f64> {
    let (u2, _) = extrapolated_emission(config, &BoxSpec::base(config)?)?;
    Ok(u2.extrapolated)
}

pub fn wigner_weisskopf_check(config: &PhysicalConfig) -> Result<WeisskopfReport> {
    let t = config.omega_t();
    let gamma = config.decay_rate();
    let u2 = box_u2(config)?;
    let shifted = |dt: f64| {
        make_config(
            1.0,
            t + dt,
            config.omega_l(),
            config.dipole_ratio(),
            config.channel(),
            config.cutoff(),
        )
    };
    let ahead = box_u2(&shifted(PI)?)?;
    let behind = box_u2(&shifted(-PI.min(0.5 * t))?)?;
    let span = PI + PI.min(0.5 * t);
    let ratio = u2 / (gamma * t);
    Ok(WeisskopfReport {
        omega_t: t,
        cutoff: config.cutoff(),
        u2,
        decay_rate: gamma,
        ratio,
        secular_ratio: (ahead - behind) / (span * gamma),
        passed: (t >= WW_MIN_OMEGA_T).then(|| (ratio - 1.0).abs() <= 0.05),
    })
}

/// One line of the oracle suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

impl OracleCheck {
    fn new(name: &str, passed: bool, detail: String, metrics: &[(&str, f64)]) -> Self {
        OracleCheck {
            name: name.to_string(),
            passed,
            detail,
            metrics: metrics.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSuiteReport {
    pub checks: Vec<OracleCheck>,
    pub passed: bool,
}

impl OracleSuiteReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "{n_pass}/{} oracle checks passed\n",
            self.checks.len()
        ));
        out
    }
}

fn point(channel: InitialState, z: f64, omega_t: f64, cutoff: f64) -> Result<PhysicalConfig> {
    make_config(1.0, omega_t, z, REFERENCE_DIPOLE_RATIO, channel, cutoff)
}

fn emission_check(spec: &QuadratureSpec) -> Result<OracleCheck> {
    let config = point(InitialState::Eg, 10.0, 20.0, 50.0)?;
    let (u2, v2) = extrapolated_emission(&config, &BoxSpec::base(&config)?)?;
    let engine = emission_probabilities(&config, spec)?;
    let du = u2.relative_to(engine.u2.value);
    let dv = v2.relative_to(engine.v2.value);
    let passed = du <= AGREEMENT && dv <= AGREEMENT && u2.cauchy && v2.cauchy;
    Ok(OracleCheck::new(
        "emission u2, v2 (OmegaT=20, cutoff=50)",
        passed,
        format!("box/engine relative difference u2 {du:.2e}, v2 {dv:.2e}"),
        &[
            ("u2_box", u2.extrapolated),
            ("u2_engine", engine.u2.value),
            ("v2_box", v2.extrapolated),
            ("v2_engine", engine.v2.value),
        ],
    ))
}

fn emission_independence_check() -> Result<OracleCheck> {
    let near = point(InitialState::Eg, 2.0, 20.0, 50.0)?;
    let far = point(InitialState::Eg, 40.0, 20.0, 50.0)?;
    let spec = BoxSpec::base(&far)?;
    let (a, _) = box_emission_probabilities(&near, &spec);
    let (b, _) = box_emission_probabilities(&far, &spec);
    let diff = (a - b).abs() / a.abs();
    Ok(OracleCheck::new(
        "u2 independent of L",
        diff <= 1e-12,
        format!("relative change between z=2 and z=40: {diff:.2e}"),
        &[("relative_change", diff)],
    ))
}

fn cross_checks(spec: &QuadratureSpec) -> Result<Vec<OracleCheck>> {
    let peak = point(InitialState::Eg, 10.0, 10.0, 50.0)?;
    let outside = point(InitialState::Eg, 10.0, 10.0 / 3.0, 50.0)?;
    let l_peak = extrapolated_cross_amplitude(&peak, &BoxSpec::base(&peak)?)?;
    let l_out = extrapolated_cross_amplitude(&outside, &BoxSpec::base(&outside)?)?;
    let engine = cross_amplitude(&peak, spec)?.value.norm();
    let box_norm = l_peak.value().norm();
    let diff = (box_norm - engine).abs() / engine;
    let ratio = l_out.value().norm() / box_norm;
    let spread = l_peak.phase_spread();
    Ok(vec![
        OracleCheck::new(
            "|l| at light cone (EG, z=10, x=1)",
            diff <= AGREEMENT && l_peak.cauchy(),
            format!("box/engine relative difference {diff:.2e}"),
            &[("l_box", box_norm), ("l_engine", engine)],
        ),
        OracleCheck::new(
            "light-cone dominance (x=3 vs x=1)",
            ratio < 0.1,
            format!("|l(x=3)| / |l(x=1)| = {ratio:.3e}"),
            &[("ratio", ratio)],
        ),
        OracleCheck::new(
            "phase of l e^{-i OmegaT} across boxes",
            spread <= 1e-3,
            format!("phase spread {spread:.2e} rad"),
            &[("phase_spread", spread)],
        ),
    ])
}

fn exchange_check(spec: &QuadratureSpec) -> Result<OracleCheck> {
    let config = point(InitialState::Eg, 5.0, 10.0, 50.0)?;
    let b = extrapolated_exchange_amplitude(&config, &BoxSpec::base(&config)?)?;
    let engine = exchange_amplitude_b(&config, spec)?.value;
    let diff = (b.value() - engine).norm() / engine.norm();
    Ok(OracleCheck::new(
        "exchange b (EG, z=5, OmegaT=10)",
        diff <= AGREEMENT && b.cauchy(),
        format!("box/engine relative difference {diff:.2e}"),
        &[
            ("b_box_abs", b.value().norm()),
            ("b_engine_abs", engine.norm()),
        ],
    ))
}

fn fd_checks() -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    for l in [5.0, 10.0, 20.0] {
        let config = point(InitialState::Eg, l, 10.0, 50.0)?;
        let r = fd_derivative_check(l, &unit_kernel(&config, InitialState::Eg))?;
        out.push(OracleCheck::new(
            &format!("M', M'' finite differences (EG, L={l})"),
            r.passed,
            format!("max relative error {:.2e}", r.max_relative_error),
            &[("max_relative_error", r.max_relative_error)],
        ));
    }
    Ok(out)
}

fn weisskopf_checks() -> Result<Vec<OracleCheck>> {
    let hi = wigner_weisskopf_check(&point(InitialState::Ee, 10.0, 100.0, 100.0)?)?;
    let lo = wigner_weisskopf_check(&point(InitialState::Ee, 10.0, 100.0, 50.0)?)?;
    let drift = (hi.ratio - lo.ratio).abs() / hi.ratio;
    Ok(vec![
        OracleCheck::new(
            "Wigner-Weisskopf u2/(Gamma T) (OmegaT=100, cutoff=100)",
            hi.passed == Some(true),
            format!(
                "ratio {:.4}, secular rate / Gamma {:.4}",
                hi.ratio, hi.secular_ratio
            ),
            &[("ratio", hi.ratio), ("secular_ratio", hi.secular_ratio)],
        ),
        OracleCheck::new(
            "Wigner-Weisskopf cutoff drift (cutoff 50 vs 100)",
            drift < 0.02,
            format!(
                "ratio {:.4} vs {:.4}, drift {drift:.2e}",
                lo.ratio, hi.ratio
            ),
            &[("drift", drift)],
        ),
    ])
}

/// Runs every oracle check.
pub fn run_oracle_suite(spec: &QuadratureSpec) -> Result<OracleSuiteReport> {
    let mut checks = vec![emission_check(spec)?, emission_independence_check()?];
    checks.extend(cross_checks(spec)?);
    checks.push(exchange_check(spec)?);
    checks.extend(fd_checks()?);
    checks.extend(weisskopf_checks()?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(OracleSuiteReport { checks, passed })
}
