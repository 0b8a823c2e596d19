//! Panel-adaptive Gauss–Kronrod quadrature for semi-infinite oscillatory
//! integrands.
//!
//! The half-line is truncated at the point `k_T` where a caller-supplied
//! envelope `|f(k)| ≤ c·k^p·e^{−k/λ}` certifies that the remainder is below
//! half the absolute tolerance; the bound is added to the reported error.
//! The finite part is split at every breakpoint and into panels no wider than
//! half the oscillation period, each integrated with the 15-point Kronrod rule
//! and its embedded 7-point Gauss rule. Panels are then bisected, worst first,
//! until the error estimate meets the tolerance or is at the rounding floor
//! of the panel sums.
//!
//! Several integrands sharing the same nodes (an integral and its parameter
//! derivatives, or the real and imaginary parts of a complex integrand) are
//! integrated in one pass through [`integrate_family`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Relative size of the rounding floor, per unit of ∫|f|.
const ROUNDOFF_FACTOR: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            relative_tolerance: 1e-9,
            absolute_tolerance: 1e-14,
            max_panels: 4_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_relative_tolerance(mut self, tol: f64) -> Self {
        self.relative_tolerance = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return Err(Error::domain(
                "relative_tolerance",
                self.relative_tolerance,
                "must be positive",
            ));
        }
        if !(self.absolute_tolerance > 0.0 && self.absolute_tolerance.is_finite()) {
            return Err(Error::domain(
                "absolute_tolerance",
                self.absolute_tolerance,
                "must be positive",
            ));
        }
        if self.max_panels == 0 {
            return Err(Error::domain("max_panels", 0.0, "must be positive"));
        }
        Ok(())
    }

    /// Tolerance the integral of magnitude `value` has to meet.
    pub fn tolerance_for(&self, value: f64) -> f64 {
        (self.relative_tolerance * value.abs()).max(self.absolute_tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Quadrature error estimate plus `tail_bound`.
    pub error_estimate: f64,
    pub panels_used: usize,
    pub tail_bound: f64,
}

impl QuadratureResult {
    /// Error relative to `max(|value|, atol/rtol)`; at most `rtol` when the
    /// tolerance was met.
    pub fn relative_error(&self, spec: &QuadratureSpec) -> f64 {
        let scale = self
            .value
            .abs()
            .max(spec.absolute_tolerance / spec.relative_tolerance);
        self.error_estimate / scale
    }
}

/// `|f(k)| ≤ coefficient · k^power · exp(−k/decay)` for all `k ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEnvelope {
    pub start: f64,
    pub coefficient: f64,
    pub power: i32,
    pub decay: f64,
}

impl TailEnvelope {
    /// Upper bound on `∫_a^∞ |f|`, for `a ≥ start`.
    pub fn integral_from(&self, a: f64) -> f64 {
        let a = a.max(self.start).max(0.0);
        let lam = self.decay;
        let damp = (-a / lam).exp();
        if self.power < 0 {
            if a == 0.0 {
                return f64::INFINITY;
            }
            return self.coefficient * a.powi(self.power) * lam * damp;
        }
        // ∫_a^∞ k^p e^{-k/λ} dk = λ e^{-a/λ} Σ_j p!/(p-j)! a^{p-j} λ^j
        let p = self.power;
        let mut sum = 0.0;
        let mut falling = 1.0;
        for j in 0..=p {
            sum += falling * a.powi(p - j) * lam.powi(j);
            falling *= (p - j) as f64;
        }
        self.coefficient * lam * damp * sum
    }

    /// Smallest point (to within 1e-6·decay) where the tail bound is ≤ `target`.
    pub fn truncation_point(&self, target: f64) -> f64 {
        let mut lo = self.start.max(0.0);
        if self.integral_from(lo) <= target {
            return lo;
        }
        let mut hi = lo + self.decay;
        while self.integral_from(hi) > target {
            lo = hi;
            hi += self.decay;
        }
        while hi - lo > 1e-6 * self.decay {
            let mid = 0.5 * (lo + hi);
            if self.integral_from(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    resabs: [f64; N],
}

fn rescale_error(err: f64, resasc: f64) -> f64 {
    let err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        resasc * (200.0 * err / resasc).powf(1.5).min(1.0)
    } else {
        err
    }
}

fn check_finite<const N: usize>(v: &[f64; N], at: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidIntegrand { at })
    }
}

fn gauss_kronrod_15<const N: usize, F>(f: &F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];

    let fc = f(center);
    check_finite(&fc, center)?;
    let mut gauss = [0.0; N];
    let mut kronrod = [0.0; N];
    let mut resabs = [0.0; N];
    for c in 0..N {
        gauss[c] = fc[c] * WG[3];
        kronrod[c] = fc[c] * WGK[7];
        resabs[c] = (fc[c] * WGK[7]).abs();
    }
    for j in 0..7 {
        let x = half * XGK[j];
        let (xl, xr) = (center - x, center + x);
        let f1 = f(xl);
        check_finite(&f1, xl)?;
        let f2 = f(xr);
        check_finite(&f2, xr)?;
        for c in 0..N {
            let sum = f1[c] + f2[c];
            kronrod[c] += WGK[j] * sum;
            resabs[c] += WGK[j] * (f1[c].abs() + f2[c].abs());
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * sum;
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        let mean = 0.5 * kronrod[c];
        let mut resasc = WGK[7] * (fc[c] - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((fv1[j][c] - mean).abs() + (fv2[j][c] - mean).abs());
        }
        value[c] = kronrod[c] * half;
        resabs[c] *= half.abs();
        error[c] = rescale_error((kronrod[c] - gauss[c]) * half, resasc * half.abs());
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        resabs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Ranked {
    score: f64,
    index: usize,
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Splits `[0, k_max]` at the breakpoints and caps panel widths.
fn initial_edges(breakpoints: &[f64], k_max: f64, max_width: Option<f64>) -> Vec<f64> {
    let mut nodes = Vec::with_capacity(breakpoints.len() + 2);
    nodes.push(0.0);
    nodes.extend(
        breakpoints
            .iter()
            .copied()
            .filter(|&k| k > 0.0 && k < k_max),
    );
    nodes.push(k_max);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut edges = Vec::with_capacity(nodes.len());
    edges.push(nodes[0]);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = match max_width {
            Some(h) if h > 0.0 => ((b - a) / h).ceil().max(1.0) as usize,
            _ => 1,
        };
        let step = (b - a) / pieces as f64;
        for i in 1..pieces {
            edges.push(a + step * i as f64);
        }
        edges.push(b);
    }
    edges
}

/// Adaptive integration of `N` integrands over the panels given by `edges`.
fn integrate_edges<const N: usize, F>(
    f: &F,
    edges: &[f64],
    tails: [f64; N],
    spec: &QuadratureSpec,
) -> Result<[QuadratureResult; N]>
where
    F: Fn(f64) -> [f64; N],
{
    spec.validate()?;
    let mut panels: Vec<Panel<N>> = Vec::with_capacity(edges.len() * 2);
    for w in edges.windows(2) {
        if w[1] > w[0] {
            panels.push(gauss_kronrod_15(f, w[0], w[1])?);
        }
    }

    let mut total = [0.0; N];
    let mut error = [0.0; N];
    let mut resabs = [0.0; N];
    for p in &panels {
        for c in 0..N {
            total[c] += p.value[c];
            error[c] += p.error[c];
            resabs[c] += p.resabs[c];
        }
    }
    let scale: [f64; N] = std::array::from_fn(|c| spec.tolerance_for(total[c]));
    let score = |p: &Panel<N>| -> f64 { (0..N).map(|c| p.error[c] / scale[c]).fold(0.0, f64::max) };

    let mut heap: BinaryHeap<Ranked> = panels
        .iter()
        .enumerate()
        .map(|(index, p)| Ranked {
            score: score(p),
            index,
        })
        .collect();

    let satisfied = |total: &[f64; N], error: &[f64; N], resabs: &[f64; N]| {
        (0..N).all(|c| {
            let target = spec.tolerance_for(total[c]) - tails[c];
            error[c] <= target.max(ROUNDOFF_FACTOR * resabs[c])
        })
    };

    while !satisfied(&total, &error, &resabs) {
        if panels.len() >= spec.max_panels {
            let worst = (0..N)
                .max_by(|&i, &j| {
                    (error[i] / spec.tolerance_for(total[i]))
                        .total_cmp(&(error[j] / spec.tolerance_for(total[j])))
                })
                .unwrap_or(0);
            return Err(Error::NonConvergence {
                panels: panels.len(),
                error_estimate: error[worst] + tails[worst],
                tolerance: spec.tolerance_for(total[worst]),
            });
        }
        let Some(Ranked { index, .. }) = heap.pop() else {
            let c = (0..N)
                .find(|&c| error[c] > spec.tolerance_for(total[c]) - tails[c])
                .unwrap_or(0);
            return Err(Error::NonConvergence {
                panels: panels.len(),
                error_estimate: error[c] + tails[c],
                tolerance: spec.tolerance_for(total[c]),
            });
        };
        let parent = panels[index];
        let mid = 0.5 * (parent.a + parent.b);
        if !(mid > parent.a && mid < parent.b) {
            // cannot be split further; leave it out of the queue
            continue;
        }
        let left = gauss_kronrod_15(f, parent.a, mid)?;
        let right = gauss_kronrod_15(f, mid, parent.b)?;
        for c in 0..N {
            total[c] += left.value[c] + right.value[c] - parent.value[c];
            error[c] += left.error[c] + right.error[c] - parent.error[c];
            resabs[c] += left.resabs[c] + right.resabs[c] - parent.resabs[c];
        }
        panels[index] = left;
        heap.push(Ranked {
            score: score(&left),
            index,
        });
        panels.push(right);
        heap.push(Ranked {
            score: score(&right),
            index: panels.len() - 1,
        });
    }

    // fixed accumulation order, independent of refinement history
    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| panels[i].a.total_cmp(&panels[j].a));
    let used = order.len();
    Ok(std::array::from_fn(|c| {
        let value = compensated_sum(order.iter().map(|&i| panels[i].value[c]));
        let err = compensated_sum(order.iter().map(|&i| panels[i].error[c]));
        let abs = compensated_sum(order.iter().map(|&i| panels[i].resabs[c]));
        QuadratureResult {
            value,
            error_estimate: err.max(ROUNDOFF_FACTOR * abs) + tails[c],
            panels_used: used,
            tail_bound: tails[c],
        }
    }))
}

/// Integrates `N` integrands sharing nodes over `[0, ∞)`.
///
/// `tails[c]` must bound component `c` beyond its `start`; the truncation
/// point is the largest of the per-component truncation points.
pub fn integrate_family<const N: usize, F>(
    f: F,
    breakpoints: &[f64],
    oscillation_period: Option<f64>,
    tails: &[TailEnvelope; N],
    spec: &QuadratureSpec,
) -> Result<[QuadratureResult; N]>
where
    F: Fn(f64) -> [f64; N],
{
    spec.validate()?;
    if let Some(p) = oscillation_period {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::domain(
                "oscillation_period",
                p,
                "must be positive and finite",
            ));
        }
    }
    let target = 0.5 * spec.absolute_tolerance;
    let k_max = tails
        .iter()
        .map(|t| t.truncation_point(target))
        .fold(0.0, f64::max);
    if !(k_max > 0.0) {
        return Err(Error::domain("truncation_point", k_max, "must be positive"));
    }
    let tail_bounds: [f64; N] = std::array::from_fn(|c| tails[c].integral_from(k_max));
    let edges = initial_edges(breakpoints, k_max, oscillation_period.map(|p| 0.5 * p));
    integrate_edges(&f, &edges, tail_bounds, spec)
}

/// Integrates a single function over `[0, ∞)`.
pub fn integrate_semi_infinite<F>(
    f: F,
    breakpoints: &[f64],
    oscillation_period: Option<f64>,
    tail: &TailEnvelope,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    let [r] = integrate_family(|k| [f(k)], breakpoints, oscillation_period, &[*tail], spec)?;
    Ok(r)
}

/// An integral and its first two parameter derivatives over shared panels.
///
/// The caller supplies the three integrands, already differentiated under the
/// integral sign.
pub fn integrate_with_derivatives<F>(
    family: F,
    breakpoints: &[f64],
    oscillation_period: Option<f64>,
    tails: &[TailEnvelope; 3],
    spec: &QuadratureSpec,
) -> Result<[QuadratureResult; 3]>
where
    F: Fn(f64) -> [f64; 3],
{
    integrate_family(family, breakpoints, oscillation_period, tails, spec)
}

/// Integrates over a finite interval `[a, b]` split at `breakpoints`.
pub fn integrate_interval<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    max_width: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::domain("interval", b - a, "needs finite a < b"));
    }
    let shifted: Vec<f64> = breakpoints.iter().map(|&k| k - a).collect();
    let edges: Vec<f64> = initial_edges(&shifted, b - a, max_width)
        .into_iter()
        .map(|e| e + a)
        .collect();
    let [r] = integrate_edges(&|k| [f(k)], &edges, [0.0], spec)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_tail(power: i32, coefficient: f64) -> TailEnvelope {
        TailEnvelope {
            start: 0.0,
            coefficient,
            power,
            decay: 1.0,
        }
    }

    #[test]
    fn tail_integral_matches_closed_forms() {
        // ∫_a^∞ k² e^{-k} = e^{-a}(a² + 2a + 2)
        let t = exp_tail(2, 1.0);
        let a: f64 = 3.0;
        let exact = (-a).exp() * (a * a + 2.0 * a + 2.0);
        assert!((t.integral_from(a) - exact).abs() < 1e-15);
        let k = t.truncation_point(1e-12);
        assert!(t.integral_from(k) <= 1e-12);
        assert!(t.integral_from(k - 1e-3) > 1e-12);
    }

    #[test]
    fn pure_exponential() {
        let r = integrate_semi_infinite(
            |k: f64| (-k).exp(),
            &[],
            None,
            &exp_tail(0, 1.0),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.error_estimate >= r.tail_bound);
        assert!(r.tail_bound <= 0.5e-14);
    }

    #[test]
    fn damped_sine() {
        let r = integrate_semi_infinite(
            |k: f64| (-k).exp() * (50.0 * k).sin(),
            &[],
            Some(2.0 * std::f64::consts::PI / 50.0),
            &exp_tail(0, 1.0),
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = 50.0 / 2501.0;
        assert!((r.value - exact).abs() < 1e-9 * exact, "{r:?}");
        assert!((r.value - exact).abs() <= r.error_estimate);
    }

    #[test]
    fn panels_respect_half_period() {
        let edges = initial_edges(&[0.3, 1.0], 3.0, Some(0.25));
        assert!(edges.windows(2).all(|w| w[1] - w[0] <= 0.25 + 1e-15));
        assert!(edges.contains(&0.3) && edges.contains(&1.0));
        assert_eq!(*edges.last().unwrap(), 3.0);
    }

    #[test]
    fn nan_is_rejected() {
        let err = integrate_semi_infinite(
            |k: f64| if k > 1.0 { f64::NAN } else { (-k).exp() },
            &[],
            None,
            &exp_tail(0, 1.0),
            &QuadratureSpec::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidIntegrand { .. }));
    }

    #[test]
    fn panel_budget_exhaustion() {
        let spec = QuadratureSpec {
            max_panels: 3,
            ..QuadratureSpec::default()
        };
        // a narrow spike needs many bisections
        let err = integrate_semi_infinite(
            |k: f64| (-k).exp() + 1.0 / (1.0 + 1e8 * (k - 3.3).powi(2)),
            &[],
            None,
            &exp_tail(0, 2.0),
            &spec,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn adaptive_refinement_finds_a_spike() {
        let w: f64 = 1e-4;
        let r = integrate_semi_infinite(
            |k: f64| (-k).exp() + w / ((k - 3.3).powi(2) + w * w),
            &[],
            None,
            &TailEnvelope {
                start: 10.0,
                coefficient: 2.0,
                power: 0,
                decay: 1.0,
            },
            &QuadratureSpec::default(),
        )
        .unwrap();
        // Lorentzian mass on [0, k_T] ~ π − w/3.3 − w/(k_T−3.3)
        let k_t = r.panels_used; // only used to show refinement happened
        assert!(k_t > 10);
        let lorentz = std::f64::consts::PI - (w / 3.3).atan() - (w / 30.0).atan();
        assert!((r.value - 1.0 - lorentz).abs() < 1e-6, "{r:?}");
    }

    fn sine_family(l: f64) -> [QuadratureResult; 3] {
        let family = move |k: f64| {
            let (s, c) = (k * l).sin_cos();
            let e = (-k).exp();
            [
                e * s / l,
                e * (k * c / l - s / (l * l)),
                e * (-k * k * s / l - 2.0 * k * c / (l * l) + 2.0 * s / (l * l * l)),
            ]
        };
        let scale = 1.0 / l;
        let tails = [
            exp_tail(0, scale),
            exp_tail(1, 2.0 * scale),
            exp_tail(2, 5.0 * scale),
        ];
        integrate_with_derivatives(
            family,
            &[],
            Some(2.0 * std::f64::consts::PI / l),
            &tails,
            &QuadratureSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn derivative_family_sine() {
        // ∫ e^{-k} sin(kL)/L dk = 1/(1+L²)
        let l: f64 = 1.0;
        let [m, m1, m2] = sine_family(l);
        let q = 1.0 + l * l;
        assert!((m.value - 1.0 / q).abs() < 1e-8);
        assert!((m1.value + 2.0 * l / (q * q)).abs() < 1e-8);
        assert!((m2.value - (6.0 * l * l - 2.0) / (q * q * q)).abs() < 1e-8);
    }

    #[test]
    fn derivative_family_against_atan() {
        // ∫ e^{-k} sin(kL)/(kL) dk = atan(L)/L
        let l: f64 = 1.0;
        let family = |k: f64| {
            let (s, c) = (k * l).sin_cos();
            let e = (-k).exp();
            [
                e * s / (k * l),
                e * (c / l - s / (k * l * l)),
                e * (-k * s / l - 2.0 * c / (l * l) + 2.0 * s / (k * l * l * l)),
            ]
        };
        let tails = [exp_tail(-1, 1.0), exp_tail(0, 2.0), exp_tail(1, 5.0)];
        let [m, m1, m2] = integrate_with_derivatives(
            family,
            &[],
            Some(2.0 * std::f64::consts::PI / l),
            &tails,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let g = |l: f64| l.atan() / l;
        let g1 = |l: f64| 1.0 / (l * (1.0 + l * l)) - l.atan() / (l * l);
        let g2 = |l: f64| {
            -(3.0 * l * l + 1.0) / (l * l * (1.0 + l * l).powi(2)) - 1.0 / (l * l * (1.0 + l * l))
                + 2.0 * l.atan() / (l * l * l)
        };
        assert!((m.value - g(l)).abs() < 1e-8, "{} vs {}", m.value, g(l));
        assert!((m1.value - g1(l)).abs() < 1e-8, "{} vs {}", m1.value, g1(l));
        assert!((m2.value - g2(l)).abs() < 1e-8, "{} vs {}", m2.value, g2(l));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for l in [0.5, 1.0, 3.0] {
            let h = 1e-4 * l;
            let [_, m1, m2] = sine_family(l);
            let [up, ..] = sine_family(l + h);
            let [down, ..] = sine_family(l - h);
            let [mid, ..] = sine_family(l);
            let fd1 = (up.value - down.value) / (2.0 * h);
            let fd2 = (up.value - 2.0 * mid.value + down.value) / (h * h);
            assert!((fd1 - m1.value).abs() < 1e-4 * m1.value.abs(), "L={l}");
            assert!((fd2 - m2.value).abs() < 1e-4 * m2.value.abs(), "L={l}");
        }
    }

    #[test]
    fn large_parameter_stays_finite() {
        let [m, m1, m2] = sine_family(100.0);
        let spec = QuadratureSpec::default();
        for r in [m, m1, m2] {
            assert!(r.value.is_finite());
            assert!(r.error_estimate <= spec.tolerance_for(r.value));
        }
    }

    #[test]
    fn tail_bound_covers_the_remainder() {
        // remainder of ∫ e^{-k} beyond k_T is e^{-k_T}
        let tail = exp_tail(0, 1.0);
        let spec = QuadratureSpec::default();
        let r = integrate_semi_infinite(|k: f64| (-k).exp(), &[], None, &tail, &spec).unwrap();
        let k_t = tail.truncation_point(0.5 * spec.absolute_tolerance);
        assert!(r.tail_bound >= (-k_t).exp() * (1.0 - 1e-12));
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let a = sine_family(2.5);
        let b = sine_family(2.5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
        }
    }

    #[test]
    fn finite_interval() {
        let r = integrate_interval(
            |t: f64| t.cos(),
            0.0,
            10.0,
            &[3.0],
            Some(0.5),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((r.value - 10f64.sin()).abs() < 1e-12);
    }
}
