//! Windowed delta function and the channel spectral kernels.
//!
//! A finite interaction window of length T turns the energy-conserving delta
//! function into `δ^T(ω) = sin(ωT/2) / (πω)`. Each channel weighs the photon
//! modes by a product of two such factors, one per vertex, with the atomic
//! phase e^{±iΩt} of the vertex fixing the sign of Ω:
//!
//! | channel | kernel                  | amplitudes paired            |
//! |---------|-------------------------|------------------------------|
//! | EG      | δ^T(Ω+ck) δ^T(Ω−ck)     | counter-rotating × rotating  |
//! | EE      | δ^T(ck−Ω)²              | rotating × rotating          |
//! | GG      | δ^T(ck+Ω)²              | counter-rotating × counter   |
//!
//! All kernels carry the soft UV form factor `exp(−ck/Λ)`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::quadrature::{integrate_interval, QuadratureSpec, TailEnvelope};
use crate::units::InitialState;

/// Below this |ωT/2| the sinc is evaluated by its Taylor series.
const SINC_SERIES_THRESHOLD: f64 = 1e-3;

/// sin(θ)/θ, continuous through θ = 0.
#[inline]
pub fn sinc(theta: f64) -> f64 {
    if theta.abs() < SINC_SERIES_THRESHOLD {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        theta.sin() / theta
    }
}

/// δ^T(ω) = sin(ωT/2) / (πω), with the removable singularity filled by T/2π.
#[inline]
pub fn delta_t(omega_arg: f64, t_window: f64) -> f64 {
    t_window / (2.0 * PI) * sinc(0.5 * omega_arg * t_window)
}

/// ∫ δ^T(ω)² dω by quadrature, which should equal T/2π.
///
/// The body is integrated over whole periods up to ω = a ≥ 200; the tail
/// beyond is 1/(2π²a) up to O(1/(T²a³)).
pub fn delta_square_integral(t_window: f64, spec: &QuadratureSpec) -> Result<f64> {
    let period = 2.0 * PI / t_window;
    let a = (200.0 / period).ceil() * period;
    let tight = QuadratureSpec {
        relative_tolerance: spec.relative_tolerance.min(1e-12),
        absolute_tolerance: spec.absolute_tolerance.min(1e-15),
        ..*spec
    };
    let body = integrate_interval(
        |w: f64| delta_t(w, t_window).powi(2),
        0.0,
        a,
        &[],
        Some(0.5 * period),
        &tight,
    )?;
    Ok(2.0 * (body.value + 1.0 / (2.0 * PI * PI * a)))
}

/// Windowed delta of fixed width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedDelta {
    pub t_window: f64,
}

impl WindowedDelta {
    pub fn new(t_window: f64) -> Self {
        WindowedDelta { t_window }
    }

    #[inline]
    pub fn eval(&self, omega_arg: f64) -> f64 {
        delta_t(omega_arg, self.t_window)
    }

    /// Peak value T/2π, attained at ω = 0.
    pub fn peak(&self) -> f64 {
        self.t_window / (2.0 * PI)
    }
}

/// Channel-dependent spectral kernel (c = 1, so k is a frequency).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralKernel {
    pub channel: InitialState,
    pub omega: f64,
    pub t_window: f64,
    /// Absolute form-factor scale Λ (same units as `omega`).
    pub cutoff: f64,
}

/// Node positions and oscillation scale of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints {
    /// Strictly increasing, all ≥ 0.
    pub points: Vec<f64>,
    /// Oscillation period 2π/(cT) of the windowed deltas.
    pub period: f64,
}

impl SpectralKernel {
    pub fn new(channel: InitialState, omega: f64, t_window: f64, cutoff: f64) -> Self {
        SpectralKernel {
            channel,
            omega,
            t_window,
            cutoff,
        }
    }

    #[inline]
    pub fn form_factor(&self, k: f64) -> f64 {
        (-k / self.cutoff).exp()
    }

    /// Kernel without the form factor.
    #[inline]
    pub fn bare(&self, k: f64) -> f64 {
        let t = self.t_window;
        match self.channel {
            InitialState::Eg => delta_t(self.omega + k, t) * delta_t(self.omega - k, t),
            InitialState::Ee => {
                let d = delta_t(k - self.omega, t);
                d * d
            }
            InitialState::Gg => {
                let d = delta_t(k + self.omega, t);
                d * d
            }
        }
    }

    #[inline]
    pub fn eval(&self, k: f64) -> f64 {
        self.bare(k) * self.form_factor(k)
    }

    /// Bound `|bare(k)| ≤ c / k²` valid for k ≥ 2Ω; returns `c`.
    ///
    /// From |δ^T(ω)| ≤ 1/(π|ω|): for k ≥ 2Ω, |k − Ω| ≥ k/2 and
    /// |k² − Ω²| ≥ 3k²/4.
    pub fn inverse_square_bound(&self) -> f64 {
        let pi2 = PI * PI;
        match self.channel {
            InitialState::Eg => 4.0 / (3.0 * pi2),
            InitialState::Ee => 4.0 / pi2,
            InitialState::Gg => 1.0 / pi2,
        }
    }

    /// Envelope of `k^weight_power · |kernel(k)| · scale` for k ≥ 2Ω.
    pub fn tail_envelope(&self, weight_power: i32, scale: f64) -> TailEnvelope {
        TailEnvelope {
            start: 2.0 * self.omega,
            coefficient: scale * self.inverse_square_bound(),
            power: weight_power - 2,
            decay: self.cutoff,
        }
    }

    /// Resonance k = Ω, the node lattices of both windowed-delta factors up to
    /// `k_max`, and the oscillation period 2π/T.
    pub fn breakpoints(&self, k_max: f64) -> Breakpoints {
        let period = 2.0 * PI / self.t_window;
        let mut points = Vec::new();
        let omega = self.omega;
        if omega <= k_max {
            points.push(omega);
        }
        // nodes of δ^T(k − Ω): k = Ω + n·period, n ≠ 0
        let rotating = |points: &mut Vec<f64>| {
            let n_min = (-omega / period).ceil() as i64;
            let n_max = ((k_max - omega) / period).floor() as i64;
            for n in n_min..=n_max {
                if n != 0 {
                    let k = omega + n as f64 * period;
                    if k > 0.0 {
                        points.push(k);
                    }
                }
            }
        };
        // nodes of δ^T(k + Ω): k = −Ω + n·period, k > 0
        let counter = |points: &mut Vec<f64>| {
            let n_min = (omega / period).floor() as i64 + 1;
            let n_max = ((k_max + omega) / period).floor() as i64;
            for n in n_min.max(1)..=n_max {
                let k = -omega + n as f64 * period;
                if k > 0.0 {
                    points.push(k);
                }
            }
        };
        match self.channel {
            InitialState::Eg => {
                rotating(&mut points);
                counter(&mut points);
            }
            InitialState::Ee => rotating(&mut points),
            InitialState::Gg => counter(&mut points),
        }
        sort_dedup(&mut points, period);
        Breakpoints { points, period }
    }
}

/// Sorts and drops points closer than a tiny fraction of `scale`.
pub(crate) fn sort_dedup(points: &mut Vec<f64>, scale: f64) {
    points.retain(|p| p.is_finite() && *p >= 0.0);
    points.sort_by(f64::total_cmp);
    let eps = 1e-9 * scale;
    points.dedup_by(|b, a| (*b - *a).abs() <= eps);
}

/// Value of `kernel(k)`; free-function form of [`SpectralKernel::eval`].
pub fn kernel(k: f64, kernel: &SpectralKernel) -> f64 {
    kernel.eval(k)
}

/// Free-function form of [`SpectralKernel::breakpoints`].
pub fn kernel_breakpoints(kernel: &SpectralKernel, k_max: f64) -> Breakpoints {
    kernel.breakpoints(k_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_limit_at_zero() {
        assert!((delta_t(0.0, 10.0) - 10.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((delta_t(0.0, 10.0) - 1.591_549_430_918_953_4).abs() < 1e-12);
        // the series branch meets the direct formula at the switch
        let th = SINC_SERIES_THRESHOLD * (1.0 - 1e-9);
        assert!((sinc(th) - th.sin() / th).abs() < 2e-16);
    }

    #[test]
    fn delta_vanishes_at_sine_nodes() {
        let t = 10.0;
        for n in [-3i32, -1, 1, 2, 7] {
            let w = 2.0 * PI * n as f64 / t;
            assert!(delta_t(w, t).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn delta_is_even_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let w: f64 = rng.gen_range(-50.0..50.0);
            let t: f64 = rng.gen_range(0.1..100.0);
            assert_eq!(delta_t(-w, t), delta_t(w, t));
            let d = delta_t(w, t).abs();
            assert!(d <= t / (2.0 * PI) * (1.0 + 1e-15));
            assert!(d <= 1.0 / (PI * w.abs()) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn kernel_substitution_examples() {
        let t = 10.0;
        let eg = SpectralKernel::new(InitialState::Eg, 1.0, t, 50.0);
        let expected = delta_t(2.0, t) * t / (2.0 * PI) * (-1.0f64 / 50.0).exp();
        assert!((eg.eval(1.0) - expected).abs() < 1e-15);

        let ee = SpectralKernel::new(InitialState::Ee, 1.0, t, 50.0);
        let expected = (t / (2.0 * PI)).powi(2) * (-1.0f64 / 50.0).exp();
        assert!((ee.eval(1.0) - expected).abs() < 1e-14);

        let gg = SpectralKernel::new(InitialState::Gg, 1.0, t, 50.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let k: f64 = rng.gen_range(0.0..100.0);
            assert!(gg.eval(k) >= 0.0);
            assert!(ee.eval(k) >= 0.0);
        }
    }

    #[test]
    fn inverse_square_bounds_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ch in InitialState::ALL {
            for _ in 0..2000 {
                let t: f64 = rng.gen_range(0.5..200.0);
                let k: f64 = rng.gen_range(2.0..500.0);
                let ker = SpectralKernel::new(ch, 1.0, t, 50.0);
                assert!(ker.bare(k).abs() <= ker.inverse_square_bound() / (k * k) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn ee_breakpoints_contain_resonance_and_lattice() {
        let ker = SpectralKernel::new(InitialState::Ee, 1.0, 10.0, 50.0);
        let bp = ker.breakpoints(20.0);
        assert!((bp.period - 2.0 * PI / 10.0).abs() < 1e-15);
        assert!(bp.points.contains(&1.0));
        for n in 1..10 {
            let node = 1.0 + n as f64 * bp.period;
            assert!(bp.points.iter().any(|&k| (k - node).abs() < 1e-12));
        }
        // a node lattice point below the resonance
        assert!(bp
            .points
            .iter()
            .any(|&k| (k - (1.0 - bp.period)).abs() < 1e-12));
        for &k in &bp.points {
            assert!(ker.bare(k).abs() < 1e-12 || k == 1.0);
        }
    }

    #[test]
    fn eg_breakpoints_include_both_lattices() {
        let ker = SpectralKernel::new(InitialState::Eg, 1.0, 7.0, 50.0);
        let bp = ker.breakpoints(30.0);
        let p = bp.period;
        assert!(bp
            .points
            .iter()
            .any(|&k| (k - (1.0 + 3.0 * p)).abs() < 1e-12));
        assert!(bp
            .points
            .iter()
            .any(|&k| (k - (-1.0 + 3.0 * p)).abs() < 1e-12));
        assert!(bp.points.iter().all(|&k| k >= 0.0));
    }

    #[test]
    fn breakpoints_strictly_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ch in InitialState::ALL {
            for _ in 0..50 {
                let omega: f64 = rng.gen_range(0.1..5.0);
                let t: f64 = rng.gen_range(0.1..50.0);
                let ker = SpectralKernel::new(ch, omega, t, 50.0 * omega);
                let bp = ker.breakpoints(40.0 * omega);
                assert!(bp.points.windows(2).all(|w| w[0] < w[1]));
                assert!(bp.points.iter().all(|&k| k >= 0.0 && k <= 40.0 * omega));
            }
        }
    }

    #[test]
    fn square_integral_is_t_over_two_pi() {
        use crate::quadrature::QuadratureSpec;
        for t in [1.0, 10.0, 50.0] {
            let exact = t / (2.0 * PI);
            let got = delta_square_integral(t, &QuadratureSpec::default()).unwrap();
            assert!(
                (got - exact).abs() < 1e-6 * exact,
                "T = {t}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn sifting_error_shrinks_as_window_grows() {
        use crate::quadrature::{integrate_interval, QuadratureSpec};
        // smooth bump supported on (−1, 1), g(0) = 1/e
        let bump = |w: f64| {
            if w.abs() < 1.0 {
                (-1.0 / (1.0 - w * w)).exp()
            } else {
                0.0
            }
        };
        let spec = QuadratureSpec {
            relative_tolerance: 1e-13,
            absolute_tolerance: 1e-16,
            ..QuadratureSpec::default()
        };
        let errors: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&t| {
                let r = integrate_interval(
                    |w: f64| delta_t(w, t) * bump(w),
                    -1.0,
                    1.0,
                    &[0.0],
                    Some(PI / t),
                    &spec,
                )
                .unwrap();
                (r.value - (-1.0f64).exp()).abs() * 1.0f64.exp()
            })
            .collect();
        assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
        assert!(errors[0] < 1e-2);
    }
}
