//! Engine integrals against values frozen from `reference/generate_reference.py`
//! (mpmath, 30 digits).

use tangle_core::amplitudes::{emission_probabilities, m_derivatives, unit_kernel};
use tangle_core::{make_config, InitialState, QuadratureSpec};

const K3_DELTA_SQ_T20_L50: f64 = 135.277_453_774_056_14;
const M_EG_T10_L10: f64 = 0.004_443_509_980_152_685;
const M1_EG_T10_L10: f64 = -0.008_940_541_309_339_654;
const M2_EG_T10_L10: f64 = -0.002_103_673_463_257_731;

fn close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol * want.abs(),
        "{got} vs reference {want}"
    );
}

#[test]
fn emission_integral_matches_reference() {
    let c = make_config(1.0, 20.0, 1.0, 5e-3, InitialState::Ee, 50.0).unwrap();
    let e = emission_probabilities(&c, &QuadratureSpec::default()).unwrap();
    let integral = e.u2.value / (2.0 * c.coupling() / 3.0);
    close(integral, K3_DELTA_SQ_T20_L50, 1e-6);
}

#[test]
fn m_and_derivatives_match_reference() {
    let c = make_config(1.0, 10.0, 10.0, 5e-3, InitialState::Eg, 50.0).unwrap();
    let kernel = unit_kernel(&c, InitialState::Eg);
    let d = m_derivatives(10.0, &kernel, &QuadratureSpec::default()).unwrap();
    close(d.m.value, M_EG_T10_L10, 1e-6);
    close(d.m1.value, M1_EG_T10_L10, 1e-6);
    close(d.m2.value, M2_EG_T10_L10, 1e-6);
}

#[test]
fn tighter_tolerance_moves_closer_to_reference() {
    let c = make_config(1.0, 10.0, 10.0, 5e-3, InitialState::Eg, 50.0).unwrap();
    let kernel = unit_kernel(&c, InitialState::Eg);
    let tight = QuadratureSpec {
        relative_tolerance: 1e-12,
        absolute_tolerance: 1e-17,
        ..QuadratureSpec::default()
    };
    let d = m_derivatives(10.0, &kernel, &tight).unwrap();
    close(d.m.value, M_EG_T10_L10, 1e-10);
    close(d.m2.value, M2_EG_T10_L10, 1e-10);
}
