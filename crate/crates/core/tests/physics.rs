use tangle_core::amplitudes::{cross_amplitude, emission_probabilities};
use tangle_core::sweep::{cutoff_sensitivity, linspace, SENSITIVITY_CUTOFFS};
use tangle_core::{evaluate_point, make_config, InitialState, ObservableSet, QuadratureSpec};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn observables_are_invariant_under_unit_rescaling() {
    for (omega_t, z) in [(10.0, 10.0), (20.0, 5.0), (8.0, 12.0)] {
        for channel in InitialState::ALL {
            let base = make_config(1.0, omega_t, z, 5e-3, channel, 50.0).unwrap();
            let base = evaluate_point(&base, ObservableSet::OnePhoton, &spec()).unwrap();
            for s in [0.5, 3.0, 1e3] {
                let c = make_config(s, omega_t / s, z / s, 5e-3, channel, 50.0).unwrap();
                let r = evaluate_point(&c, ObservableSet::OnePhoton, &spec()).unwrap();
                for (a, b) in [
                    (base.c1, r.c1),
                    (base.u2, r.u2),
                    (base.v2, r.v2),
                    (base.abs_l, r.abs_l),
                    (base.s1, r.s1),
                ] {
                    assert!(
                        (a - b).abs() <= 1e-10 * a.abs().max(b.abs()),
                        "s = {s}, {channel:?}: {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn light_cone_peak_location_is_cutoff_stable() {
    let grid = linspace(0.8, 1.2, 401);
    let argmax = |cutoff: f64| {
        let mut best = (0.0, f64::NEG_INFINITY);
        for &x in &grid {
            let c = make_config(1.0, 10.0 / x, 10.0, 5e-3, InitialState::Eg, cutoff).unwrap();
            let l = cross_amplitude(&c, &spec()).unwrap().value.norm();
            if l > best.1 {
                best = (x, l);
            }
        }
        best.0
    };
    let a = argmax(50.0);
    let b = argmax(100.0);
    assert!((a - b).abs() < 0.02 * a, "{a} vs {b}");
}

#[test]
fn ee_cross_amplitude_decays_with_distance() {
    let at = |l: f64| {
        let c = make_config(1.0, 10.0, l, 5e-3, InitialState::Ee, 50.0).unwrap();
        cross_amplitude(&c, &spec()).unwrap().value.norm()
    };
    let far = at(100.0);
    let cone = at(10.0);
    assert!(far < 1e-3 * cone, "{far} vs {cone}");
}

#[test]
fn counter_rotating_weight_fades_with_time() {
    let ratio = |omega_t: f64| {
        let c = make_config(1.0, omega_t, 10.0, 5e-3, InitialState::Eg, 50.0).unwrap();
        let e = emission_probabilities(&c, &spec()).unwrap();
        assert!(e.v2.value >= 0.0);
        e.v2.value / e.u2.value
    };
    let r: Vec<f64> = [10.0, 30.0, 100.0].iter().map(|&t| ratio(t)).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn cutoff_report_covers_each_cutoff() {
    let c = make_config(1.0, 10.0, 10.0, 5e-3, InitialState::Eg, 50.0).unwrap();
    let rows = cutoff_sensitivity(&c, ObservableSet::OnePhoton, &spec()).unwrap();
    let cutoffs: Vec<f64> = rows.iter().map(|r| r.cutoff).collect();
    assert_eq!(cutoffs, SENSITIVITY_CUTOFFS.to_vec());
    // larger cutoff, more high-k emission
    assert!(rows[0].observables.u2 < rows[1].observables.u2);
    assert!(rows[1].observables.u2 < rows[2].observables.u2);
}
