use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcrypto::channels::{
    apply_channel, collective_error_probability, cqka_avg_fidelity, kraus_ops, CollectiveNoise, NoiseModel,
};
use qcrypto::qcore::{StateVector, C64};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

fn model() -> impl Strategy<Value = NoiseModel> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|eta| NoiseModel::AmplitudeDamping { eta }),
        (0.0f64..=1.0).prop_map(|eta| NoiseModel::PhaseDamping { eta }),
        (0.0f64..=1.0, 0.0f64..=0.5).prop_map(|(alpha, p)| NoiseModel::NonMarkovianDephasing { alpha, p }),
        (0.0f64..=0.66, 0.0f64..=0.5).prop_map(|(alpha, p)| NoiseModel::NonMarkovianDepolarizing { alpha, p }),
    ]
}

#[test]
fn full_damping_sends_one_to_zero() {
    let ch = kraus_ops(NoiseModel::AmplitudeDamping { eta: 1.0 }).unwrap();
    let out = apply_channel(&StateVector::one().density(), &ch, 0).unwrap();
    assert_abs_diff_eq!(out.expectation(&StateVector::zero()).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn full_dephasing_of_plus_is_maximally_mixed() {
    let ch = kraus_ops(NoiseModel::PhaseDamping { eta: 1.0 }).unwrap();
    let out = apply_channel(&StateVector::plus().density(), &ch, 0).unwrap();
    assert_abs_diff_eq!(out.vn_entropy(), 1.0, epsilon = 1e-12);
}

#[test]
fn collective_noise_peaks() {
    assert_abs_diff_eq!(collective_error_probability(CollectiveNoise::Dephasing(FRAC_PI_2)), 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(collective_error_probability(CollectiveNoise::Rotation(FRAC_PI_4)), 0.5, epsilon = 1e-15);
    assert_eq!(collective_error_probability(CollectiveNoise::Rotation(0.0)), 0.0);
}

#[test]
fn amplitude_damping_fidelity_bottoms_at_half() {
    let f = cqka_avg_fidelity(NoiseModel::AmplitudeDamping { eta: 1.0 }).unwrap();
    assert_abs_diff_eq!(f.oracle, 0.5, epsilon = 1e-12);
}

#[test]
fn out_of_range_parameters_are_rejected() {
    assert!(kraus_ops(NoiseModel::PhaseDamping { eta: 1.5 }).is_err());
    assert!(kraus_ops(NoiseModel::NonMarkovianDepolarizing { alpha: 1.0, p: 0.5 }).is_err());
}

proptest! {
    #[test]
    fn channels_are_complete(m in model()) {
        prop_assert!(kraus_ops(m).unwrap().completeness_residual() < 1e-10);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(m in model(), re in -1.0f64..1.0, im in -1.0f64..1.0, a in 0.05f64..1.0) {
        let s = StateVector::normalized(vec![2], vec![C64::new(a, 0.0), C64::new(re, im)]).unwrap();
        let out = apply_channel(&s.density(), &kraus_ops(m).unwrap(), 0).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-10);
        prop_assert!(out.eigenvalues().iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn dephasing_error_is_symmetric_about_a_right_angle(phi in 0.0f64..FRAC_PI_2) {
        let a = collective_error_probability(CollectiveNoise::Dephasing(FRAC_PI_2 - phi));
        let b = collective_error_probability(CollectiveNoise::Dephasing(FRAC_PI_2 + phi));
        prop_assert!((a - b).abs() < 1e-12);
    }
}
